// Copyright 2026 The FairRank Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Demographic-inference noise: row-stochastic confusion matrices and label
// perturbation driven by them.

#ifndef FAIRRANK_INFERENCE_NOISE_H_
#define FAIRRANK_INFERENCE_NOISE_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fairrank/ranking_model.h"

namespace fairrank {

class ConfusionMatrix {
 public:
  static constexpr double kRowTolerance = 1e-6;

  ConfusionMatrix() = default;
  // rows[true][predicted]. Row and column label sets must match; missing
  // cells are treated as zero.
  explicit ConfusionMatrix(
      const std::map<SubgroupLabel, std::map<SubgroupLabel, double>>& rows);

  // {"labels": [...], "rows": {"true": {"pred": prob, ...}, ...}}
  static ConfusionMatrix FromJson(const std::string& text);
  static ConfusionMatrix LoadFile(const std::string& path);
  std::string ToJson() const;

  const std::vector<SubgroupLabel>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  bool contains(const SubgroupLabel& label) const;
  double Probability(const SubgroupLabel& truth,
                     const SubgroupLabel& predicted) const;
  // Row for `truth`, in labels() order.
  std::span<const double> Row(const SubgroupLabel& truth) const;
  std::size_t IndexOf(const SubgroupLabel& label) const;

  // Renames label parts, e.g. {"Latinx": "Hispanic"} to match a dataset's
  // spelling. Parts without an entry are kept.
  ConfusionMatrix WithAliases(const std::map<std::string, std::string>& aliases) const;

 private:
  std::vector<SubgroupLabel> labels_;
  std::vector<double> cells_;  // row-major
};

// Names of the shipped race/ethnicity matrices.
const std::vector<std::string>& BuiltinMatrixNames();

// ethcnn, ethnicolr, bisg, nameprism, deepface (case-insensitive). Labels
// are Asian, Black, Latinx, White.
ConfusionMatrix LoadBuiltinMatrix(const std::string& name);

// Resolves a built-in name or a path to a JSON matrix file.
ConfusionMatrix ResolveMatrix(const std::string& name_or_path);

// Diagonal `accuracy`, remaining mass spread evenly over the other labels.
ConfusionMatrix UniformAccuracyMatrix(double accuracy,
                                      const std::vector<SubgroupLabel>& labels);

// Independent composition over product labels (a parts followed by b parts).
ConfusionMatrix ComposeMatrices(const ConfusionMatrix& a,
                                const ConfusionMatrix& b);

ConfusionMatrix IdentityMatrix(const std::vector<SubgroupLabel>& labels);

// Draws each candidate's inferred label from its true label's row, one
// uniform per candidate in input order. Deterministic for a given seed.
std::vector<Candidate> PerturbLabels(std::vector<Candidate> candidates,
                                     const ConfusionMatrix& cm,
                                     std::uint64_t seed);

}  // namespace fairrank

#endif  // FAIRRANK_INFERENCE_NOISE_H_
