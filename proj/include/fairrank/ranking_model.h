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

// Core value types shared by the metric, re-ranking, noise and simulation
// code: intersectional subgroup labels, candidates, rankings and label
// distributions.

#ifndef FAIRRANK_RANKING_MODEL_H_
#define FAIRRANK_RANKING_MODEL_H_

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairrank/error.h"

namespace fairrank {

// An intersectional subgroup, e.g. {"White", "Men"}. Parts are kept in the
// configured attribute order; equality, hashing and ordering all go through
// the canonical (space-joined) string.
class SubgroupLabel {
 public:
  SubgroupLabel() = default;
  explicit SubgroupLabel(std::vector<std::string> parts);
  // Single-attribute convenience.
  explicit SubgroupLabel(std::string single);

  const std::vector<std::string>& parts() const { return parts_; }
  const std::string& str() const { return canonical_; }
  bool empty() const { return parts_.empty(); }

  friend bool operator==(const SubgroupLabel& a, const SubgroupLabel& b) {
    return a.canonical_ == b.canonical_;
  }
  friend std::strong_ordering operator<=>(const SubgroupLabel& a,
                                          const SubgroupLabel& b) {
    return a.canonical_ <=> b.canonical_;
  }

 private:
  std::vector<std::string> parts_;
  std::string canonical_;
};

// Cartesian-product label: one value per protected attribute.
SubgroupLabel SubgroupProduct(const std::vector<std::string>& attribute_values);

enum class LabelSource { kTrue, kInferred };

struct Candidate {
  std::string id;
  double score = 0.0;
  SubgroupLabel true_label;
  std::optional<SubgroupLabel> inferred_label;

  // Label used by a computation; throws kMissingLabel when the inferred label
  // is requested but absent.
  const SubgroupLabel& label(LabelSource source) const;
};

enum class RankingSource { kOriginal, kReranked };

// Position 1 is items.front().
struct Ranking {
  std::vector<Candidate> items;
  RankingSource source = RankingSource::kOriginal;

  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }
  // First min(k, size()) items, same source tag.
  Ranking Prefix(std::size_t k) const;
};

// Probability mass over subgroup labels. Keys iterate in canonical label
// order, so every table built from a Distribution has stable columns.
class Distribution {
 public:
  static constexpr double kTolerance = 1e-9;

  Distribution() = default;
  // Validates non-negativity and unit total (within kTolerance).
  explicit Distribution(std::map<SubgroupLabel, double> mass);

  // Parses "A:0.5,B:0.5". Labels may contain spaces ("White Men:0.25").
  static Distribution Parse(const std::string& text);

  const std::map<SubgroupLabel, double>& mass() const { return mass_; }
  double at(const SubgroupLabel& label) const;
  bool contains(const SubgroupLabel& label) const {
    return mass_.contains(label);
  }
  std::vector<SubgroupLabel> labels() const;
  std::string ToString() const;

 private:
  std::map<SubgroupLabel, double> mass_;
};

Distribution EmpiricalDistribution(std::span<const Candidate> candidates,
                                   LabelSource which = LabelSource::kTrue);

// Non-increasing by score, ties by ascending id. Throws kDuplicateId and
// rejects non-finite scores (kInvalidScore).
Ranking SortByScore(std::vector<Candidate> candidates);

}  // namespace fairrank

template <>
struct std::hash<fairrank::SubgroupLabel> {
  std::size_t operator()(const fairrank::SubgroupLabel& label) const noexcept {
    return std::hash<std::string>{}(label.str());
  }
};

#endif  // FAIRRANK_RANKING_MODEL_H_
