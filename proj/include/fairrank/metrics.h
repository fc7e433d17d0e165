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

// Representation, attention and ranking-quality metrics for ranked lists.
//
// Positions are 1-based throughout. All logarithms in divergences and
// position discounts are base 2.

#ifndef FAIRRANK_METRICS_H_
#define FAIRRANK_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fairrank/ranking_model.h"

namespace fairrank {

enum class AttentionKind { kGeometric, kLogarithmic };

struct AttentionModel {
  AttentionKind kind = AttentionKind::kGeometric;
  // Share of attention received by the first position (geometric model).
  double p = 0.015;
  // Horizon used for attention curves and partial sums.
  int k_max = 300;

  void Validate() const;
};

// Attention at 1-based rank k.
//   geometric:   100 (1-p)^(k-1) p
//   logarithmic: 100 p / log2(k+1), i.e. matched to the geometric value at
//                k = 1. Comparison output only.
double Attention(const AttentionModel& model, int k);

// Attention for ranks 1..n.
std::vector<double> AttentionVector(const AttentionModel& model, std::size_t n);

// p_{top-k,g} / p_{population,g}.
double SkewAtK(const Ranking& ranking, const Distribution& population,
               const SubgroupLabel& group, std::size_t k,
               LabelSource which = LabelSource::kTrue);

// Position-discounted mean of KL(prefix distribution || target) over every
// prefix of the ranking; 0 log 0 is taken as 0.
double Ndkl(const Ranking& ranking, const Distribution& target,
            LabelSource which = LabelSource::kTrue);

struct GroupStat {
  std::size_t count = 0;
  double eta = 0.0;      // mean attention per member
  double u_mean = 0.0;   // mean utility per member
  double theta = 0.0;    // utility-weighted mean attention
  double gamma = 0.0;    // expected actions per member (attention/100 x utility)
  bool theta_undefined = false;  // all member scores were zero
};

// Per-group statistics for members present in the ranking, keyed in
// canonical label order.
using GroupStats = std::map<SubgroupLabel, GroupStat>;

GroupStats GroupAttentionStats(const Ranking& ranking,
                               const AttentionModel& model,
                               LabelSource which = LabelSource::kTrue);

// Same, with explicit per-position attention values (attention[i] is the
// attention of position i+1). attention.size() must be >= ranking.size().
GroupStats GroupAttentionStats(const Ranking& ranking,
                               std::span<const double> attention,
                               LabelSource which = LabelSource::kTrue);

// min/max ratios of eta, theta and gamma across groups.
double Abr(const GroupStats& stats);
double Dtbr(const GroupStats& stats);
double Dibr(const GroupStats& stats);

// sum s_i / log2(i+1), normalised by sum 1 / log2(i+1). This is not the
// ideal-DCG normalisation: a list whose scores are all below 1 scores below 1.
double Ndcg(const Ranking& ranking);

struct RankChange {
  // Original rank minus new rank, in reranked order. Positive = moved up.
  std::vector<std::pair<std::string, long>> boosts;
  std::map<SubgroupLabel, double> arc;
  double marc = 0.0;
};

RankChange RankChangeMetrics(const Ranking& original, const Ranking& reranked,
                             LabelSource which = LabelSource::kTrue);

// One evaluated list.
struct MetricsRecord {
  double ndkl = 0.0;
  double abr = 0.0;
  double dtbr = 0.0;
  double dibr = 0.0;
  double ndcg = 0.0;
  double marc = 0.0;
  GroupStats groups;
  std::map<SubgroupLabel, double> skew;  // skew@k against the population
  std::size_t k = 0;
  std::uint64_t seed = 0;
};

// Evaluates `list` (of length k) against `target` for NDKL and against
// `population` for skew; MARC is measured relative to `original`.
MetricsRecord EvaluateList(const Ranking& original, const Ranking& list,
                           const Distribution& target,
                           const Distribution& population,
                           const AttentionModel& model,
                           LabelSource which = LabelSource::kTrue);

}  // namespace fairrank

#endif  // FAIRRANK_METRICS_H_
