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

#include "fairrank/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <unordered_map>

namespace fairrank {
namespace {

double Discount(std::size_t position) {
  return 1.0 / std::log2(static_cast<double>(position) + 1.0);
}

double MinMaxRatio(const GroupStats& stats, double GroupStat::*field,
                   const char* name) {
  if (stats.empty()) {
    throw Error(ErrorCode::kDegenerateRatio,
                std::string(name) + " needs at least one group");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& [label, stat] : stats) {
    lo = std::min(lo, stat.*field);
    hi = std::max(hi, stat.*field);
  }
  if (!(hi > 0.0)) {
    throw Error(ErrorCode::kDegenerateRatio,
                std::string(name) + ": largest group statistic is zero");
  }
  return lo / hi;
}

}  // namespace

void AttentionModel::Validate() const {
  if (kind == AttentionKind::kGeometric && !(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "attention p must lie in (0, 1)");
  }
  if (kind == AttentionKind::kLogarithmic && !(p > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "attention p must be positive");
  }
  if (k_max < 1) {
    throw Error(ErrorCode::kInvalidConfig, "attention horizon must be >= 1");
  }
}

double Attention(const AttentionModel& model, int k) {
  if (k < 1) {
    throw Error(ErrorCode::kInvalidRank,
                "attention rank must be >= 1, got " + std::to_string(k));
  }
  switch (model.kind) {
    case AttentionKind::kGeometric:
      return 100.0 * std::pow(1.0 - model.p, k - 1) * model.p;
    case AttentionKind::kLogarithmic:
      return 100.0 * model.p * Discount(static_cast<std::size_t>(k));
  }
  return 0.0;
}

std::vector<double> AttentionVector(const AttentionModel& model, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = Attention(model, static_cast<int>(i + 1));
  }
  return out;
}

double SkewAtK(const Ranking& ranking, const Distribution& population,
               const SubgroupLabel& group, std::size_t k, LabelSource which) {
  if (k < 1 || k > ranking.size()) {
    throw Error(ErrorCode::kInvalidRank,
                "skew rank " + std::to_string(k) + " outside 1.." +
                    std::to_string(ranking.size()));
  }
  const double base = population.at(group);
  if (!(base > 0.0)) {
    throw Error(ErrorCode::kZeroBaseProportion,
                "group '" + group.str() + "' has no population mass");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (ranking.items[i].label(which) == group) ++hits;
  }
  return (static_cast<double>(hits) / static_cast<double>(k)) / base;
}

double Ndkl(const Ranking& ranking, const Distribution& target,
            LabelSource which) {
  if (ranking.empty()) {
    throw Error(ErrorCode::kEmptyPopulation, "NDKL of an empty ranking");
  }
  std::vector<double> target_mass;
  std::unordered_map<SubgroupLabel, std::size_t> index;
  for (const auto& [label, p] : target.mass()) {
    index.emplace(label, target_mass.size());
    target_mass.push_back(p);
  }
  std::vector<std::size_t> slot(ranking.size());
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    const SubgroupLabel& label = ranking.items[i].label(which);
    const auto it = index.find(label);
    if (it == index.end() || !(target_mass[it->second] > 0.0)) {
      throw Error(ErrorCode::kZeroBaseProportion,
                  "label '" + label.str() + "' has no target mass");
    }
    slot[i] = it->second;
  }

  std::vector<std::size_t> counts(target_mass.size(), 0);
  double weighted = 0.0;
  double z = 0.0;
  for (std::size_t i = 0; i < slot.size(); ++i) {
    ++counts[slot[i]];
    const double n = static_cast<double>(i + 1);
    double kl = 0.0;
    for (std::size_t j = 0; j < counts.size(); ++j) {
      if (counts[j] == 0) continue;
      const double q = static_cast<double>(counts[j]) / n;
      kl += q * std::log2(q / target_mass[j]);
    }
    const double w = Discount(i + 1);
    weighted += w * kl;
    z += w;
  }
  // Rounding can leave a prefix equal to the target a hair below zero.
  return std::max(0.0, weighted / z);
}

GroupStats GroupAttentionStats(const Ranking& ranking,
                               const AttentionModel& model, LabelSource which) {
  model.Validate();
  const std::vector<double> attention = AttentionVector(model, ranking.size());
  return GroupAttentionStats(ranking, attention, which);
}

GroupStats GroupAttentionStats(const Ranking& ranking,
                               std::span<const double> attention,
                               LabelSource which) {
  if (ranking.empty()) {
    throw Error(ErrorCode::kEmptyPopulation, "attention stats of an empty ranking");
  }
  if (attention.size() < ranking.size()) {
    throw Error(ErrorCode::kInvalidRank, "attention vector shorter than ranking");
  }
  struct Sums {
    std::size_t n = 0;
    double attention = 0.0;
    double score = 0.0;
    double weighted = 0.0;
  };
  std::map<SubgroupLabel, Sums> sums;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    const Candidate& c = ranking.items[i];
    Sums& s = sums[c.label(which)];
    ++s.n;
    s.attention += attention[i];
    s.score += c.score;
    s.weighted += attention[i] * c.score;
  }
  GroupStats stats;
  for (const auto& [label, s] : sums) {
    const double n = static_cast<double>(s.n);
    GroupStat g;
    g.count = s.n;
    g.eta = s.attention / n;
    g.u_mean = s.score / n;
    if (s.score != 0.0) {
      g.theta = s.weighted / s.score;
    } else {
      g.theta = 0.0;
      g.theta_undefined = true;
    }
    g.gamma = s.weighted / (100.0 * n);
    stats.emplace(label, g);
  }
  return stats;
}

double Abr(const GroupStats& stats) {
  return MinMaxRatio(stats, &GroupStat::eta, "ABR");
}

double Dtbr(const GroupStats& stats) {
  return MinMaxRatio(stats, &GroupStat::theta, "DTBR");
}

double Dibr(const GroupStats& stats) {
  return MinMaxRatio(stats, &GroupStat::gamma, "DIBR");
}

double Ndcg(const Ranking& ranking) {
  if (ranking.empty()) {
    throw Error(ErrorCode::kEmptyPopulation, "NDCG of an empty ranking");
  }
  double gain = 0.0;
  double z = 0.0;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    const double w = Discount(i + 1);
    gain += ranking.items[i].score * w;
    z += w;
  }
  return gain / z;
}

RankChange RankChangeMetrics(const Ranking& original, const Ranking& reranked,
                             LabelSource which) {
  std::unordered_map<std::string, long> original_rank;
  original_rank.reserve(original.size());
  for (std::size_t i = 0; i < original.size(); ++i) {
    original_rank.emplace(original.items[i].id, static_cast<long>(i + 1));
  }
  RankChange out;
  out.boosts.reserve(reranked.size());
  std::map<SubgroupLabel, std::pair<double, std::size_t>> totals;
  for (std::size_t i = 0; i < reranked.size(); ++i) {
    const Candidate& c = reranked.items[i];
    const auto it = original_rank.find(c.id);
    if (it == original_rank.end()) {
      throw Error(ErrorCode::kUnknownCandidate,
                  "candidate '" + c.id + "' is not in the original ranking");
    }
    const long boost = it->second - static_cast<long>(i + 1);
    out.boosts.emplace_back(c.id, boost);
    auto& [sum, n] = totals[c.label(which)];
    sum += static_cast<double>(std::labs(boost));
    ++n;
  }
  for (const auto& [label, t] : totals) {
    const double arc = t.first / static_cast<double>(t.second);
    out.arc.emplace(label, arc);
    out.marc = std::max(out.marc, arc);
  }
  return out;
}

MetricsRecord EvaluateList(const Ranking& original, const Ranking& list,
                           const Distribution& target,
                           const Distribution& population,
                           const AttentionModel& model, LabelSource which) {
  MetricsRecord r;
  r.k = list.size();
  r.ndkl = Ndkl(list, target, which);
  r.groups = GroupAttentionStats(list, model, which);
  r.abr = Abr(r.groups);
  r.dtbr = Dtbr(r.groups);
  r.dibr = Dibr(r.groups);
  r.ndcg = Ndcg(list);
  r.marc = RankChangeMetrics(original, list, which).marc;
  for (const auto& [label, p] : population.mass()) {
    if (p > 0.0) r.skew.emplace(label, SkewAtK(list, population, label, r.k, which));
  }
  return r;
}

}  // namespace fairrank
