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

#include "fairrank/detconstsort.h"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <utility>
#include <vector>

namespace fairrank {
namespace {

constexpr double kFloorGuard = 1e-9;

struct GroupQueue {
  SubgroupLabel label;
  double p = 0.0;
  // Indices into the original ranking, best score first.
  std::vector<std::size_t> members;
  std::size_t next = 0;
  std::size_t min_count = 0;

  bool exhausted() const { return next >= members.size(); }
};

struct Slot {
  std::size_t candidate;  // index into the original ranking
  double score;
  std::size_t max_index;  // latest 1-based position this occupant may hold
};

}  // namespace

std::size_t FloorCount(double p, std::size_t j) {
  return static_cast<std::size_t>(
      std::floor(p * static_cast<double>(j) + kFloorGuard));
}

Ranking DetConstSort(const Ranking& original, const Distribution& target,
                     std::size_t k, const DetConstSortOptions& options) {
  if (k < 1) throw Error(ErrorCode::kInvalidRank, "k must be >= 1");

  // Queues in canonical label order; that order breaks score ties below.
  std::vector<GroupQueue> queues;
  std::unordered_map<SubgroupLabel, std::size_t> queue_of;
  for (const auto& [label, p] : target.mass()) {
    if (p <= 0.0) continue;
    queue_of.emplace(label, queues.size());
    queues.push_back(GroupQueue{label, p, {}, 0, 0});
  }
  for (std::size_t i = 0; i < original.size(); ++i) {
    const auto it = queue_of.find(original.items[i].label(options.constrain_on));
    if (it != queue_of.end()) queues[it->second].members.push_back(i);
  }
  for (const GroupQueue& q : queues) {
    const auto need = static_cast<std::size_t>(
        std::ceil(q.p * static_cast<double>(k) - kFloorGuard));
    if (q.members.size() < need) {
      throw Error(ErrorCode::kInsufficientCandidates,
                  "group '" + q.label.str() + "' has " +
                      std::to_string(q.members.size()) + " candidates, needs " +
                      std::to_string(need) + " for k=" + std::to_string(k));
    }
  }
  for (GroupQueue& q : queues) {
    std::stable_sort(q.members.begin(), q.members.end(),
                     [&](std::size_t a, std::size_t b) {
                       return original.items[a].score > original.items[b].score;
                     });
  }

  std::vector<Slot> slots;
  slots.reserve(k + queues.size());
  std::vector<std::size_t> rising;
  // Each step admits at least one candidate once the floors of the
  // remaining groups catch up; the bound only guards against a logic error.
  const std::size_t step_limit = 4 * k * (queues.size() + 1) + 16;
  for (std::size_t step = 1; slots.size() < k; ++step) {
    if (step > step_limit) {
      throw Error(ErrorCode::kInsufficientCandidates,
                  "ran out of candidates before filling k=" + std::to_string(k));
    }
    rising.clear();
    for (std::size_t g = 0; g < queues.size(); ++g) {
      GroupQueue& q = queues[g];
      const std::size_t floor_now = FloorCount(q.p, step);
      if (floor_now > q.min_count && !q.exhausted()) rising.push_back(g);
      q.min_count = std::max(q.min_count, floor_now);
    }
    std::stable_sort(rising.begin(), rising.end(),
                     [&](std::size_t a, std::size_t b) {
                       const double sa =
                           original.items[queues[a].members[queues[a].next]].score;
                       const double sb =
                           original.items[queues[b].members[queues[b].next]].score;
                       return sa > sb;
                     });
    for (const std::size_t g : rising) {
      GroupQueue& q = queues[g];
      const std::size_t candidate = q.members[q.next++];
      slots.push_back(Slot{candidate, original.items[candidate].score, step});
      if (!options.swap_phase) continue;
      // Slot index `at` is position at+1; the predecessor at position `at`
      // would move to position at+1.
      for (std::size_t at = slots.size() - 1;
           at > 0 && slots[at - 1].max_index >= at + 1 &&
           slots[at - 1].score < slots[at].score;
           --at) {
        std::swap(slots[at - 1], slots[at]);
      }
    }
  }

  Ranking out;
  out.source = RankingSource::kReranked;
  out.items.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    out.items.push_back(original.items[slots[i].candidate]);
  }
  return out;
}

FeasibilityReport CheckFeasibility(const Ranking& ranking,
                                   const Distribution& target, std::size_t k,
                                   LabelSource which) {
  const std::vector<SubgroupLabel> labels = target.labels();
  std::unordered_map<SubgroupLabel, std::size_t> index;
  for (std::size_t g = 0; g < labels.size(); ++g) index.emplace(labels[g], g);
  std::vector<std::size_t> counts(labels.size(), 0);
  const std::size_t limit = std::min(k, ranking.size());
  for (std::size_t j = 1; j <= k; ++j) {
    if (j <= limit) {
      const auto it = index.find(ranking.items[j - 1].label(which));
      if (it != index.end()) ++counts[it->second];
    }
    for (std::size_t g = 0; g < labels.size(); ++g) {
      if (counts[g] < FloorCount(target.at(labels[g]), j)) {
        return FeasibilityReport{false, j, labels[g]};
      }
    }
  }
  return FeasibilityReport{};
}

}  // namespace fairrank
