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

// Deterministic constrained sorting (DetConstSort).
//
// Builds a top-k list in which every prefix of length j holds at least
// floor(p_g * j) members of each group g. Candidates are admitted only when a
// group's floor rises; each admitted candidate then bubbles upward past
// lower-scored predecessors as long as every displaced predecessor stays
// within the latest position its own floor allows.

#ifndef FAIRRANK_DETCONSTSORT_H_
#define FAIRRANK_DETCONSTSORT_H_

#include <cstddef>
#include <optional>

#include "fairrank/ranking_model.h"

namespace fairrank {

// floor(p * j) with a small guard so products that are integers in exact
// arithmetic (0.57 * 100) are not rounded down.
std::size_t FloorCount(double p, std::size_t j);

struct DetConstSortOptions {
  // Label the constraints are enforced on. Simulations re-rank on inferred
  // labels and evaluate on true ones.
  LabelSource constrain_on = LabelSource::kTrue;
  // When false, admitted candidates stay where they land. Only useful as a
  // baseline for measuring what the swap phase buys.
  bool swap_phase = true;
};

// `original` must be in score order (as produced by SortByScore). Throws
// kInsufficientCandidates when some group with positive target mass has
// fewer than ceil(p_g * k) candidates, naming the group.
Ranking DetConstSort(const Ranking& original, const Distribution& target,
                     std::size_t k, const DetConstSortOptions& options = {});

struct FeasibilityReport {
  bool feasible = true;
  // First violation, scanning prefixes in order then groups in label order.
  std::size_t position = 0;
  std::optional<SubgroupLabel> group;
};

// True iff count_g(top j) >= floor(p_g * j) for every g and every j <= k.
FeasibilityReport CheckFeasibility(const Ranking& ranking,
                                   const Distribution& target, std::size_t k,
                                   LabelSource which = LabelSource::kTrue);

}  // namespace fairrank

#endif  // FAIRRANK_DETCONSTSORT_H_
