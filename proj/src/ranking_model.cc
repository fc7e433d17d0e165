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

#include "fairrank/ranking_model.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>
#include <utility>

namespace fairrank {
namespace {

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

SubgroupLabel::SubgroupLabel(std::vector<std::string> parts)
    : parts_(std::move(parts)) {
  if (parts_.empty()) {
    throw Error(ErrorCode::kInvalidLabel, "subgroup label needs at least one part");
  }
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (parts_[i].empty()) {
      throw Error(ErrorCode::kInvalidLabel,
                  "empty attribute value at position " + std::to_string(i));
    }
    if (i > 0) canonical_ += ' ';
    canonical_ += parts_[i];
  }
}

SubgroupLabel::SubgroupLabel(std::string single)
    : SubgroupLabel(std::vector<std::string>{std::move(single)}) {}

SubgroupLabel SubgroupProduct(const std::vector<std::string>& attribute_values) {
  return SubgroupLabel(attribute_values);
}

const SubgroupLabel& Candidate::label(LabelSource source) const {
  if (source == LabelSource::kTrue) return true_label;
  if (!inferred_label) {
    throw Error(ErrorCode::kMissingLabel,
                "candidate '" + id + "' has no inferred label");
  }
  return *inferred_label;
}

Ranking Ranking::Prefix(std::size_t k) const {
  Ranking out;
  out.source = source;
  const std::size_t n = std::min(k, items.size());
  out.items.assign(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

Distribution::Distribution(std::map<SubgroupLabel, double> mass)
    : mass_(std::move(mass)) {
  if (mass_.empty()) {
    throw Error(ErrorCode::kInvalidDistribution, "distribution has no labels");
  }
  double total = 0.0;
  for (const auto& [label, p] : mass_) {
    if (!std::isfinite(p) || p < 0.0) {
      throw Error(ErrorCode::kInvalidDistribution,
                  "negative or non-finite mass for '" + label.str() + "'");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kTolerance) {
    std::ostringstream os;
    os.precision(12);
    os << "masses sum to " << total << ", expected 1";
    throw Error(ErrorCode::kInvalidDistribution, os.str());
  }
}

Distribution Distribution::Parse(const std::string& text) {
  std::map<SubgroupLabel, double> mass;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.rfind(':');
    if (colon == std::string::npos) {
      throw Error(ErrorCode::kInvalidDistribution,
                  "expected label:mass, got '" + item + "'");
    }
    const std::string name = Trim(item.substr(0, colon));
    const std::string value = Trim(item.substr(colon + 1));
    std::vector<std::string> parts;
    std::stringstream words(name);
    for (std::string w; words >> w;) parts.push_back(w);
    double p = 0.0;
    try {
      std::size_t used = 0;
      p = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidDistribution, "bad mass '" + value + "'");
    }
    auto [it, inserted] = mass.emplace(SubgroupLabel(parts), p);
    if (!inserted) {
      throw Error(ErrorCode::kInvalidDistribution,
                  "label '" + name + "' listed twice");
    }
  }
  return Distribution(std::move(mass));
}

double Distribution::at(const SubgroupLabel& label) const {
  const auto it = mass_.find(label);
  return it == mass_.end() ? 0.0 : it->second;
}

std::vector<SubgroupLabel> Distribution::labels() const {
  std::vector<SubgroupLabel> out;
  out.reserve(mass_.size());
  for (const auto& [label, p] : mass_) out.push_back(label);
  return out;
}

std::string Distribution::ToString() const {
  std::ostringstream os;
  os.precision(10);
  bool first = true;
  for (const auto& [label, p] : mass_) {
    if (!first) os << ',';
    first = false;
    os << label.str() << ':' << p;
  }
  return os.str();
}

Distribution EmpiricalDistribution(std::span<const Candidate> candidates,
                                   LabelSource which) {
  if (candidates.empty()) {
    throw Error(ErrorCode::kEmptyPopulation, "no candidates");
  }
  std::map<SubgroupLabel, std::size_t> counts;
  for (const Candidate& c : candidates) ++counts[c.label(which)];
  std::map<SubgroupLabel, double> mass;
  const double n = static_cast<double>(candidates.size());
  for (const auto& [label, count] : counts) {
    mass.emplace(label, static_cast<double>(count) / n);
  }
  return Distribution(std::move(mass));
}

Ranking SortByScore(std::vector<Candidate> candidates) {
  std::unordered_set<std::string> seen;
  seen.reserve(candidates.size());
  for (const Candidate& c : candidates) {
    if (!std::isfinite(c.score)) {
      throw Error(ErrorCode::kInvalidScore,
                  "candidate '" + c.id + "' has a non-finite score");
    }
    if (!seen.insert(c.id).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate candidate id '" + c.id + "'");
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.id < b.id;
            });
  return Ranking{std::move(candidates), RankingSource::kOriginal};
}

}  // namespace fairrank
