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

// Monte Carlo harness: synthetic accuracy sweeps and the dataset case-study
// protocol.
//
// Every trial draws its randomness from DeriveSeed(master_seed, ..., trial),
// so results depend only on the master seed and never on how trials are
// scheduled across worker threads.

#ifndef FAIRRANK_SIMULATION_H_
#define FAIRRANK_SIMULATION_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fairrank/inference_noise.h"
#include "fairrank/metrics.h"
#include "fairrank/ranking_model.h"

namespace fairrank {

struct PopulationSpec {
  std::string name;
  std::vector<SubgroupLabel> groups;
  std::vector<double> masses;  // target share per group, same order
  std::size_t n_per_group = 1000;

  void Validate() const;
  Distribution target() const;
};

// Names "A".."F". Groups are White, Black, Asian and (E, F) Latinx.
PopulationSpec BuiltinPopulation(const std::string& name);
const std::vector<std::string>& BuiltinPopulationNames();

// Each group gets n_per_group candidates with i.i.d. uniform [0, 1) scores.
std::vector<Candidate> GeneratePopulation(const PopulationSpec& spec,
                                          std::uint64_t seed);

// Either a uniform-accuracy matrix over the population's own labels or a
// fixed confusion matrix.
struct NoiseModel {
  std::string name;
  std::optional<double> accuracy;
  std::optional<ConfusionMatrix> matrix;

  static NoiseModel Accuracy(double accuracy);
  static NoiseModel Matrix(std::string name, ConfusionMatrix matrix);
  ConfusionMatrix MatrixFor(const std::vector<SubgroupLabel>& labels) const;
};

// Scalar summary of one evaluated list.
struct ListMetrics {
  double ndkl = 0.0;
  double abr = 0.0;
  double dtbr = 0.0;
  double dibr = 0.0;
  double ndcg = 0.0;
  double marc = 0.0;
};

ListMetrics Summarize(const MetricsRecord& record);

struct TrialResult {
  MetricsRecord baseline;  // unfair score-sorted top-k
  MetricsRecord fair;      // re-ranked on inferred labels, scored on true ones
  bool fair_feasible_true = false;
};

TrialResult RunTrial(const PopulationSpec& spec, const NoiseModel& noise,
                     std::size_t k, const AttentionModel& model,
                     std::uint64_t trial_seed);

// Seed of trial `index` under `master_seed`.
std::uint64_t TrialSeed(std::uint64_t master_seed, std::size_t index);

struct SweepConfig {
  std::vector<PopulationSpec> specs;
  std::vector<NoiseModel> conditions;
  std::size_t trials = 100;
  std::size_t k = 300;
  AttentionModel attention;
  std::uint64_t seed = 42;
  // 0 = FAIRRANK_THREADS or hardware concurrency.
  std::size_t threads = 0;

  // A-E plus F, accuracies 0.1..1.0.
  static SweepConfig Default();
  static std::vector<NoiseModel> AccuracyGrid(const std::vector<double>& accuracies);
  void Validate() const;
};

struct SweepCell {
  std::vector<ListMetrics> fair;      // per trial, in trial order
  std::vector<ListMetrics> baseline;  // per trial
  std::vector<bool> fair_feasible_true;

  ListMetrics MeanFair() const;
  ListMetrics MeanBaseline() const;
};

struct SweepResult {
  std::vector<std::string> spec_names;
  std::vector<std::string> condition_names;
  // cells[spec][condition]
  std::vector<std::vector<SweepCell>> cells;

  const SweepCell& cell(const std::string& spec, const std::string& condition) const;
};

SweepResult Sweep(const SweepConfig& config);

// Worker count: explicit request, else FAIRRANK_THREADS, else hardware.
std::size_t ResolveThreads(std::size_t requested);

struct CaseStudyConfig {
  std::size_t k = 300;
  std::size_t trials = 100;
  std::uint64_t seed = 42;
  AttentionModel attention;
  // Named race matrices; one re-ranked row each.
  std::vector<std::pair<std::string, ConfusionMatrix>> race_matrices;
  // Applied to the second label part. Without it gender is left untouched.
  std::optional<ConfusionMatrix> gender_matrix;
  // Matrix label part -> dataset spelling, e.g. Latinx -> Hispanic.
  std::map<std::string, std::string> aliases;
  std::size_t threads = 0;
};

struct CaseStudyRow {
  std::string name;
  // Medians over trials. Groups absent from a list contribute 0.
  std::map<SubgroupLabel, double> skew;
  std::map<SubgroupLabel, double> eta;
  std::map<SubgroupLabel, double> theta;
  std::map<SubgroupLabel, double> gamma;
  double ndkl = 0.0;
  double abr = 0.0;
  double dtbr = 0.0;
  double dibr = 0.0;
  double ndcg = 0.0;
  double marc = 0.0;
  // Share of trials whose list met every prefix floor on true labels.
  double feasible_share = 0.0;
};

struct CaseStudyResult {
  std::vector<SubgroupLabel> groups;  // population labels, canonical order
  Distribution population;
  std::vector<CaseStudyRow> rows;     // Baseline, Oracle, then one per matrix
};

// `candidates` carry true labels whose first part is race and optional
// second part is gender. Target and skew base are the dataset's own true
// label distribution.
CaseStudyResult CaseStudy(const std::vector<Candidate>& candidates,
                          const CaseStudyConfig& config);

// Median of a non-empty sample (mean of the middle pair for even sizes).
double Median(std::vector<double> values);

}  // namespace fairrank

#endif  // FAIRRANK_SIMULATION_H_
