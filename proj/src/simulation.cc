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

#include "fairrank/simulation.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <utility>

#include "fairrank/detconstsort.h"
#include "fairrank/random.h"

namespace fairrank {
namespace {

constexpr std::uint64_t kPopulationStream = 1;
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kTrialStream = 0x7472'6961'6CULL;
constexpr std::uint64_t kCaseStudyStream = 0x6361'7365ULL;

// Runs fn(i) for i in [0, n) on up to `threads` workers. The first exception
// thrown by any task is rethrown after all workers stop.
template <typename Fn>
void ParallelFor(std::size_t n, std::size_t threads, Fn fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

ListMetrics Mean(const std::vector<ListMetrics>& values) {
  ListMetrics m;
  if (values.empty()) return m;
  for (const ListMetrics& v : values) {
    m.ndkl += v.ndkl;
    m.abr += v.abr;
    m.dtbr += v.dtbr;
    m.dibr += v.dibr;
    m.ndcg += v.ndcg;
    m.marc += v.marc;
  }
  const double n = static_cast<double>(values.size());
  m.ndkl /= n;
  m.abr /= n;
  m.dtbr /= n;
  m.dibr /= n;
  m.ndcg /= n;
  m.marc /= n;
  return m;
}

std::string AccuracyName(double accuracy) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", accuracy);
  std::string s(buf);
  // 0.10 -> 0.1, 1.00 -> 1.0
  while (s.size() > 3 && s.back() == '0') s.pop_back();
  return s;
}

}  // namespace

void PopulationSpec::Validate() const {
  if (groups.empty() || groups.size() != masses.size()) {
    throw Error(ErrorCode::kInvalidConfig,
                "population '" + name + "' needs one mass per group");
  }
  if (n_per_group < 1) {
    throw Error(ErrorCode::kInvalidConfig, "n_per_group must be >= 1");
  }
  target();  // validates the masses
}

Distribution PopulationSpec::target() const {
  std::map<SubgroupLabel, double> mass;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (!mass.emplace(groups[i], masses[i]).second) {
      throw Error(ErrorCode::kInvalidConfig,
                  "population '" + name + "' lists '" + groups[i].str() + "' twice");
    }
  }
  return Distribution(std::move(mass));
}

const std::vector<std::string>& BuiltinPopulationNames() {
  static const std::vector<std::string> names = {"A", "B", "C", "D", "E", "F"};
  return names;
}

PopulationSpec BuiltinPopulation(const std::string& name) {
  const SubgroupLabel white("White"), black("Black"), asian("Asian"),
      latinx("Latinx");
  PopulationSpec spec;
  spec.name = name;
  if (name == "A") {
    spec.groups = {white, black, asian};
    spec.masses = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  } else if (name == "B") {
    spec.groups = {white, black, asian};
    spec.masses = {0.2, 0.3, 0.5};
  } else if (name == "C") {
    spec.groups = {white, black, asian};
    spec.masses = {0.1, 0.3, 0.6};
  } else if (name == "D") {
    spec.groups = {white, black, asian};
    spec.masses = {0.1, 0.2, 0.7};
  } else if (name == "E") {
    spec.groups = {white, black, asian, latinx};
    spec.masses = {0.25, 0.25, 0.25, 0.25};
  } else if (name == "F") {
    spec.groups = {white, black, asian, latinx};
    spec.masses = {0.1, 0.2, 0.6, 0.1};
  } else {
    throw Error(ErrorCode::kInvalidConfig, "unknown distribution '" + name + "'");
  }
  return spec;
}

std::vector<Candidate> GeneratePopulation(const PopulationSpec& spec,
                                          std::uint64_t seed) {
  spec.Validate();
  Rng rng(seed);
  std::vector<Candidate> out;
  out.reserve(spec.groups.size() * spec.n_per_group);
  const int width = static_cast<int>(std::to_string(spec.n_per_group).size());
  for (const SubgroupLabel& group : spec.groups) {
    for (std::size_t i = 0; i < spec.n_per_group; ++i) {
      char suffix[32];
      std::snprintf(suffix, sizeof(suffix), "%0*zu", width, i);
      Candidate c;
      c.id = group.str() + "-" + suffix;
      c.score = UniformUnit(rng);
      c.true_label = group;
      out.push_back(std::move(c));
    }
  }
  return out;
}

NoiseModel NoiseModel::Accuracy(double accuracy) {
  NoiseModel m;
  m.name = AccuracyName(accuracy);
  m.accuracy = accuracy;
  return m;
}

NoiseModel NoiseModel::Matrix(std::string name, ConfusionMatrix matrix) {
  NoiseModel m;
  m.name = std::move(name);
  m.matrix = std::move(matrix);
  return m;
}

ConfusionMatrix NoiseModel::MatrixFor(const std::vector<SubgroupLabel>& labels) const {
  if (matrix) return *matrix;
  if (accuracy) return UniformAccuracyMatrix(*accuracy, labels);
  throw Error(ErrorCode::kInvalidConfig, "noise model '" + name + "' is empty");
}

ListMetrics Summarize(const MetricsRecord& r) {
  return ListMetrics{r.ndkl, r.abr, r.dtbr, r.dibr, r.ndcg, r.marc};
}

TrialResult RunTrial(const PopulationSpec& spec, const NoiseModel& noise,
                     std::size_t k, const AttentionModel& model,
                     std::uint64_t trial_seed) {
  const Distribution target = spec.target();
  const Ranking original = SortByScore(
      GeneratePopulation(spec, DeriveSeed(trial_seed, kPopulationStream)));
  if (k < 1 || k > original.size()) {
    throw Error(ErrorCode::kInvalidRank, "k must lie in 1.." +
                                             std::to_string(original.size()));
  }

  Ranking perturbed;
  perturbed.items = PerturbLabels(original.items, noise.MatrixFor(target.labels()),
                                  DeriveSeed(trial_seed, kNoiseStream));

  DetConstSortOptions options;
  options.constrain_on = LabelSource::kInferred;
  const Ranking fair = DetConstSort(perturbed, target, k, options);
  const Ranking baseline = original.Prefix(k);

  TrialResult result;
  result.baseline = EvaluateList(original, baseline, target, target, model);
  result.fair = EvaluateList(original, fair, target, target, model);
  result.baseline.seed = trial_seed;
  result.fair.seed = trial_seed;
  result.fair_feasible_true = CheckFeasibility(fair, target, k).feasible;
  return result;
}

std::uint64_t TrialSeed(std::uint64_t master_seed, std::size_t index) {
  return DeriveSeed(master_seed, kTrialStream, index);
}

SweepConfig SweepConfig::Default() {
  SweepConfig config;
  for (const std::string& name : BuiltinPopulationNames()) {
    config.specs.push_back(BuiltinPopulation(name));
  }
  std::vector<double> accuracies;
  for (int i = 1; i <= 10; ++i) accuracies.push_back(i / 10.0);
  config.conditions = AccuracyGrid(accuracies);
  return config;
}

std::vector<NoiseModel> SweepConfig::AccuracyGrid(
    const std::vector<double>& accuracies) {
  std::vector<NoiseModel> out;
  for (double a : accuracies) out.push_back(NoiseModel::Accuracy(a));
  return out;
}

void SweepConfig::Validate() const {
  if (specs.empty()) throw Error(ErrorCode::kInvalidConfig, "no distributions");
  if (conditions.empty()) throw Error(ErrorCode::kInvalidConfig, "no noise conditions");
  if (trials < 1) throw Error(ErrorCode::kInvalidConfig, "trials must be >= 1");
  attention.Validate();
  for (const PopulationSpec& spec : specs) {
    spec.Validate();
    const std::size_t total = spec.groups.size() * spec.n_per_group;
    if (k < 1 || k > total) {
      throw Error(ErrorCode::kInvalidConfig,
                  "k=" + std::to_string(k) + " outside 1.." + std::to_string(total) +
                      " for distribution " + spec.name);
    }
  }
}

ListMetrics SweepCell::MeanFair() const { return Mean(fair); }
ListMetrics SweepCell::MeanBaseline() const { return Mean(baseline); }

const SweepCell& SweepResult::cell(const std::string& spec,
                                   const std::string& condition) const {
  const auto s = std::find(spec_names.begin(), spec_names.end(), spec);
  const auto c = std::find(condition_names.begin(), condition_names.end(), condition);
  if (s == spec_names.end() || c == condition_names.end()) {
    throw Error(ErrorCode::kInvalidConfig,
                "no sweep cell " + spec + " / " + condition);
  }
  return cells[static_cast<std::size_t>(s - spec_names.begin())]
              [static_cast<std::size_t>(c - condition_names.begin())];
}

std::size_t ResolveThreads(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("FAIRRANK_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepResult Sweep(const SweepConfig& config) {
  config.Validate();
  const std::size_t n_specs = config.specs.size();
  const std::size_t n_conditions = config.conditions.size();
  const std::size_t trials = config.trials;

  SweepResult result;
  for (const PopulationSpec& s : config.specs) result.spec_names.push_back(s.name);
  for (const NoiseModel& c : config.conditions) result.condition_names.push_back(c.name);
  result.cells.assign(n_specs, std::vector<SweepCell>(n_conditions));
  for (auto& row : result.cells) {
    for (SweepCell& cell : row) {
      cell.fair.resize(trials);
      cell.baseline.resize(trials);
      cell.fair_feasible_true.resize(trials);
    }
  }

  // Task order is irrelevant to the output: each task writes its own slot.
  const std::size_t tasks = n_specs * n_conditions * trials;
  std::mutex feasible_mu;  // vector<bool> slots share words
  ParallelFor(tasks, ResolveThreads(config.threads), [&](std::size_t task) {
    const std::size_t trial = task % trials;
    const std::size_t condition = (task / trials) % n_conditions;
    const std::size_t spec = task / (trials * n_conditions);
    const TrialResult r =
        RunTrial(config.specs[spec], config.conditions[condition], config.k,
                 config.attention, TrialSeed(config.seed, trial));
    SweepCell& cell = result.cells[spec][condition];
    cell.fair[trial] = Summarize(r.fair);
    cell.baseline[trial] = Summarize(r.baseline);
    std::lock_guard<std::mutex> lock(feasible_mu);
    cell.fair_feasible_true[trial] = r.fair_feasible_true;
  });
  return result;
}

double Median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::kEmptyPopulation, "median of nothing");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                   values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower =
      *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

namespace {

struct CaseTrial {
  MetricsRecord record;
  bool feasible = false;
};

CaseStudyRow Aggregate(const std::string& name,
                       const std::vector<SubgroupLabel>& groups,
                       const std::vector<CaseTrial>& trials) {
  CaseStudyRow row;
  row.name = name;
  auto median_of = [&](auto get) {
    std::vector<double> v;
    v.reserve(trials.size());
    for (const CaseTrial& t : trials) v.push_back(get(t.record));
    return Median(std::move(v));
  };
  for (const SubgroupLabel& g : groups) {
    auto stat = [&](const MetricsRecord& r) -> const GroupStat* {
      const auto it = r.groups.find(g);
      return it == r.groups.end() ? nullptr : &it->second;
    };
    row.skew[g] = median_of([&](const MetricsRecord& r) {
      const auto it = r.skew.find(g);
      return it == r.skew.end() ? 0.0 : it->second;
    });
    row.eta[g] = median_of([&](const MetricsRecord& r) {
      const GroupStat* s = stat(r);
      return s ? s->eta : 0.0;
    });
    row.theta[g] = median_of([&](const MetricsRecord& r) {
      const GroupStat* s = stat(r);
      return s ? s->theta : 0.0;
    });
    row.gamma[g] = median_of([&](const MetricsRecord& r) {
      const GroupStat* s = stat(r);
      return s ? s->gamma : 0.0;
    });
  }
  row.ndkl = median_of([](const MetricsRecord& r) { return r.ndkl; });
  row.abr = median_of([](const MetricsRecord& r) { return r.abr; });
  row.dtbr = median_of([](const MetricsRecord& r) { return r.dtbr; });
  row.dibr = median_of([](const MetricsRecord& r) { return r.dibr; });
  row.ndcg = median_of([](const MetricsRecord& r) { return r.ndcg; });
  row.marc = median_of([](const MetricsRecord& r) { return r.marc; });
  std::size_t feasible = 0;
  for (const CaseTrial& t : trials) feasible += t.feasible ? 1 : 0;
  row.feasible_share = static_cast<double>(feasible) / static_cast<double>(trials.size());
  return row;
}

ConfusionMatrix CaseStudyMatrix(const ConfusionMatrix& race,
                                const CaseStudyConfig& config,
                                const std::set<std::string>& genders,
                                bool two_part) {
  ConfusionMatrix race_cm = race.WithAliases(config.aliases);
  if (!two_part) return race_cm;
  ConfusionMatrix gender_cm;
  if (config.gender_matrix) {
    gender_cm = config.gender_matrix->WithAliases(config.aliases);
  } else {
    std::vector<SubgroupLabel> labels;
    for (const std::string& g : genders) labels.emplace_back(g);
    gender_cm = IdentityMatrix(labels);
  }
  return ComposeMatrices(race_cm, gender_cm);
}

}  // namespace

CaseStudyResult CaseStudy(const std::vector<Candidate>& candidates,
                          const CaseStudyConfig& config) {
  if (candidates.empty()) throw Error(ErrorCode::kEmptyPopulation, "empty dataset");
  if (config.trials < 1) throw Error(ErrorCode::kInvalidConfig, "trials must be >= 1");
  config.attention.Validate();
  const Ranking original = SortByScore(candidates);
  if (config.k < 1 || config.k > original.size()) {
    throw Error(ErrorCode::kInvalidConfig,
                "k must lie in 1.." + std::to_string(original.size()));
  }

  const std::size_t parts = original.items.front().true_label.parts().size();
  std::set<std::string> genders;
  for (const Candidate& c : original.items) {
    if (c.true_label.parts().size() != parts) {
      throw Error(ErrorCode::kInvalidLabel, "candidates mix label shapes");
    }
    if (parts == 2) genders.insert(c.true_label.parts()[1]);
  }
  if (parts > 2) {
    throw Error(ErrorCode::kInvalidLabel,
                "case studies take race or race+gender labels");
  }

  CaseStudyResult result;
  result.population = EmpiricalDistribution(original.items);
  result.groups = result.population.labels();
  const Distribution& target = result.population;

  auto evaluate = [&](const Ranking& list) {
    CaseTrial t;
    t.record = EvaluateList(original, list, target, target, config.attention);
    t.feasible = CheckFeasibility(list, target, config.k).feasible;
    return t;
  };

  // Baseline and oracle involve no randomness.
  result.rows.push_back(
      Aggregate("Baseline", result.groups, {evaluate(original.Prefix(config.k))}));
  result.rows.push_back(Aggregate("Oracle", result.groups,
                                  {evaluate(DetConstSort(original, target, config.k))}));

  const std::size_t threads = ResolveThreads(config.threads);
  for (std::size_t m = 0; m < config.race_matrices.size(); ++m) {
    const auto& [name, race] = config.race_matrices[m];
    const ConfusionMatrix cm = CaseStudyMatrix(race, config, genders, parts == 2);
    std::vector<CaseTrial> trials(config.trials);
    ParallelFor(config.trials, threads, [&](std::size_t t) {
      Ranking perturbed;
      perturbed.items = PerturbLabels(original.items, cm,
                                      DeriveSeed(config.seed, kCaseStudyStream + m, t));
      DetConstSortOptions options;
      options.constrain_on = LabelSource::kInferred;
      trials[t] = evaluate(DetConstSort(perturbed, target, config.k, options));
    });
    result.rows.push_back(Aggregate(name, result.groups, trials));
  }
  return result;
}

}  // namespace fairrank
