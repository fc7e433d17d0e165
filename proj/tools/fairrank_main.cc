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

// fairrank: command-line driver.
//
//   fairrank simulate  [--config f.json] [--dist A,B] [--accuracies 0.1,1.0] ...
//   fairrank rerank    --input c.csv --target "X:0.5,Y:0.5" --k 10 ...
//   fairrank casestudy --input c.csv --attributes race,gender ...
//   fairrank attention [--p 0.015] [--k 300]
//   fairrank matrix    --name bisg
//
// Flags given on the command line override values from --config.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairrank/datasets.h"
#include "fairrank/detconstsort.h"
#include "fairrank/inference_noise.h"
#include "fairrank/metrics.h"
#include "fairrank/simulation.h"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace fairrank {
namespace {

// Options shared by several subcommands. Each optional stays unset unless
// given, so config values survive when a flag is absent.
struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> k;
  std::optional<double> p;
  std::vector<std::string> dists;
  std::vector<double> accuracies;
  std::vector<std::string> matrices;
  std::optional<std::string> input;
  std::optional<std::string> target;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::vector<std::string> attributes;
  std::vector<std::string> aliases;
  std::optional<std::string> gender_matrix;
  std::optional<std::size_t> n_per_group;
  std::optional<std::size_t> threads;
  bool use_inferred = false;
  bool logarithmic = false;
  std::string matrix_name;
};

json LoadConfig(const std::string& path) {
  if (path.empty()) return json::object();
  try {
    json j = json::parse(ReadTextFile(path));
    if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, path + ": not a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, path + ": " + e.what());
  }
}

template <typename T>
T Pick(const std::optional<T>& flag, const json& config, const char* key,
       T fallback) {
  if (flag) return *flag;
  if (config.contains(key)) {
    try {
      return config.at(key).get<T>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kInvalidConfig, std::string("config key '") + key +
                                                 "': " + e.what());
    }
  }
  return fallback;
}

template <typename T>
std::vector<T> PickList(const std::vector<T>& flag, const json& config,
                        const char* key, std::vector<T> fallback) {
  if (!flag.empty()) return flag;
  return Pick<std::vector<T>>(std::nullopt, config, key, std::move(fallback));
}

AttentionModel PickAttention(const Flags& f, const json& config) {
  AttentionModel model;
  model.p = Pick(f.p, config, "p", model.p);
  const std::string kind =
      f.logarithmic ? "logarithmic" : Pick<std::string>(std::nullopt, config, "attention", "geometric");
  if (kind == "logarithmic") {
    model.kind = AttentionKind::kLogarithmic;
  } else if (kind != "geometric") {
    throw Error(ErrorCode::kInvalidConfig, "unknown attention model '" + kind + "'");
  }
  model.k_max = static_cast<int>(Pick(f.k, config, "k", std::size_t{300}));
  model.Validate();
  return model;
}

std::map<std::string, std::string> ParseAliases(const std::vector<std::string>& items) {
  std::map<std::string, std::string> out;
  for (const std::string& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
      throw Error(ErrorCode::kInvalidConfig, "alias '" + item + "' is not FROM=TO");
    }
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

// A distribution argument is a built-in name or "name=Label:mass,...".
PopulationSpec ParsePopulation(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos) return BuiltinPopulation(arg);
  PopulationSpec spec;
  spec.name = arg.substr(0, eq);
  const Distribution d = Distribution::Parse(arg.substr(eq + 1));
  for (const auto& [label, mass] : d.mass()) {
    spec.groups.push_back(label);
    spec.masses.push_back(mass);
  }
  return spec;
}

struct Output {
  std::optional<std::string> dir;
  bool csv = true;
  bool md = false;

  void Emit(const MetricTable& table, const std::string& stem) const {
    if (!dir) {
      std::cout << FormatTableMarkdown(table) << "\n";
      return;
    }
    if (csv) WriteTableCsv(table, (fs::path(*dir) / (stem + ".csv")).string());
    if (md) WriteTableMarkdown(table, (fs::path(*dir) / (stem + ".md")).string());
  }
};

Output PickOutput(const Flags& f, const json& config) {
  Output out;
  if (f.out) {
    out.dir = f.out;
  } else if (config.contains("out")) {
    out.dir = config.at("out").get<std::string>();
  }
  const std::string format = Pick<std::string>(f.format, config, "format", "csv");
  if (format == "csv") {
    out.csv = true;
  } else if (format == "md") {
    out.csv = false;
    out.md = true;
  } else if (format == "both") {
    out.md = true;
  } else {
    throw Error(ErrorCode::kInvalidConfig, "format must be csv, md or both");
  }
  if (out.dir) {
    std::error_code ec;
    fs::create_directories(*out.dir, ec);
    if (ec) throw Error(ErrorCode::kIoError, "cannot create " + *out.dir + ": " + ec.message());
  }
  return out;
}

std::string Lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

int RunSimulate(const Flags& f) {
  const json config = LoadConfig(f.config);
  SweepConfig sweep;
  sweep.seed = Pick(f.seed, config, "seed", sweep.seed);
  sweep.trials = Pick(f.trials, config, "trials", sweep.trials);
  sweep.k = Pick(f.k, config, "k", sweep.k);
  sweep.threads = Pick(f.threads, config, "threads", std::size_t{0});
  sweep.attention = PickAttention(f, config);
  const std::size_t n_per_group = Pick(f.n_per_group, config, "n_per_group", std::size_t{1000});

  const std::vector<std::string> dists = PickList<std::string>(
      f.dists, config, "distributions", BuiltinPopulationNames());
  for (const std::string& d : dists) {
    PopulationSpec spec = ParsePopulation(d);
    spec.n_per_group = n_per_group;
    sweep.specs.push_back(std::move(spec));
  }
  std::vector<double> grid;
  for (int i = 1; i <= 10; ++i) grid.push_back(i / 10.0);
  const std::vector<std::string> matrices =
      PickList<std::string>(f.matrices, config, "matrices", {});
  // Matrices replace the accuracy grid unless accuracies are also given.
  const bool want_accuracies =
      !f.accuracies.empty() || config.contains("accuracies") || matrices.empty();
  if (want_accuracies) {
    sweep.conditions = SweepConfig::AccuracyGrid(PickList(f.accuracies, config, "accuracies", grid));
  }
  for (const std::string& m : matrices) {
    sweep.conditions.push_back(NoiseModel::Matrix(fs::path(m).stem().string(), ResolveMatrix(m)));
  }

  const Output out = PickOutput(f, config);
  const SweepResult result = Sweep(sweep);
  for (const std::string& metric : SweepMetricNames()) {
    out.Emit(SweepTable(result, metric, true), Lower(metric));
  }
  for (const std::string& metric : SweepMetricNames()) {
    out.Emit(SweepTable(result, metric, false), "baseline_" + Lower(metric));
  }
  if (out.dir) WriteTextFile((fs::path(*out.dir) / "plot.csv").string(), FormatPlotCsv(result));
  return 0;
}

void PrintSummary(const char* name, const MetricsRecord& r) {
  std::printf("%-9s NDKL=%.6f ABR=%.6f DTBR=%.6f DIBR=%.6f NDCG=%.6f MARC=%.6f\n",
              name, r.ndkl, r.abr, r.dtbr, r.dibr, r.ndcg, r.marc);
}

int RunRerank(const Flags& f) {
  const json config = LoadConfig(f.config);
  const std::string input = Pick(f.input, config, "input", std::string());
  if (input.empty()) throw Error(ErrorCode::kInvalidConfig, "--input is required");
  const std::vector<std::string> attributes =
      PickList<std::string>(f.attributes, config, "attributes", {"race"});
  const CandidateSet set = LoadCandidatesCsv(input, attributes);
  if (set.normalized) std::cerr << "note: scores min-max normalized to [0, 1]\n";
  const Ranking original{set.candidates, RankingSource::kOriginal};

  const std::string target_text = Pick(f.target, config, "target", std::string("empirical"));
  const Distribution target = target_text == "empirical"
                                  ? EmpiricalDistribution(original.items)
                                  : Distribution::Parse(target_text);
  const std::size_t k = Pick(f.k, config, "k", std::min<std::size_t>(300, original.size()));
  AttentionModel model = PickAttention(f, config);
  model.k_max = static_cast<int>(k);

  DetConstSortOptions options;
  const bool use_inferred = f.use_inferred || Pick<bool>(std::nullopt, config, "use_inferred", false);
  if (use_inferred) {
    if (!set.has_inferred) {
      throw Error(ErrorCode::kMissingLabel, "--use-inferred needs inferred_ columns");
    }
    options.constrain_on = LabelSource::kInferred;
  }
  const Ranking fair = DetConstSort(original, target, k, options);
  const Ranking baseline = original.Prefix(k);
  const Distribution population = EmpiricalDistribution(original.items);
  const MetricsRecord before = EvaluateList(original, baseline, target, population, model);
  const MetricsRecord after = EvaluateList(original, fair, target, population, model);
  PrintSummary("baseline", before);
  PrintSummary("reranked", after);

  // Re-ranked top-k with each candidate's original rank and boost.
  std::vector<std::string> header = {"rank", "id", "score"};
  header.insert(header.end(), attributes.begin(), attributes.end());
  header.insert(header.end(), {"original_rank", "rank_boost"});
  std::string csv = CsvLine(header);
  const RankChange change = RankChangeMetrics(original, fair);
  for (std::size_t i = 0; i < fair.size(); ++i) {
    const Candidate& c = fair.items[i];
    char score[64];
    std::snprintf(score, sizeof(score), "%.17g", c.score);
    std::vector<std::string> row = {std::to_string(i + 1), c.id, score};
    row.insert(row.end(), c.true_label.parts().begin(), c.true_label.parts().end());
    const long boost = change.boosts[i].second;
    row.push_back(std::to_string(static_cast<long>(i + 1) + boost));
    row.push_back(std::to_string(boost));
    csv += CsvLine(row);
  }
  const std::optional<std::string> out =
      f.out ? f.out
            : (config.contains("out") ? std::optional(config.at("out").get<std::string>())
                                      : std::nullopt);
  if (out) {
    WriteTextFile(*out, csv);
  } else {
    std::cout << csv;
  }
  return 0;
}

int RunCaseStudy(const Flags& f) {
  const json config = LoadConfig(f.config);
  const std::string input = Pick(f.input, config, "input", std::string());
  if (input.empty()) throw Error(ErrorCode::kInvalidConfig, "--input is required");
  const std::vector<std::string> attributes =
      PickList<std::string>(f.attributes, config, "attributes", {"race"});
  const CandidateSet set = LoadCandidatesCsv(input, attributes);
  if (set.normalized) std::cerr << "note: scores min-max normalized to [0, 1]\n";

  CaseStudyConfig cs;
  cs.seed = Pick(f.seed, config, "seed", cs.seed);
  cs.trials = Pick(f.trials, config, "trials", cs.trials);
  cs.k = Pick(f.k, config, "k", std::min<std::size_t>(cs.k, set.candidates.size()));
  cs.threads = Pick(f.threads, config, "threads", std::size_t{0});
  cs.attention = PickAttention(f, config);
  cs.attention.k_max = static_cast<int>(cs.k);
  for (const std::string& m :
       PickList<std::string>(f.matrices, config, "matrices", BuiltinMatrixNames())) {
    cs.race_matrices.emplace_back(fs::path(m).stem().string(), ResolveMatrix(m));
  }
  const std::string gender = Pick(f.gender_matrix, config, "gender_matrix", std::string());
  if (!gender.empty()) cs.gender_matrix = ResolveMatrix(gender);
  cs.aliases = ParseAliases(PickList<std::string>(f.aliases, config, "aliases", {}));

  const Output out = PickOutput(f, config);
  const CaseStudyResult result = CaseStudy(set.candidates, cs);
  for (TableKind kind : {TableKind::kSkew, TableKind::kAttention, TableKind::kTreatment,
                         TableKind::kImpact}) {
    out.Emit(CaseStudyTable(result, kind), TableKindName(kind));
  }
  out.Emit(CaseStudySummaryTable(result), "summary");
  return 0;
}

int RunAttention(const Flags& f) {
  const json config = LoadConfig(f.config);
  const AttentionModel model = PickAttention(f, config);
  const std::vector<double> a = AttentionVector(model, static_cast<std::size_t>(model.k_max));
  std::string csv = CsvLine({"rank", "attention", "cumulative"});
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    total += a[i];
    char at[32], cum[32];
    std::snprintf(at, sizeof(at), "%.6f", a[i]);
    std::snprintf(cum, sizeof(cum), "%.6f", total);
    csv += CsvLine({std::to_string(i + 1), at, cum});
  }
  if (f.out) {
    WriteTextFile(*f.out, csv);
  } else {
    std::cout << csv;
  }
  return 0;
}

int RunMatrix(const Flags& f) {
  if (f.matrix_name.empty()) {
    for (const std::string& name : BuiltinMatrixNames()) std::cout << name << "\n";
    return 0;
  }
  const std::string text = ResolveMatrix(f.matrix_name).ToJson();
  if (f.out) {
    WriteTextFile(*f.out, text);
  } else {
    std::cout << text << "\n";
  }
  return 0;
}

template <typename T>
void AddOptional(CLI::App* app, const std::string& name, std::optional<T>& slot,
                 const std::string& help) {
  app->add_option_function<T>(name, [&slot](const T& v) { slot = v; }, help);
}

}  // namespace
}  // namespace fairrank

int main(int argc, char** argv) {
  using namespace fairrank;
  CLI::App app{"Fair re-ranking under noisy demographic inference"};
  app.require_subcommand(1);
  Flags f;

  auto* simulate = app.add_subcommand("simulate", "Accuracy sweep over synthetic populations");
  auto* rerank = app.add_subcommand("rerank", "Re-rank a candidate CSV toward a target");
  auto* casestudy = app.add_subcommand("casestudy", "Median tables over noisy re-rankings");
  auto* attention = app.add_subcommand("attention", "Print the attention curve");
  auto* matrix = app.add_subcommand("matrix", "Print a confusion matrix as JSON");

  for (CLI::App* sub : {simulate, rerank, casestudy, attention}) {
    sub->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
    AddOptional(sub, "--p", f.p, "First-rank attention share");
    AddOptional(sub, "--k", f.k, "List length");
    AddOptional(sub, "--out", f.out, "Output directory (or file for rerank/attention)");
    sub->add_flag("--logarithmic", f.logarithmic, "Use the logarithmic attention model");
  }
  for (CLI::App* sub : {simulate, casestudy}) {
    AddOptional(sub, "--seed", f.seed, "Master seed");
    AddOptional(sub, "--trials", f.trials, "Trials per cell");
    AddOptional(sub, "--threads", f.threads, "Worker threads (0 = auto)");
    sub->add_option("--matrix", f.matrices, "Built-in matrix name or JSON path")->delimiter(',');
  }
  for (CLI::App* sub : {simulate, rerank, casestudy}) {
    AddOptional(sub, "--format", f.format, "csv, md or both");
  }
  for (CLI::App* sub : {rerank, casestudy}) {
    AddOptional(sub, "--input", f.input, "Candidate CSV");
    sub->add_option("--attributes", f.attributes, "Demographic columns")->delimiter(',');
  }
  // --seed is accepted everywhere for uniformity; rerank is deterministic.
  AddOptional(rerank, "--seed", f.seed, "Ignored: re-ranking uses no randomness");

  simulate->add_option("--dist", f.dists, "Distributions (A-F or name=Label:mass,...)")
      ->delimiter(',');
  simulate->add_option("--accuracies", f.accuracies, "Inference accuracies")->delimiter(',');
  AddOptional(simulate, "--n-per-group", f.n_per_group, "Candidates per group");

  AddOptional(rerank, "--target", f.target, "Target distribution or 'empirical'");
  rerank->add_flag("--use-inferred", f.use_inferred, "Constrain on inferred_ columns");

  AddOptional(casestudy, "--gender-matrix", f.gender_matrix, "Matrix for the gender part");
  casestudy->add_option("--alias", f.aliases, "Label alias FROM=TO")->delimiter(',');

  matrix->add_option("--name", f.matrix_name, "Built-in name or JSON path");
  AddOptional(matrix, "--out", f.out, "Output file");

  CLI11_PARSE(app, argc, argv);
  try {
    if (simulate->parsed()) return RunSimulate(f);
    if (rerank->parsed()) return RunRerank(f);
    if (casestudy->parsed()) return RunCaseStudy(f);
    if (attention->parsed()) return RunAttention(f);
    if (matrix->parsed()) return RunMatrix(f);
  } catch (const Error& e) {
    std::cerr << "fairrank: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "fairrank: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
