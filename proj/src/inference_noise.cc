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

#include "fairrank/inference_noise.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "fairrank/random.h"

namespace fairrank {
namespace {

using Json = nlohmann::json;

struct BuiltinMatrix {
  const char* name;
  // Rows and columns: Asian, Black, Latinx, White. Values are the published
  // per-algorithm confusion rates; data/matrices/*.json carries the same
  // numbers.
  std::array<std::array<double, 4>, 4> rows;
};

constexpr std::array<const char*, 4> kBuiltinLabels = {"Asian", "Black",
                                                        "Latinx", "White"};

constexpr BuiltinMatrix kBuiltins[] = {
    {"ethcnn",
     {{
         {0.408965663416702, 0.05970043803871697, 0.030380104564080825, 0.5009537939805002},
         {0.0015337144381331119, 0.3466618978049091, 0.004229333753639793, 0.647575054003318},
         {0.0035262000454993553, 0.046952807057455574, 0.5423649553853542, 0.4071560375116908},
         {0.0014619243179104877, 0.04874317059471446, 0.006881074128377015, 0.9429138309589981}}}},
    {"ethnicolr",
     {{
         {0.4177458486939534, 0.007971767967986891, 0.0795601348583672, 0.4947222484796925},
         {0.1356489679838461, 0.02522582112650309, 0.04393063422489593, 0.7951945766647549},
         {0.06131009566594049, 0.010202562818830089, 0.31740254116882943, 0.6110848003464},
         {0.12150850578319809, 0.031444105210971136, 0.016651837953604212, 0.8303955510522265}}}},
    {"bisg",
     {{
         {0.5941320293398533, 0.06601466992665037, 0.02444987775061125, 0.3154034229828851},
         {0.0005301825342725138, 0.461334545179126, 0.004847383170491555, 0.53328788911611},
         {0.0022988505747126436, 0.041379310344827586, 0.6781609195402298, 0.27816091954022987},
         {0.0010780245708241804, 0.08284517126352615, 0.008156374583028233, 0.9079204295826214}}}},
    {"nameprism",
     {{
         {0.5155425731351092, 0.003531412128874744, 0.05720015695165017, 0.4237258577843659},
         {0.012854789696947564, 0.030497450377013607, 0.012174377682485926, 0.9444733822435529},
         {0.018531114992186782, 0.006802095780862212, 0.4290651714311977, 0.5456016177957533},
         {0.007869801118584596, 0.008307528327452463, 0.0054088917838486785, 0.9784137787701143}}}},
    {"deepface",
     {{
         {0.614580914789877, 0.15532853494311585, 0.06779661016949153, 0.16229394009751566},
         {0.10782380013149244, 0.7238658777120316, 0.02827087442472058, 0.14003944773175542},
         {0.22010869565217392, 0.14605978260869565, 0.32065217391304346, 0.313179347826087},
         {0.1185378590078329, 0.07780678851174935, 0.10861618798955613, 0.6950391644908617}}}},
};

std::string Lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

SubgroupLabel LabelFromJson(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream words(text);
  for (std::string w; words >> w;) parts.push_back(w);
  return SubgroupLabel(std::move(parts));
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(
    const std::map<SubgroupLabel, std::map<SubgroupLabel, double>>& rows) {
  if (rows.empty()) throw Error(ErrorCode::kInvalidMatrix, "matrix has no rows");
  for (const auto& [truth, row] : rows) labels_.push_back(truth);
  const std::size_t n = labels_.size();
  cells_.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double total = 0.0;
    for (const auto& [predicted, prob] : rows.at(labels_[i])) {
      if (!rows.contains(predicted)) {
        throw Error(ErrorCode::kInvalidMatrix,
                    "predicted label '" + predicted.str() +
                        "' is not a row label");
      }
      if (!std::isfinite(prob) || prob < 0.0) {
        throw Error(ErrorCode::kInvalidMatrix,
                    "negative or non-finite entry in row '" + labels_[i].str() + "'");
      }
      cells_[i * n + IndexOf(predicted)] = prob;
      total += prob;
    }
    if (std::abs(total - 1.0) > kRowTolerance) {
      std::ostringstream os;
      os << "row '" << labels_[i].str() << "' sums to " << std::setprecision(12)
         << total;
      throw Error(ErrorCode::kInvalidMatrix, os.str());
    }
  }
}

ConfusionMatrix ConfusionMatrix::FromJson(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("matrix JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("rows") || !doc["rows"].is_object()) {
    throw Error(ErrorCode::kInvalidMatrix, "matrix JSON needs a 'rows' object");
  }
  std::map<SubgroupLabel, std::map<SubgroupLabel, double>> rows;
  try {
    for (const auto& [truth, row] : doc["rows"].items()) {
      auto& out = rows[LabelFromJson(truth)];
      for (const auto& [predicted, prob] : row.items()) {
        out[LabelFromJson(predicted)] = prob.get<double>();
      }
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidMatrix, std::string("matrix JSON: ") + e.what());
  }
  ConfusionMatrix cm(rows);
  if (doc.contains("labels")) {
    std::vector<SubgroupLabel> listed;
    for (const auto& l : doc["labels"]) listed.push_back(LabelFromJson(l.get<std::string>()));
    std::sort(listed.begin(), listed.end());
    if (listed != cm.labels_) {
      throw Error(ErrorCode::kInvalidMatrix, "'labels' does not match the row labels");
    }
  }
  return cm;
}

ConfusionMatrix ConfusionMatrix::LoadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open matrix file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return FromJson(buffer.str());
}

std::string ConfusionMatrix::ToJson() const {
  Json doc;
  doc["labels"] = Json::array();
  for (const SubgroupLabel& l : labels_) doc["labels"].push_back(l.str());
  Json rows = Json::object();
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    Json row = Json::object();
    for (std::size_t j = 0; j < labels_.size(); ++j) {
      row[labels_[j].str()] = cells_[i * labels_.size() + j];
    }
    rows[labels_[i].str()] = row;
  }
  doc["rows"] = rows;
  return doc.dump(2);
}

bool ConfusionMatrix::contains(const SubgroupLabel& label) const {
  return std::binary_search(labels_.begin(), labels_.end(), label);
}

std::size_t ConfusionMatrix::IndexOf(const SubgroupLabel& label) const {
  const auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  if (it == labels_.end() || *it != label) {
    throw Error(ErrorCode::kMissingLabel,
                "label '" + label.str() + "' is not in the confusion matrix");
  }
  return static_cast<std::size_t>(it - labels_.begin());
}

double ConfusionMatrix::Probability(const SubgroupLabel& truth,
                                    const SubgroupLabel& predicted) const {
  return cells_[IndexOf(truth) * labels_.size() + IndexOf(predicted)];
}

std::span<const double> ConfusionMatrix::Row(const SubgroupLabel& truth) const {
  const std::size_t n = labels_.size();
  return std::span<const double>(cells_).subspan(IndexOf(truth) * n, n);
}

ConfusionMatrix ConfusionMatrix::WithAliases(
    const std::map<std::string, std::string>& aliases) const {
  auto rename = [&](const SubgroupLabel& label) {
    std::vector<std::string> parts = label.parts();
    for (std::string& part : parts) {
      if (const auto it = aliases.find(part); it != aliases.end()) part = it->second;
    }
    return SubgroupLabel(std::move(parts));
  };
  std::map<SubgroupLabel, std::map<SubgroupLabel, double>> rows;
  const std::size_t n = labels_.size();
  for (std::size_t i = 0; i < n; ++i) {
    auto& row = rows[rename(labels_[i])];
    for (std::size_t j = 0; j < n; ++j) row[rename(labels_[j])] += cells_[i * n + j];
  }
  if (rows.size() != n) {
    throw Error(ErrorCode::kInvalidMatrix, "aliases merge two matrix labels");
  }
  return ConfusionMatrix(rows);
}

const std::vector<std::string>& BuiltinMatrixNames() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const BuiltinMatrix& m : kBuiltins) out.emplace_back(m.name);
    return out;
  }();
  return names;
}

ConfusionMatrix LoadBuiltinMatrix(const std::string& name) {
  const std::string key = Lower(name);
  for (const BuiltinMatrix& m : kBuiltins) {
    if (key != m.name) continue;
    std::map<SubgroupLabel, std::map<SubgroupLabel, double>> rows;
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        rows[SubgroupLabel(kBuiltinLabels[i])][SubgroupLabel(kBuiltinLabels[j])] =
            m.rows[i][j];
      }
    }
    return ConfusionMatrix(rows);
  }
  throw Error(ErrorCode::kUnknownMatrix, "no built-in matrix named '" + name + "'");
}

ConfusionMatrix ResolveMatrix(const std::string& name_or_path) {
  const std::string key = Lower(name_or_path);
  for (const std::string& n : BuiltinMatrixNames()) {
    if (n == key) return LoadBuiltinMatrix(key);
  }
  if (name_or_path.ends_with(".json")) return ConfusionMatrix::LoadFile(name_or_path);
  throw Error(ErrorCode::kUnknownMatrix,
              "'" + name_or_path + "' is neither a built-in matrix nor a .json file");
}

ConfusionMatrix UniformAccuracyMatrix(double accuracy,
                                      const std::vector<SubgroupLabel>& labels) {
  if (!(accuracy >= 0.0 && accuracy <= 1.0)) {
    throw Error(ErrorCode::kInvalidMatrix, "accuracy must lie in [0, 1]");
  }
  if (labels.empty()) throw Error(ErrorCode::kInvalidMatrix, "no labels");
  if (labels.size() == 1 && accuracy < 1.0) {
    throw Error(ErrorCode::kInvalidMatrix,
                "a single label cannot be misclassified (accuracy < 1)");
  }
  const double off = labels.size() > 1
                         ? (1.0 - accuracy) / static_cast<double>(labels.size() - 1)
                         : 0.0;
  std::map<SubgroupLabel, std::map<SubgroupLabel, double>> rows;
  for (const SubgroupLabel& truth : labels) {
    for (const SubgroupLabel& predicted : labels) {
      rows[truth][predicted] = truth == predicted ? accuracy : off;
    }
  }
  if (rows.size() != labels.size()) {
    throw Error(ErrorCode::kInvalidMatrix, "duplicate labels");
  }
  return ConfusionMatrix(rows);
}

ConfusionMatrix IdentityMatrix(const std::vector<SubgroupLabel>& labels) {
  return UniformAccuracyMatrix(1.0, labels);
}

ConfusionMatrix ComposeMatrices(const ConfusionMatrix& a,
                                const ConfusionMatrix& b) {
  auto join = [](const SubgroupLabel& x, const SubgroupLabel& y) {
    std::vector<std::string> parts = x.parts();
    parts.insert(parts.end(), y.parts().begin(), y.parts().end());
    return SubgroupLabel(std::move(parts));
  };
  std::map<SubgroupLabel, std::map<SubgroupLabel, double>> rows;
  for (const SubgroupLabel& ta : a.labels()) {
    for (const SubgroupLabel& tb : b.labels()) {
      auto& row = rows[join(ta, tb)];
      for (const SubgroupLabel& pa : a.labels()) {
        for (const SubgroupLabel& pb : b.labels()) {
          row[join(pa, pb)] = a.Probability(ta, pa) * b.Probability(tb, pb);
        }
      }
    }
  }
  return ConfusionMatrix(rows);
}

std::vector<Candidate> PerturbLabels(std::vector<Candidate> candidates,
                                     const ConfusionMatrix& cm,
                                     std::uint64_t seed) {
  for (const Candidate& c : candidates) {
    if (!cm.contains(c.true_label)) {
      throw Error(ErrorCode::kMissingLabel,
                  "true label '" + c.true_label.str() + "' of candidate '" + c.id +
                      "' is not in the confusion matrix");
    }
  }
  Rng rng(seed);
  const auto& labels = cm.labels();
  for (Candidate& c : candidates) {
    const std::span<const double> row = cm.Row(c.true_label);
    const double u = UniformUnit(rng);
    // Inverse CDF; rounding slack at the top lands on the last non-zero cell.
    std::size_t pick = labels.size();
    double cumulative = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] <= 0.0) continue;
      cumulative += row[j];
      pick = j;
      if (u < cumulative) break;
    }
    c.inferred_label = labels[pick];
  }
  return candidates;
}

}  // namespace fairrank
