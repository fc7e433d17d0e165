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

#include "fairrank/datasets.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_set>

namespace fairrank {
namespace {

std::string LineTag(std::size_t line) { return "line " + std::to_string(line); }

double ParseDouble(const std::string& text, std::size_t line,
                   const std::string& what) {
  // Leading/trailing blanks are common in hand-edited files.
  const auto first = text.find_first_not_of(" \t");
  const auto last = text.find_last_not_of(" \t");
  if (first == std::string::npos) {
    throw Error(ErrorCode::kParseError, LineTag(line) + ": empty " + what);
  }
  const char* begin = text.data() + first;
  const char* end = text.data() + last + 1;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kParseError,
                LineTag(line) + ": cannot parse " + what + " '" + text + "'");
  }
  return value;
}

std::string Fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  // Avoid "-0.000000" for tiny negatives.
  if (std::string(buf) == "-0.000000") return "0.000000";
  return buf;
}

}  // namespace

CsvDocument ParseCsv(const std::string& text) {
  std::vector<CsvRow> records;
  CsvRow current;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  std::size_t line = 1;
  current.line = 1;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    // A blank line is a single empty unquoted field; skip it.
    if (!(current.fields.size() == 1 && current.fields[0].empty())) {
      records.push_back(std::move(current));
    }
    current = CsvRow{};
    current.line = line;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || field_was_quoted) {
          throw Error(ErrorCode::kParseError,
                      LineTag(line) + ": stray quote inside a field");
        }
        in_quotes = true;
        field_was_quoted = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        ++line;
        end_record();
        break;
      case '\n':
        ++line;
        end_record();
        break;
      default:
        if (field_was_quoted) {
          throw Error(ErrorCode::kParseError,
                      LineTag(line) + ": text after closing quote");
        }
        field.push_back(c);
    }
  }
  if (in_quotes) {
    throw Error(ErrorCode::kParseError,
                LineTag(current.line) + ": unterminated quoted field");
  }
  if (!field.empty() || field_was_quoted || !current.fields.empty()) end_record();

  if (records.empty()) throw Error(ErrorCode::kParseError, "missing header");
  CsvDocument doc;
  doc.header = std::move(records.front().fields);
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].fields.size() != doc.header.size()) {
      throw Error(ErrorCode::kParseError,
                  LineTag(records[r].line) + ": expected " +
                      std::to_string(doc.header.size()) + " fields, found " +
                      std::to_string(records[r].fields.size()));
    }
    doc.rows.push_back(std::move(records[r]));
  }
  return doc;
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIoError, "read failed: " + path);
  return buf.str();
}

void WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path);
}

std::string CsvEscape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string CsvLine(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += CsvEscape(fields[i]);
  }
  out.push_back('\n');
  return out;
}

CandidateSet ParseCandidatesCsv(const std::string& text,
                                const std::vector<std::string>& attributes,
                                const LoadOptions& options) {
  if (attributes.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "at least one attribute column is needed");
  }
  const CsvDocument doc = ParseCsv(text);
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < doc.header.size(); ++i) {
    if (!column.emplace(doc.header[i], i).second) {
      throw Error(ErrorCode::kParseError,
                  LineTag(1) + ": duplicate column '" + doc.header[i] + "'");
    }
  }
  auto require = [&](const std::string& name) {
    const auto it = column.find(name);
    if (it == column.end()) {
      throw Error(ErrorCode::kUnknownColumn, "no column '" + name + "' in header");
    }
    return it->second;
  };
  const std::size_t id_col = require("id");
  const std::size_t score_col = require("score");
  std::vector<std::size_t> attr_cols;
  std::vector<std::size_t> inferred_cols;
  for (const std::string& a : attributes) {
    attr_cols.push_back(require(a));
    const auto it = column.find("inferred_" + a);
    if (it != column.end()) inferred_cols.push_back(it->second);
  }
  if (!inferred_cols.empty() && inferred_cols.size() != attributes.size()) {
    throw Error(ErrorCode::kUnknownColumn,
                "inferred_ columns must cover every attribute or none");
  }

  CandidateSet set;
  set.attributes = attributes;
  set.has_inferred = !inferred_cols.empty();
  std::unordered_set<std::string> seen;
  for (const CsvRow& row : doc.rows) {
    Candidate c;
    c.id = row.fields[id_col];
    if (c.id.empty()) throw Error(ErrorCode::kParseError, LineTag(row.line) + ": empty id");
    if (!seen.insert(c.id).second) {
      throw Error(ErrorCode::kDuplicateId,
                  LineTag(row.line) + ": id '" + c.id + "' repeats");
    }
    c.score = ParseDouble(row.fields[score_col], row.line, "score");
    if (!std::isfinite(c.score)) {
      throw Error(ErrorCode::kInvalidScore, LineTag(row.line) + ": non-finite score");
    }
    std::vector<std::string> parts;
    for (std::size_t col : attr_cols) parts.push_back(row.fields[col]);
    try {
      c.true_label = SubgroupProduct(parts);
      if (set.has_inferred) {
        std::vector<std::string> inferred;
        for (std::size_t col : inferred_cols) inferred.push_back(row.fields[col]);
        c.inferred_label = SubgroupProduct(inferred);
      }
    } catch (const Error& e) {
      throw Error(e.code(), LineTag(row.line) + ": " + e.what());
    }
    set.candidates.push_back(std::move(c));
  }
  if (set.candidates.empty()) throw Error(ErrorCode::kEmptyPopulation, "no data rows");

  if (options.normalize) {
    const auto [lo, hi] = std::minmax_element(
        set.candidates.begin(), set.candidates.end(),
        [](const Candidate& a, const Candidate& b) { return a.score < b.score; });
    const double min = lo->score, max = hi->score;
    if (min < 0.0 || max > 1.0) {
      set.normalized = true;
      for (Candidate& c : set.candidates) {
        c.score = max > min ? (c.score - min) / (max - min) : 1.0;
      }
    }
  }
  set.candidates = SortByScore(std::move(set.candidates)).items;
  return set;
}

CandidateSet LoadCandidatesCsv(const std::string& path,
                               const std::vector<std::string>& attributes,
                               const LoadOptions& options) {
  try {
    return ParseCandidatesCsv(ReadTextFile(path), attributes, options);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIoError) throw;
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::string FormatCandidatesCsv(const std::vector<Candidate>& candidates,
                                const std::vector<std::string>& attributes) {
  const bool inferred =
      !candidates.empty() &&
      std::all_of(candidates.begin(), candidates.end(),
                  [](const Candidate& c) { return c.inferred_label.has_value(); });
  std::vector<std::string> header = {"id", "score"};
  for (const std::string& a : attributes) header.push_back(a);
  if (inferred) {
    for (const std::string& a : attributes) header.push_back("inferred_" + a);
  }
  std::string out = CsvLine(header);
  auto add_parts = [&](std::vector<std::string>& fields, const SubgroupLabel& label,
                       const std::string& id) {
    if (label.parts().size() != attributes.size()) {
      throw Error(ErrorCode::kInvalidLabel,
                  "candidate '" + id + "' has " + std::to_string(label.parts().size()) +
                      " label parts for " + std::to_string(attributes.size()) +
                      " attributes");
    }
    fields.insert(fields.end(), label.parts().begin(), label.parts().end());
  };
  for (const Candidate& c : candidates) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", c.score);
    std::vector<std::string> fields = {c.id, buf};
    add_parts(fields, c.true_label, c.id);
    if (inferred) add_parts(fields, *c.inferred_label, c.id);
    out += CsvLine(fields);
  }
  return out;
}

void WriteCandidatesCsv(const std::string& path,
                        const std::vector<Candidate>& candidates,
                        const std::vector<std::string>& attributes) {
  WriteTextFile(path, FormatCandidatesCsv(candidates, attributes));
}

void MetricTable::AddRow(std::string name, std::vector<double> row) {
  if (row.size() != columns.size()) {
    throw Error(ErrorCode::kInvalidConfig,
                "row '" + name + "' has " + std::to_string(row.size()) +
                    " cells for " + std::to_string(columns.size()) + " columns");
  }
  row_names.push_back(std::move(name));
  values.push_back(std::move(row));
}

std::string FormatTableCsv(const MetricTable& table) {
  std::vector<std::string> header = {table.row_header};
  header.insert(header.end(), table.columns.begin(), table.columns.end());
  std::string out = CsvLine(header);
  for (std::size_t r = 0; r < table.values.size(); ++r) {
    std::vector<std::string> fields = {table.row_names[r]};
    for (double v : table.values[r]) fields.push_back(Fixed6(v));
    out += CsvLine(fields);
  }
  return out;
}

std::string FormatTableMarkdown(const MetricTable& table) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header = {table.row_header};
  header.insert(header.end(), table.columns.begin(), table.columns.end());
  cells.push_back(header);
  for (std::size_t r = 0; r < table.values.size(); ++r) {
    std::vector<std::string> row = {table.row_names[r]};
    for (double v : table.values[r]) row.push_back(Fixed6(v));
    cells.push_back(std::move(row));
  }
  std::vector<std::size_t> width(header.size(), 3);
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  auto escape = [](const std::string& s) {
    std::string out;
    for (char ch : s) {
      if (ch == '|') out.push_back('\\');
      out.push_back(ch);
    }
    return out;
  };
  std::string out;
  if (!table.title.empty()) out += "### " + table.title + "\n\n";
  auto emit = [&](const std::vector<std::string>& row, bool numeric) {
    out += "|";
    for (std::size_t c = 0; c < row.size(); ++c) {
      const std::string cell = escape(row[c]);
      const std::string pad(width[c] > cell.size() ? width[c] - cell.size() : 0, ' ');
      // Numbers right-aligned, names left-aligned.
      out += " " + ((numeric && c > 0) ? pad + cell : cell + pad) + " |";
    }
    out += "\n";
  };
  emit(cells[0], false);
  out += "|";
  for (std::size_t c = 0; c < width.size(); ++c) {
    // First column left-aligned, numbers right-aligned.
    out += c == 0 ? " " + std::string(width[c], '-') + " |"
                  : " " + std::string(width[c] - 1, '-') + ": |";
  }
  out += "\n";
  for (std::size_t r = 1; r < cells.size(); ++r) emit(cells[r], true);
  return out;
}

MetricTable ParseTableCsv(const std::string& text) {
  const CsvDocument doc = ParseCsv(text);
  if (doc.header.empty()) throw Error(ErrorCode::kParseError, "empty table header");
  MetricTable table;
  table.row_header = doc.header[0];
  table.columns.assign(doc.header.begin() + 1, doc.header.end());
  for (const CsvRow& row : doc.rows) {
    std::vector<double> values;
    for (std::size_t c = 1; c < row.fields.size(); ++c) {
      values.push_back(ParseDouble(row.fields[c], row.line, "'" + doc.header[c] + "' cell"));
    }
    table.AddRow(row.fields[0], std::move(values));
  }
  return table;
}

void WriteTableCsv(const MetricTable& table, const std::string& path) {
  WriteTextFile(path, FormatTableCsv(table));
}

void WriteTableMarkdown(const MetricTable& table, const std::string& path) {
  WriteTextFile(path, FormatTableMarkdown(table));
}

MetricTable ReadTableCsv(const std::string& path) {
  return ParseTableCsv(ReadTextFile(path));
}

std::string TableKindName(TableKind kind) {
  switch (kind) {
    case TableKind::kSkew: return "skew";
    case TableKind::kAttention: return "attention";
    case TableKind::kTreatment: return "treatment";
    case TableKind::kImpact: return "impact";
  }
  return "unknown";
}

namespace {

const char* AggregateName(TableKind kind) {
  switch (kind) {
    case TableKind::kSkew: return "NDKL";
    case TableKind::kAttention: return "ABR";
    case TableKind::kTreatment: return "DTBR";
    case TableKind::kImpact: return "DIBR";
  }
  return "";
}

MetricTable EmptyKindTable(TableKind kind, const std::vector<SubgroupLabel>& groups) {
  MetricTable table;
  table.title = TableKindName(kind);
  for (const SubgroupLabel& g : groups) table.columns.push_back(g.str());
  table.columns.push_back(AggregateName(kind));
  return table;
}

}  // namespace

MetricTable RecordTable(
    TableKind kind, const std::vector<SubgroupLabel>& groups,
    const std::vector<std::pair<std::string, MetricsRecord>>& records) {
  if (records.empty()) throw Error(ErrorCode::kInvalidConfig, "no records to tabulate");
  std::vector<SubgroupLabel> sorted = groups;
  std::sort(sorted.begin(), sorted.end());
  MetricTable table = EmptyKindTable(kind, sorted);
  for (const auto& [name, r] : records) {
    std::vector<double> row;
    for (const SubgroupLabel& g : sorted) {
      if (kind == TableKind::kSkew) {
        const auto it = r.skew.find(g);
        row.push_back(it == r.skew.end() ? 0.0 : it->second);
        continue;
      }
      const auto it = r.groups.find(g);
      if (it == r.groups.end()) {
        row.push_back(0.0);
      } else if (kind == TableKind::kAttention) {
        row.push_back(it->second.eta);
      } else if (kind == TableKind::kTreatment) {
        row.push_back(it->second.theta);
      } else {
        row.push_back(it->second.gamma);
      }
    }
    switch (kind) {
      case TableKind::kSkew: row.push_back(r.ndkl); break;
      case TableKind::kAttention: row.push_back(r.abr); break;
      case TableKind::kTreatment: row.push_back(r.dtbr); break;
      case TableKind::kImpact: row.push_back(r.dibr); break;
    }
    table.AddRow(name, std::move(row));
  }
  return table;
}

MetricTable CaseStudyTable(const CaseStudyResult& result, TableKind kind) {
  MetricTable table = EmptyKindTable(kind, result.groups);
  for (const CaseStudyRow& r : result.rows) {
    const std::map<SubgroupLabel, double>* per_group = nullptr;
    double aggregate = 0.0;
    switch (kind) {
      case TableKind::kSkew: per_group = &r.skew; aggregate = r.ndkl; break;
      case TableKind::kAttention: per_group = &r.eta; aggregate = r.abr; break;
      case TableKind::kTreatment: per_group = &r.theta; aggregate = r.dtbr; break;
      case TableKind::kImpact: per_group = &r.gamma; aggregate = r.dibr; break;
    }
    std::vector<double> row;
    for (const SubgroupLabel& g : result.groups) {
      const auto it = per_group->find(g);
      row.push_back(it == per_group->end() ? 0.0 : it->second);
    }
    row.push_back(aggregate);
    table.AddRow(r.name, std::move(row));
  }
  return table;
}

MetricTable CaseStudySummaryTable(const CaseStudyResult& result) {
  MetricTable table;
  table.title = "summary";
  table.columns = {"NDCG", "MARC", "feasible_share"};
  for (const CaseStudyRow& r : result.rows) {
    table.AddRow(r.name, {r.ndcg, r.marc, r.feasible_share});
  }
  return table;
}

const std::vector<std::string>& SweepMetricNames() {
  static const std::vector<std::string> names = {"NDKL", "ABR",  "DTBR",
                                                 "DIBR", "NDCG", "MARC"};
  return names;
}

double MetricValue(const ListMetrics& m, const std::string& metric) {
  if (metric == "NDKL") return m.ndkl;
  if (metric == "ABR") return m.abr;
  if (metric == "DTBR") return m.dtbr;
  if (metric == "DIBR") return m.dibr;
  if (metric == "NDCG") return m.ndcg;
  if (metric == "MARC") return m.marc;
  throw Error(ErrorCode::kInvalidConfig, "unknown metric '" + metric + "'");
}

MetricTable SweepTable(const SweepResult& result, const std::string& metric,
                       bool fair) {
  MetricTable table;
  table.title = metric + (fair ? "" : " (baseline)");
  table.row_header = "accuracy";
  for (const std::string& s : result.spec_names) table.columns.push_back("Dist " + s);
  for (std::size_t c = 0; c < result.condition_names.size(); ++c) {
    std::vector<double> row;
    for (std::size_t s = 0; s < result.spec_names.size(); ++s) {
      const SweepCell& cell = result.cells[s][c];
      row.push_back(MetricValue(fair ? cell.MeanFair() : cell.MeanBaseline(), metric));
    }
    table.AddRow(result.condition_names[c], std::move(row));
  }
  return table;
}

std::string FormatPlotCsv(const SweepResult& result) {
  std::string out = CsvLine(
      {"distribution", "condition", "list", "metric", "mean", "stderr", "trials"});
  for (std::size_t s = 0; s < result.spec_names.size(); ++s) {
    for (std::size_t c = 0; c < result.condition_names.size(); ++c) {
      const SweepCell& cell = result.cells[s][c];
      for (const bool fair : {true, false}) {
        const std::vector<ListMetrics>& trials = fair ? cell.fair : cell.baseline;
        for (const std::string& metric : SweepMetricNames()) {
          double sum = 0.0, sq = 0.0;
          for (const ListMetrics& m : trials) {
            const double v = MetricValue(m, metric);
            sum += v;
            sq += v * v;
          }
          const double n = static_cast<double>(trials.size());
          const double mean = sum / n;
          const double var = n > 1 ? std::max(0.0, (sq - n * mean * mean) / (n - 1)) : 0.0;
          out += CsvLine({result.spec_names[s], result.condition_names[c],
                          fair ? "fair" : "baseline", metric, Fixed6(mean),
                          Fixed6(std::sqrt(var / n)), std::to_string(trials.size())});
        }
      }
    }
  }
  return out;
}

}  // namespace fairrank
