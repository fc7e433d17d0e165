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

// Candidate CSV ingestion and metric table output.
//
// Candidate files carry a header with `id`, `score`, one column per
// demographic attribute and, optionally, `inferred_<attribute>` columns.
// Quoting follows RFC 4180.

#ifndef FAIRRANK_DATASETS_H_
#define FAIRRANK_DATASETS_H_

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "fairrank/metrics.h"
#include "fairrank/ranking_model.h"
#include "fairrank/simulation.h"

namespace fairrank {

struct CsvRow {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line the record starts on
};

// Header is the first record. Every record must have as many fields as the
// header; violations throw kParseError naming the line.
struct CsvDocument {
  std::vector<std::string> header;
  std::vector<CsvRow> rows;
};

CsvDocument ParseCsv(const std::string& text);
std::string ReadTextFile(const std::string& path);
void WriteTextFile(const std::string& path, const std::string& text);

// Quotes a field only when it needs it.
std::string CsvEscape(const std::string& field);
std::string CsvLine(const std::vector<std::string>& fields);

struct CandidateSet {
  std::vector<Candidate> candidates;  // score-sorted, id tiebreak
  std::vector<std::string> attributes;
  bool has_inferred = false;
  // Scores were rescaled to [0, 1] because some fell outside it.
  bool normalized = false;
};

struct LoadOptions {
  // Min-max rescale when any score falls outside [0, 1].
  bool normalize = true;
};

// Columns other than id, score, the attributes and their inferred_ twins
// are ignored. A requested attribute absent from the header throws
// kUnknownColumn.
CandidateSet ParseCandidatesCsv(const std::string& text,
                                const std::vector<std::string>& attributes,
                                const LoadOptions& options = {});
CandidateSet LoadCandidatesCsv(const std::string& path,
                               const std::vector<std::string>& attributes,
                               const LoadOptions& options = {});

// Writes id, score, attributes (and inferred_ columns when every candidate
// has an inferred label). Scores are printed with 17 significant digits.
std::string FormatCandidatesCsv(const std::vector<Candidate>& candidates,
                                const std::vector<std::string>& attributes);
void WriteCandidatesCsv(const std::string& path,
                        const std::vector<Candidate>& candidates,
                        const std::vector<std::string>& attributes);

// A rectangular table of numbers with named rows and columns.
struct MetricTable {
  std::string title;
  std::string row_header = "name";
  std::vector<std::string> columns;
  std::vector<std::string> row_names;
  std::vector<std::vector<double>> values;  // values[row][column]

  void AddRow(std::string name, std::vector<double> row);
};

// Six decimals, fixed.
std::string FormatTableCsv(const MetricTable& table);
std::string FormatTableMarkdown(const MetricTable& table);
MetricTable ParseTableCsv(const std::string& text);
void WriteTableCsv(const MetricTable& table, const std::string& path);
void WriteTableMarkdown(const MetricTable& table, const std::string& path);
MetricTable ReadTableCsv(const std::string& path);

// Per-group column family plus the matching aggregate in the last column.
enum class TableKind {
  kSkew,       // skew@k per group | NDKL
  kAttention,  // mean attention per group | ABR
  kTreatment,  // utility-weighted attention per group | DTBR
  kImpact,     // expected action rate per group | DIBR
};

std::string TableKindName(TableKind kind);

// One row per named record. Groups absent from a record read as 0.
MetricTable RecordTable(
    TableKind kind, const std::vector<SubgroupLabel>& groups,
    const std::vector<std::pair<std::string, MetricsRecord>>& records);

MetricTable CaseStudyTable(const CaseStudyResult& result, TableKind kind);
// NDCG, MARC and feasible share per row.
MetricTable CaseStudySummaryTable(const CaseStudyResult& result);

// Names accepted by SweepTable: NDKL, ABR, DTBR, DIBR, NDCG, MARC.
const std::vector<std::string>& SweepMetricNames();
double MetricValue(const ListMetrics& m, const std::string& metric);

// Rows = noise conditions, columns = distributions, cell = mean over trials.
MetricTable SweepTable(const SweepResult& result, const std::string& metric,
                       bool fair = true);

// Long format: distribution,condition,list,metric,mean,stderr,trials.
std::string FormatPlotCsv(const SweepResult& result);

}  // namespace fairrank

#endif  // FAIRRANK_DATASETS_H_
