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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "test_util.h"

namespace fairrank {
namespace {

namespace fs = std::filesystem;

std::string Fixture(const std::string& name) {
  return (fs::path(FAIRRANK_DATA_DIR) / "examples" / name).string();
}

std::string TempPath(const std::string& name) {
  return (fs::temp_directory_path() / ("fairrank_test_" + name)).string();
}

TEST(CsvTest, QuotingAndLineNumbers) {
  const CsvDocument d = ParseCsv("a,b\n\"x,1\",\"say \"\"hi\"\"\"\r\n\"multi\nline\",z\n\n");
  EXPECT_EQ(d.header, (std::vector<std::string>{"a", "b"}));
  ASSERT_EQ(d.rows.size(), 2u);
  EXPECT_EQ(d.rows[0].fields[0], "x,1");
  EXPECT_EQ(d.rows[0].fields[1], "say \"hi\"");
  EXPECT_EQ(d.rows[0].line, 2u);
  EXPECT_EQ(d.rows[1].fields[0], "multi\nline");
  EXPECT_EQ(d.rows[1].line, 3u);
}

TEST(CsvTest, Errors) {
  try {
    ParseCsv("a,b\n1,2\n3\n");
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_FAIRRANK_ERROR(ParseCsv("a\n\"open\n"), ErrorCode::kParseError);
  EXPECT_FAIRRANK_ERROR(ParseCsv("a\nx\"y\n"), ErrorCode::kParseError);
  EXPECT_FAIRRANK_ERROR(ParseCsv(""), ErrorCode::kParseError);
}

TEST(CsvTest, EscapeRoundTrip) {
  const std::vector<std::string> fields = {"plain", "with,comma", "with \"quote\"", "new\nline", ""};
  const CsvDocument d = ParseCsv(CsvLine({"a", "b", "c", "d", "e"}) + CsvLine(fields));
  EXPECT_EQ(d.rows.at(0).fields, fields);
}

TEST(LoadCandidatesTest, FourRowFixture) {
  const CandidateSet s = LoadCandidatesCsv(Fixture("four_people.csv"), {"race", "gender"});
  ASSERT_EQ(s.candidates.size(), 4u);
  EXPECT_FALSE(s.normalized);
  EXPECT_FALSE(s.has_inferred);
  EXPECT_EQ(s.candidates[0].id, "p1");
  EXPECT_EQ(s.candidates[0].true_label.str(), "White Men");
  EXPECT_EQ(s.candidates[1].true_label.str(), "Black Women");
  EXPECT_EQ(s.candidates[3].true_label.str(), "Asian Women");
}

TEST(LoadCandidatesTest, RawScoresAreNormalizedAndTiesBrokenById) {
  const CandidateSet s = LoadCandidatesCsv(Fixture("raw_scores.csv"), {"race", "gender"});
  EXPECT_TRUE(s.normalized);
  EXPECT_TRUE(s.has_inferred);
  ASSERT_EQ(s.candidates.size(), 5u);
  EXPECT_EQ(s.candidates[0].id, "a");
  EXPECT_DOUBLE_EQ(s.candidates[0].score, 1.0);
  EXPECT_EQ(s.candidates[1].id, "b");
  EXPECT_EQ(s.candidates[2].id, "d");
  EXPECT_DOUBLE_EQ(s.candidates[4].score, 0.0);
  EXPECT_EQ(s.candidates[1].inferred_label->str(), "White Women");

  LoadOptions raw;
  raw.normalize = false;
  EXPECT_DOUBLE_EQ(LoadCandidatesCsv(Fixture("raw_scores.csv"), {"race"}, raw).candidates[0].score,
                   1450.0);
}

TEST(LoadCandidatesTest, Errors) {
  try {
    ParseCandidatesCsv("id,score,race\na,0.5,X\nb,0.4,Y\na,0.3,X\n", {"race"});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicateId);
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  }
  EXPECT_FAIRRANK_ERROR(ParseCandidatesCsv("id,score,race\na,0.5,X\n", {"gender"}),
                        ErrorCode::kUnknownColumn);
  EXPECT_FAIRRANK_ERROR(ParseCandidatesCsv("id,race\na,X\n", {"race"}), ErrorCode::kUnknownColumn);
  EXPECT_FAIRRANK_ERROR(
      ParseCandidatesCsv("id,score,race,gender,inferred_race\na,0.5,X,M,X\n", {"race", "gender"}),
      ErrorCode::kUnknownColumn);
  EXPECT_FAIRRANK_ERROR(ParseCandidatesCsv("id,score,race\na,high,X\n", {"race"}),
                        ErrorCode::kParseError);
  EXPECT_FAIRRANK_ERROR(ParseCandidatesCsv("id,score,race\na,inf,X\n", {"race"}),
                        ErrorCode::kInvalidScore);
  EXPECT_FAIRRANK_ERROR(ParseCandidatesCsv("id,score,race\n", {"race"}),
                        ErrorCode::kEmptyPopulation);
  EXPECT_FAIRRANK_ERROR(LoadCandidatesCsv("/nonexistent.csv", {"race"}), ErrorCode::kIoError);
}

TEST(LoadCandidatesTest, LargeFileSelfConsistentHistogram) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  const char* races[] = {"White", "Black", "Asian", "Hispanic", "Other"};
  std::map<SubgroupLabel, int> expected;
  std::string text = "id,score,race,gender\n";
  for (int i = 0; i < 7395; ++i) {
    const std::string r = races[rng() % 5];
    const std::string g = (rng() % 3 == 0) ? "Women" : "Men";
    ++expected[SubgroupProduct({r, g})];
    text += "r" + std::to_string(i) + "," + std::to_string(u(rng)) + "," + r + "," + g + "\n";
  }
  const CandidateSet s = ParseCandidatesCsv(text, {"race", "gender"});
  ASSERT_EQ(s.candidates.size(), 7395u);
  const Distribution d = EmpiricalDistribution(s.candidates);
  EXPECT_EQ(d.mass().size(), expected.size());
  for (const auto& [label, n] : expected) EXPECT_NEAR(d.at(label), n / 7395.0, 1e-12);
}

TEST(LoadCandidatesTest, WriteLoadIsIdentity) {
  const CandidateSet s = LoadCandidatesCsv(Fixture("raw_scores.csv"), {"race", "gender"});
  const std::string path = TempPath("roundtrip.csv");
  WriteCandidatesCsv(path, s.candidates, s.attributes);
  const CandidateSet back = LoadCandidatesCsv(path, {"race", "gender"});
  ASSERT_EQ(back.candidates.size(), s.candidates.size());
  EXPECT_FALSE(back.normalized);
  for (std::size_t i = 0; i < s.candidates.size(); ++i) {
    EXPECT_EQ(back.candidates[i].id, s.candidates[i].id);
    EXPECT_NEAR(back.candidates[i].score, s.candidates[i].score, 1e-9);
    EXPECT_EQ(back.candidates[i].true_label, s.candidates[i].true_label);
    EXPECT_EQ(back.candidates[i].inferred_label, s.candidates[i].inferred_label);
  }
  fs::remove(path);
}

MetricTable SampleTable() {
  MetricTable t;
  t.title = "NDKL";
  t.row_header = "accuracy";
  t.columns = {"Dist A", "Dist B"};
  t.AddRow("0.1", {0.0792171234, 0.25});
  t.AddRow("1.0", {0.0528229999, 1.0 / 3.0});
  return t;
}

TEST(MetricTableTest, CsvRoundTripToSixDecimals) {
  const MetricTable t = SampleTable();
  const std::string path = TempPath("table.csv");
  WriteTableCsv(t, path);
  const MetricTable back = ReadTableCsv(path);
  EXPECT_EQ(back.row_header, "accuracy");
  EXPECT_EQ(back.columns, t.columns);
  EXPECT_EQ(back.row_names, t.row_names);
  for (std::size_t r = 0; r < t.values.size(); ++r) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      EXPECT_NEAR(back.values[r][c], t.values[r][c], 5e-7);
    }
  }
  fs::remove(path);
}

TEST(MetricTableTest, MarkdownShowsSameCells) {
  const MetricTable t = SampleTable();
  const std::string md = FormatTableMarkdown(t);
  const CsvDocument csv = ParseCsv(FormatTableCsv(t));
  for (const CsvRow& row : csv.rows) {
    for (const std::string& cell : row.fields) {
      EXPECT_NE(md.find(" " + cell + " "), std::string::npos) << cell << "\n" << md;
    }
  }
  EXPECT_NE(md.find("| accuracy |"), std::string::npos);
}

TEST(MetricTableTest, RowWidthChecked) {
  MetricTable t = SampleTable();
  EXPECT_FAIRRANK_ERROR(t.AddRow("x", {1.0}), ErrorCode::kInvalidConfig);
}

TEST(RecordTableTest, GroupsInCanonicalOrderAggregateLast) {
  MetricsRecord r;
  r.ndkl = 0.2;
  r.abr = 0.7;
  r.skew = {{SubgroupLabel("White"), 1.2}, {SubgroupLabel("Asian"), 0.8}};
  r.groups[SubgroupLabel("White")].eta = 0.9;
  const MetricTable skew = RecordTable(TableKind::kSkew,
                                       {SubgroupLabel("White"), SubgroupLabel("Asian"),
                                        SubgroupLabel("Black")},
                                       {{"Baseline", r}});
  EXPECT_EQ(skew.columns, (std::vector<std::string>{"Asian", "Black", "White", "NDKL"}));
  ASSERT_EQ(skew.values.size(), 1u);
  EXPECT_EQ(skew.values[0], (std::vector<double>{0.8, 0.0, 1.2, 0.2}));
  const MetricTable attn = RecordTable(TableKind::kAttention, {SubgroupLabel("White")},
                                       {{"Baseline", r}});
  EXPECT_EQ(attn.columns.back(), "ABR");
  EXPECT_EQ(attn.values[0], (std::vector<double>{0.9, 0.7}));
  EXPECT_FAIRRANK_ERROR(RecordTable(TableKind::kSkew, {}, {}), ErrorCode::kInvalidConfig);
}

TEST(SweepTableTest, ShapeAndPlotCsv) {
  SweepConfig config;
  for (const char* n : {"A", "B"}) {
    PopulationSpec s = BuiltinPopulation(n);
    s.n_per_group = 100;
    config.specs.push_back(s);
  }
  config.conditions = SweepConfig::AccuracyGrid({0.5, 1.0});
  config.trials = 3;
  config.k = 30;
  const SweepResult r = Sweep(config);
  const MetricTable t = SweepTable(r, "NDKL");
  EXPECT_EQ(t.columns, (std::vector<std::string>{"Dist A", "Dist B"}));
  EXPECT_EQ(t.row_names, (std::vector<std::string>{"0.5", "1.0"}));
  EXPECT_DOUBLE_EQ(t.values[1][0], r.cell("A", "1.0").MeanFair().ndkl);
  EXPECT_FAIRRANK_ERROR(SweepTable(r, "XYZ"), ErrorCode::kInvalidConfig);

  const CsvDocument plot = ParseCsv(FormatPlotCsv(r));
  EXPECT_EQ(plot.header.front(), "distribution");
  EXPECT_EQ(plot.rows.size(), 2u * 2u * 2u * 6u);
}

}  // namespace
}  // namespace fairrank
