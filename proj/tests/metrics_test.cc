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

#include "fairrank/metrics.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "test_util.h"

namespace fairrank {
namespace {

using testing::FromLabels;
using testing::Make;
using testing::MakeRanking;

Distribution Even(std::initializer_list<const char*> labels) {
  std::map<SubgroupLabel, double> m;
  for (const char* l : labels) m[SubgroupLabel(l)] = 1.0 / static_cast<double>(labels.size());
  return Distribution(m);
}

// Independent NDKL: natural-log KL converted to bits, prefixes rebuilt from
// scratch at every length.
double NdklOracle(const std::vector<std::string>& labels,
                  const std::map<std::string, double>& target) {
  double num = 0.0, z = 0.0;
  for (std::size_t i = 1; i <= labels.size(); ++i) {
    std::map<std::string, double> counts;
    for (std::size_t j = 0; j < i; ++j) counts[labels[j]] += 1.0;
    double kl = 0.0;
    for (const auto& [label, c] : counts) {
      const double q = c / static_cast<double>(i);
      kl += q * std::log(q / target.at(label)) / std::log(2.0);
    }
    num += kl / std::log2(i + 1.0);
    z += 1.0 / std::log2(i + 1.0);
  }
  return num / z;
}

TEST(AttentionTest, GeometricValues) {
  const AttentionModel m;
  EXPECT_NEAR(Attention(m, 1), 1.5, 1e-12);
  EXPECT_NEAR(Attention(m, 2), 1.4775, 1e-12);
  EXPECT_NEAR(Attention(m, 300), 100.0 * std::pow(0.985, 299) * 0.015, 1e-12);
  EXPECT_NEAR(Attention(m, 300), 0.016350, 1e-6);
}

TEST(AttentionTest, PartialAndInfiniteSums) {
  const AttentionModel m;
  const std::vector<double> a = AttentionVector(m, 300);
  ASSERT_EQ(a.size(), 300u);
  const double partial = std::accumulate(a.begin(), a.end(), 0.0);
  EXPECT_NEAR(partial, 100.0 * (1.0 - std::pow(0.985, 300)), 1e-9);
  EXPECT_NEAR(partial, 98.9, 0.05);
  const std::vector<double> long_run = AttentionVector(m, 5000);
  EXPECT_NEAR(std::accumulate(long_run.begin(), long_run.end(), 0.0), 100.0, 1e-9);
}

TEST(AttentionTest, LogarithmicMatchesGeometricAtTop) {
  AttentionModel m;
  m.kind = AttentionKind::kLogarithmic;
  EXPECT_NEAR(Attention(m, 1), 1.5, 1e-12);
  EXPECT_NEAR(Attention(m, 3), 1.5 / 2.0, 1e-12);
}

TEST(AttentionTest, Errors) {
  EXPECT_FAIRRANK_ERROR(Attention(AttentionModel{}, 0), ErrorCode::kInvalidRank);
  AttentionModel bad;
  bad.p = 1.0;
  EXPECT_FAIRRANK_ERROR(bad.Validate(), ErrorCode::kInvalidConfig);
  bad.p = 0.5;
  bad.k_max = 0;
  EXPECT_FAIRRANK_ERROR(bad.Validate(), ErrorCode::kInvalidConfig);
}

TEST(SkewTest, Examples) {
  const Distribution pop = Even({"X", "Y"});
  const Ranking r = FromLabels({"X", "X", "Y", "Y"});
  EXPECT_DOUBLE_EQ(SkewAtK(r, pop, SubgroupLabel("X"), 2), 2.0);
  EXPECT_DOUBLE_EQ(SkewAtK(r, pop, SubgroupLabel("Y"), 2), 0.0);
  EXPECT_DOUBLE_EQ(SkewAtK(r, pop, SubgroupLabel("X"), 4), 1.0);
  EXPECT_DOUBLE_EQ(SkewAtK(r, pop, SubgroupLabel("Y"), 4), 1.0);
}

TEST(SkewTest, Errors) {
  const Ranking r = FromLabels({"X", "Y"});
  EXPECT_FAIRRANK_ERROR(SkewAtK(r, Even({"X", "Y"}), SubgroupLabel("Z"), 1),
                        ErrorCode::kZeroBaseProportion);
  const Distribution zero({{SubgroupLabel("X"), 1.0}, {SubgroupLabel("Y"), 0.0}});
  EXPECT_FAIRRANK_ERROR(SkewAtK(r, zero, SubgroupLabel("Y"), 1), ErrorCode::kZeroBaseProportion);
  EXPECT_FAIRRANK_ERROR(SkewAtK(r, Even({"X", "Y"}), SubgroupLabel("X"), 3),
                        ErrorCode::kInvalidRank);
  EXPECT_FAIRRANK_ERROR(SkewAtK(r, Even({"X", "Y"}), SubgroupLabel("X"), 0),
                        ErrorCode::kInvalidRank);
}

TEST(NdklTest, HandCase) {
  EXPECT_NEAR(Ndkl(FromLabels({"X", "Y"}), Even({"X", "Y"})), 0.61315, 1e-5);
  EXPECT_NEAR(Ndkl(FromLabels({"X", "Y"}), Even({"X", "Y"})),
              NdklOracle({"X", "Y"}, {{"X", 0.5}, {"Y", 0.5}}), 1e-12);
}

TEST(NdklTest, ZeroWhenEveryPrefixMatches) {
  EXPECT_DOUBLE_EQ(Ndkl(FromLabels({"X", "X", "X"}), Even({"X"})), 0.0);
}

TEST(NdklTest, MatchesOracleOnRandomLists) {
  std::mt19937_64 rng(11);
  const std::vector<std::string> names = {"A", "B", "C"};
  const std::map<std::string, double> target = {{"A", 0.2}, {"B", 0.3}, {"C", 0.5}};
  const Distribution t = Distribution::Parse("A:0.2,B:0.3,C:0.5");
  for (int round = 0; round < 200; ++round) {
    std::vector<std::string> labels(1 + rng() % 30);
    for (auto& l : labels) l = names[rng() % 3];
    EXPECT_NEAR(Ndkl(FromLabels(labels), t), NdklOracle(labels, target), 1e-12);
  }
}

TEST(NdklTest, IgnoresScores) {
  Ranking a = FromLabels({"X", "Y", "Y", "X"});
  Ranking b = a;
  for (auto& c : b.items) c.score = 0.123;
  EXPECT_DOUBLE_EQ(Ndkl(a, Even({"X", "Y"})), Ndkl(b, Even({"X", "Y"})));
}

TEST(NdklTest, Errors) {
  const Distribution t({{SubgroupLabel("X"), 1.0}, {SubgroupLabel("Y"), 0.0}});
  EXPECT_FAIRRANK_ERROR(Ndkl(FromLabels({"X", "Y"}), t), ErrorCode::kZeroBaseProportion);
  EXPECT_FAIRRANK_ERROR(Ndkl(FromLabels({"X", "Z"}), Even({"X", "Y"})),
                        ErrorCode::kZeroBaseProportion);
  EXPECT_FAIRRANK_ERROR(Ndkl(Ranking{}, Even({"X"})), ErrorCode::kEmptyPopulation);
}

TEST(GroupStatsTest, HandExample) {
  const Ranking r = MakeRanking({Make("a", 1.0, "G"), Make("b", 0.5, "G")});
  const GroupStats s = GroupAttentionStats(r, AttentionModel{});
  const GroupStat& g = s.at(SubgroupLabel("G"));
  EXPECT_EQ(g.count, 2u);
  EXPECT_NEAR(g.eta, 1.48875, 1e-12);
  EXPECT_NEAR(g.u_mean, 0.75, 1e-12);
  EXPECT_NEAR(g.theta, 1.4925, 1e-12);
  EXPECT_NEAR(g.gamma, 0.01119375, 1e-12);
  EXPECT_NEAR(g.gamma, 0.01119, 1e-5);
}

TEST(GroupStatsTest, SingleGroupEtaIsMeanAttention) {
  const Ranking r = FromLabels(std::vector<std::string>(10, "G"));
  const std::vector<double> a = AttentionVector(AttentionModel{}, 10);
  const GroupStats s = GroupAttentionStats(r, AttentionModel{});
  EXPECT_NEAR(s.at(SubgroupLabel("G")).eta, std::accumulate(a.begin(), a.end(), 0.0) / 10, 1e-12);
  EXPECT_DOUBLE_EQ(Abr(s), 1.0);
}

TEST(GroupStatsTest, UniformScoresCollapse) {
  Ranking r = FromLabels({"X", "Y", "Y", "X", "X", "Y", "X"});
  for (auto& c : r.items) c.score = 0.4;
  const GroupStats s = GroupAttentionStats(r, AttentionModel{});
  for (const auto& [label, g] : s) {
    EXPECT_NEAR(g.theta, g.eta, 1e-12);
    EXPECT_NEAR(g.gamma, 0.4 * g.eta / 100.0, 1e-15);
  }
  EXPECT_NEAR(Dtbr(s), Abr(s), 1e-12);
  EXPECT_NEAR(Dibr(s), Abr(s), 1e-12);
}

TEST(GroupStatsTest, ZeroScoresFlagTheta) {
  const Ranking r = MakeRanking({Make("a", 0.9, "X"), Make("b", 0.0, "Y")});
  const GroupStats s = GroupAttentionStats(r, AttentionModel{});
  EXPECT_TRUE(s.at(SubgroupLabel("Y")).theta_undefined);
  EXPECT_DOUBLE_EQ(s.at(SubgroupLabel("Y")).theta, 0.0);
  EXPECT_FALSE(s.at(SubgroupLabel("X")).theta_undefined);
}

TEST(RatioTest, Examples) {
  GroupStats s;
  s[SubgroupLabel("g1")].eta = 0.2;
  s[SubgroupLabel("g2")].eta = 0.5;
  EXPECT_DOUBLE_EQ(Abr(s), 0.4);
  GroupStats one;
  one[SubgroupLabel("g")].eta = 0.7;
  EXPECT_DOUBLE_EQ(Abr(one), 1.0);
  GroupStats zero;
  zero[SubgroupLabel("g")].eta = 0.0;
  EXPECT_FAIRRANK_ERROR(Abr(zero), ErrorCode::kDegenerateRatio);
  EXPECT_FAIRRANK_ERROR(Abr(GroupStats{}), ErrorCode::kDegenerateRatio);
}

TEST(RatioTest, ScaleInvariant) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int round = 0; round < 100; ++round) {
    Ranking r;
    for (int i = 0; i < 25; ++i) {
      r.items.push_back(Make("c" + std::to_string(i), u(rng), std::string(1, "XYZ"[rng() % 3])));
    }
    r.items.push_back(Make("x", 0.5, "X"));
    r.items.push_back(Make("y", 0.5, "Y"));
    std::vector<double> a = AttentionVector(AttentionModel{}, r.size());
    const GroupStats base = GroupAttentionStats(r, a);
    for (double c : {0.001, 0.37, 3.0, 250.0}) {
      std::vector<double> scaled = a;
      for (double& v : scaled) v *= c;
      const GroupStats s = GroupAttentionStats(r, scaled);
      EXPECT_NEAR(Abr(s), Abr(base), 1e-12);
      EXPECT_NEAR(Dtbr(s), Dtbr(base), 1e-12);
      EXPECT_NEAR(Dibr(s), Dibr(base), 1e-12);
    }
  }
}

TEST(NdcgTest, HandCases) {
  Ranking ones = FromLabels({"X", "X", "X"});
  for (auto& c : ones.items) c.score = 1.0;
  EXPECT_DOUBLE_EQ(Ndcg(ones), 1.0);
  const Ranking fwd = MakeRanking({Make("a", 1.0, "X"), Make("b", 0.5, "X")});
  const Ranking rev = MakeRanking({Make("b", 0.5, "X"), Make("a", 1.0, "X")});
  EXPECT_NEAR(Ndcg(fwd), 0.80657, 1e-5);
  EXPECT_NEAR(Ndcg(rev), 0.69343, 1e-5);
  EXPECT_LT(Ndcg(rev), Ndcg(fwd));
  EXPECT_FAIRRANK_ERROR(Ndcg(Ranking{}), ErrorCode::kEmptyPopulation);
}

TEST(NdcgTest, SortedOrderIsMaximalOverAllPermutations) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int n = 1; n <= 6; ++n) {
    for (int round = 0; round < 20; ++round) {
      std::vector<Candidate> xs;
      for (int i = 0; i < n; ++i) xs.push_back(Make(std::to_string(i), u(rng), "X"));
      const double best = Ndcg(SortByScore(xs));
      std::vector<int> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      do {
        Ranking r;
        for (int i : perm) r.items.push_back(xs[i]);
        EXPECT_LE(Ndcg(r), best + 1e-12);
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
  }
}

TEST(RankChangeTest, Examples) {
  Ranking original;
  for (int i = 1; i <= 12; ++i) original.items.push_back(Make("c" + std::to_string(i), 1.0 / i, "G"));
  // c10 moves from rank 10 to rank 3.
  Ranking moved;
  for (const char* id : {"c1", "c2", "c10"}) {
    moved.items.push_back(*std::find_if(original.items.begin(), original.items.end(),
                                        [&](const Candidate& c) { return c.id == id; }));
  }
  const RankChange rc = RankChangeMetrics(original, moved);
  EXPECT_EQ(rc.boosts[2].first, "c10");
  EXPECT_EQ(rc.boosts[2].second, 7);

  EXPECT_DOUBLE_EQ(RankChangeMetrics(original, original.Prefix(5)).marc, 0.0);
  EXPECT_DOUBLE_EQ(RankChangeMetrics(original, original).marc, 0.0);
}

TEST(RankChangeTest, ArcIsMeanAbsoluteBoost) {
  // u climbs 6 -> 2, d slips 5 -> 6.
  const Ranking original = MakeRanking({Make("o1", 0.9, "H"), Make("o2", 0.8, "H"),
                                        Make("o3", 0.7, "H"), Make("o4", 0.6, "H"),
                                        Make("d", 0.5, "G"), Make("u", 0.4, "G")});
  const Ranking re = MakeRanking({Make("o1", 0.9, "H"), Make("u", 0.4, "G"),
                                  Make("o2", 0.8, "H"), Make("o3", 0.7, "H"),
                                  Make("o4", 0.6, "H"), Make("x", 0.1, "H")});
  EXPECT_FAIRRANK_ERROR(RankChangeMetrics(original, re), ErrorCode::kUnknownCandidate);
  const Ranking re2 = MakeRanking({Make("o1", 0.9, "H"), Make("u", 0.4, "G"),
                                   Make("o2", 0.8, "H"), Make("o3", 0.7, "H"),
                                   Make("o4", 0.6, "H"), Make("d", 0.5, "G")});
  const RankChange rc = RankChangeMetrics(original, re2);
  EXPECT_DOUBLE_EQ(rc.arc.at(SubgroupLabel("G")), (4.0 + 1.0) / 2.0);
}

TEST(RankChangeTest, BoostsOfPlusFourAndMinusTwoGiveThree) {
  // Original: a b c d e f g; g-members are e (rank 5) and b (rank 2).
  const Ranking original = FromLabels({"H", "G", "H", "H", "G", "H", "H"});
  // e: 5 -> 1 (+4); b: 2 -> 4 (-2).
  std::vector<Candidate> items = original.items;
  const Ranking re = MakeRanking({items[4], items[0], items[2], items[1], items[3]});
  const RankChange rc = RankChangeMetrics(original, re);
  EXPECT_EQ(rc.boosts[0].second, 4);
  EXPECT_EQ(rc.boosts[3].second, -2);
  EXPECT_DOUBLE_EQ(rc.arc.at(SubgroupLabel("G")), 3.0);
}

TEST(RankChangeTest, ArcHandCounts) {
  const Ranking original = FromLabels({"G", "H", "G", "H", "G", "H"});
  const auto& it = original.items;
  const Ranking a = MakeRanking({it[4], it[1], it[0], it[3], it[2]});
  const Ranking b = MakeRanking({it[4], it[1], it[2], it[3], it[0]});
  const RankChange ra = RankChangeMetrics(original, a);
  EXPECT_DOUBLE_EQ(ra.arc.at(SubgroupLabel("G")), (4.0 + 2.0 + 2.0) / 3.0);
  const RankChange rb = RankChangeMetrics(original, b);
  EXPECT_DOUBLE_EQ(rb.arc.at(SubgroupLabel("G")), (4.0 + 0.0 + 4.0) / 3.0);
}

TEST(EvaluateListTest, BaselineHasZeroMarcAndFullSkew) {
  const Ranking r = FromLabels({"X", "Y", "X", "Y"});
  const Distribution t = Even({"X", "Y"});
  const MetricsRecord m = EvaluateList(r, r, t, t, AttentionModel{});
  EXPECT_DOUBLE_EQ(m.marc, 0.0);
  EXPECT_EQ(m.k, 4u);
  EXPECT_DOUBLE_EQ(m.skew.at(SubgroupLabel("X")), 1.0);
  EXPECT_GE(m.ndkl, 0.0);
  EXPECT_GT(m.abr, 0.0);
  EXPECT_LE(m.abr, 1.0);
}

}  // namespace
}  // namespace fairrank
