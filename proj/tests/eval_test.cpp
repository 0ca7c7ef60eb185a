// Copyright 2026 The FairLabel Authors
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

#include <cmath>
#include <cstdint>
#include <vector>

#include <gtest/gtest.h>

#include "flc/eval.hpp"
#include "flc/flow.hpp"
#include "flc/lcal.hpp"
#include "flc/metrics.hpp"
#include "flc/report.hpp"
#include "flc/rng.hpp"
#include "oracles.hpp"

namespace flc {
namespace {

using testing::HalfAndHalf;
using testing::LineInstance;

TEST(NcraTest, LabelFrequenciesFollowAlpha) {
  CounterRng rng(51);
  const Instance inst = testing::RandomInstance(rng, 50, 10, 2, Objective::kKMedian);
  const std::vector<double> alpha = {0.2, 0.3, 0.5};
  std::vector<double> hits(3, 0.0);
  const int runs = 5000;
  for (int r = 0; r < runs; ++r) {
    const Assignment a = Ncra(inst, alpha, ReplicationSeed(3, static_cast<std::uint64_t>(r)));
    EXPECT_EQ(a.point_to_center, NearestCenter(inst).point_to_center);
    for (int L : a.center_to_label) hits[static_cast<std::size_t>(L)] += 1.0;
  }
  for (std::size_t L = 0; L < 3; ++L) {
    EXPECT_NEAR(hits[L] / (runs * 10.0), alpha[L], 0.01) << "label " << L;
  }
}

TEST(NcraTest, ZeroWeightLabelNeverDrawnAndBadAlphaRejected) {
  const Instance inst = LineInstance(true, Objective::kKMedian);
  const std::vector<double> alpha = {0.0, 1.0};
  for (std::uint64_t s = 0; s < 50; ++s) {
    EXPECT_EQ(Ncra(inst, alpha, s).center_to_label, (std::vector<int>{1, 1}));
  }
  EXPECT_THROW(Ncra(inst, std::vector<double>{0.5, 0.6}, 0), ParameterError);
  EXPECT_THROW(Ncra(inst, std::vector<double>{}, 0), ParameterError);
  EXPECT_THROW(Ncra(inst, std::vector<double>{1.5, -0.5}, 0), ParameterError);
}

TEST(NearestCenterTest, TiesGoToLowestIndex) {
  PointSet p;
  p.coordinates = Matrix(1, 1, {1.0});
  p.colors = {0};
  p.num_colors = 1;
  const Instance inst(p, Matrix(3, 1, {3.0, 0.0, 2.0}), Objective::kKMedian);
  EXPECT_EQ(NearestCenter(inst).point_to_center, (std::vector<int>{1}));
}

TEST(QuotaBaselineTest, LineSplitMatchesFairOptimum) {
  const Instance inst = LineInstance(false, Objective::kKMedian);
  const ColorBounds half{{Rational(1, 2), Rational(1, 2)}, {Rational(1, 2), Rational(1, 2)}};
  const SolveReport r = PerClusterQuotaBaseline(inst, std::vector<int>{0, 1}, half);
  EXPECT_EQ(r.status, SolveStatus::kHeuristic);
  EXPECT_EQ(r.path, "per_cluster_quota_heuristic");
  EXPECT_DOUBLE_EQ(r.objective, 8.0);
  EXPECT_EQ(r.violations->delta_color, 0.0);
}

TEST(QuotaBaselineTest, InfeasibleQuotasFallBackToNearest) {
  const Instance inst = LineInstance(false, Objective::kKMedian);
  const ColorBounds tight{{Rational(2, 3), Rational(0)}, {Rational(1), Rational(1)}};
  const SolveReport r = PerClusterQuotaBaseline(inst, std::vector<int>{0, 1}, tight);
  EXPECT_EQ(r.status, SolveStatus::kMethodInfeasible);
  EXPECT_DOUBLE_EQ(r.objective, 2.0);
  EXPECT_FALSE(r.note.empty());
}

TEST(QuotaBaselineTest, NeverBeatsExactSolver) {
  CounterRng rng(52);
  for (int trial = 0; trial < 40; ++trial) {
    const Instance inst = testing::RandomInstance(rng, 30, 4, 2, Objective::kKMedian);
    const std::vector<int> labels = {0, 1, 0, 1};
    std::vector<Rational> lo;
    std::vector<Rational> hi;
    for (int h = 0; h < 2; ++h) {
      lo.push_back(std::max(Rational(0), inst.PopulationRatio(h) - Rational(1, 5)));
      hi.push_back(std::min(Rational(1), inst.PopulationRatio(h) + Rational(1, 5)));
    }
    auto c = LabelConstraints::Unconstrained(2, 2, 30, 4);
    c.SetColorBounds(lo, hi);
    const SolveReport baseline = PerClusterQuotaBaseline(inst, labels, ColorBounds{lo, hi});
    if (baseline.status != SolveStatus::kHeuristic) continue;
    // every cluster within bounds implies every label within bounds
    EXPECT_EQ(baseline.violations->delta_color, 0.0);
    const SolveReport exact = SolveLcal(inst, labels, c);
    ASSERT_TRUE(exact.feasible());
    EXPECT_LE(exact.objective, baseline.objective + 1e-6);
  }
}

// The same problem as one min-cost flow over the full layered network.
std::optional<std::int64_t> QuotaByGenericFlow(const Instance& inst, const ColorBounds& b) {
  const Assignment nearest = NearestCenter(inst);
  Distribution sizes{std::vector<std::int64_t>(inst.k(), 0)};
  for (int c : nearest.point_to_center) ++sizes.per_label[static_cast<std::size_t>(c)];
  const auto k = static_cast<std::int64_t>(inst.k());
  auto c = LabelConstraints::Unconstrained(static_cast<int>(k), inst.num_colors(),
                                           static_cast<std::int64_t>(inst.n()), k);
  c.SetColorBounds(b.lower, b.upper);
  std::vector<int> identity(inst.k());
  for (std::size_t i = 0; i < inst.k(); ++i) identity[i] = static_cast<int>(i);
  const auto flow = MinCostMaxFlow(BuildLcalNetwork(inst, identity, c, sizes).network);
  if (!flow) return std::nullopt;
  return flow->total_cost;
}

TEST(QuotaBaselineTest, MatchesGenericFlow) {
  CounterRng rng(56);
  int feasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 5 + rng.Below(60);
    const std::size_t k = 1 + rng.Below(5);
    const int colors = 1 + static_cast<int>(rng.Below(3));
    const Instance inst = testing::RandomInstance(rng, n, k, colors,
                                                  static_cast<Objective>(rng.Below(3)),
                                                  rng.Below(2) == 0);
    ColorBounds b;
    const Rational slack[] = {Rational(0), Rational(1, 20), Rational(1, 5), Rational(1, 2)};
    const Rational s = slack[rng.Below(4)];
    for (int h = 0; h < colors; ++h) {
      b.lower.push_back(std::max(Rational(0), inst.PopulationRatio(h) - s));
      b.upper.push_back(std::min(Rational(1), inst.PopulationRatio(h) + s));
    }
    const std::vector<int> labels(k, 0);
    const SolveReport r = PerClusterQuotaBaseline(inst, labels, b);
    const auto expected = QuotaByGenericFlow(inst, b);
    ASSERT_EQ(r.status == SolveStatus::kHeuristic, expected.has_value()) << "trial " << trial;
    if (!expected) continue;
    ++feasible;
    EXPECT_EQ(r.scaled_objective, *expected) << "trial " << trial;
    std::vector<std::int64_t> before(k, 0);
    std::vector<std::int64_t> after(k, 0);
    for (int c : NearestCenter(inst).point_to_center) ++before[static_cast<std::size_t>(c)];
    for (int c : r.assignment.point_to_center) ++after[static_cast<std::size_t>(c)];
    EXPECT_EQ(before, after);
  }
  EXPECT_GT(feasible, 100);
}

TEST(BruteForceTest, LineSplit) {
  const Instance inst = LineInstance(false, Objective::kKMedian);
  const auto r = BruteForceLcal(inst, std::vector<int>{0, 1}, HalfAndHalf());
  ASSERT_TRUE(r.feasible);
  EXPECT_DOUBLE_EQ(r.objective, 8.0);
  EXPECT_EQ(r.scaled_objective, 8'000'000);
  const auto u = BruteForceLcul(inst, HalfAndHalf());
  EXPECT_DOUBLE_EQ(u.objective, 8.0);
  const auto kc = BruteForceLcal(inst.WithObjective(Objective::kKCenter),
                                 std::vector<int>{0, 1}, HalfAndHalf());
  EXPECT_DOUBLE_EQ(kc.objective, 3.5);
}

TEST(BruteForceTest, BudgetGuard) {
  CounterRng rng(53);
  const Instance inst = testing::RandomInstance(rng, 40, 6, 2, Objective::kKMedian);
  EXPECT_THROW(BruteForceLcul(inst, LabelConstraints::Unconstrained(2, 2, 40, 6)),
               ParameterError);
}

TEST(BruteForceTest, MatchesNaiveEnumeration) {
  CounterRng rng(54);
  for (int trial = 0; trial < 150; ++trial) {
    const auto objective = static_cast<Objective>(rng.Below(3));
    const std::size_t n = 3 + rng.Below(4);
    const std::size_t k = 2 + rng.Below(2);
    const int m = 1 + static_cast<int>(rng.Below(3));
    const Instance inst = testing::RandomInstance(rng, n, k, 2, objective, rng.Below(2) == 0);
    const auto labels = testing::RandomLabeling(rng, k, m);
    const auto c = testing::ConstraintsAroundWitness(rng, inst, labels, m);
    const auto naive = testing::NaiveLcal(inst, labels, c);
    const auto bf = BruteForceLcal(inst, labels, c);
    ASSERT_EQ(bf.feasible, naive.feasible) << "trial " << trial;
    if (!naive.feasible) continue;
    EXPECT_TRUE(testing::SatisfiesLabelConstraints(inst, bf.assignment, c));
    if (objective == Objective::kKCenter) {
      EXPECT_DOUBLE_EQ(bf.objective, naive.radius);
    } else {
      EXPECT_EQ(bf.scaled_objective, naive.scaled) << "trial " << trial;
    }
    const auto naive_u = testing::NaiveLcul(inst, c);
    const auto bf_u = BruteForceLcul(inst, c);
    ASSERT_EQ(bf_u.feasible, naive_u.feasible);
    if (objective != Objective::kKCenter) {
      EXPECT_EQ(bf_u.scaled_objective, naive_u.scaled);
    }
  }
}

TEST(ViolationsTest, ProportionSlackIsExactAtBoundary) {
  EXPECT_EQ(detail::ProportionSlack(3, 10, Rational(3, 10), Rational(1, 2)), 0.0);
  EXPECT_EQ(detail::ProportionSlack(5, 10, Rational(3, 10), Rational(1, 2)), 0.0);
  EXPECT_DOUBLE_EQ(detail::ProportionSlack(2, 10, Rational(3, 10), Rational(1, 2)), 0.1);
  EXPECT_DOUBLE_EQ(detail::ProportionSlack(7, 10, Rational(3, 10), Rational(1, 2)), 0.2);
  EXPECT_EQ(detail::ProportionSlack(0, 0, Rational(1, 2), Rational(1, 2)), 0.0);
}

TEST(ViolationsTest, LineSplitNearestAssignment) {
  const Instance inst = LineInstance(false, Objective::kKMedian);
  Assignment a = NearestCenter(inst);
  a.center_to_label = {0, 1};
  const ViolationReport v = Violations(inst, a, HalfAndHalf());
  // label 0 is all red against an exact 1/2
  EXPECT_DOUBLE_EQ(v.delta_color, 0.5);
  EXPECT_EQ(v.color_detail[0], (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(v.color_detail[1], (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(v.delta_points_per_label, 0.0);
  a.center_to_label = {1, 1};
  const ViolationReport w = Violations(inst, a, HalfAndHalf());
  EXPECT_DOUBLE_EQ(w.delta_points_per_label, 0.5);  // |4 - 2| / 4
  EXPECT_EQ(w.color_detail[0], (std::vector<double>{0.0, 0.0}));
}

TEST(ViolationsTest, ProportionalFormAgainstClp) {
  const Instance inst = LineInstance(false, Objective::kKMedian);
  const ClpSpec clp = ClpSpec::Uniform({Rational(1, 2), Rational(1, 2)},
                                       {Rational(1, 2), Rational(1, 2)}, Rational(1, 10),
                                       Rational(1, 10), Rational(0), Rational(0), Rational(0),
                                       Rational(0));
  Assignment a = NearestCenter(inst);
  a.center_to_label = {0, 0};
  const ViolationReport v = Violations(inst, a, clp);
  EXPECT_DOUBLE_EQ(v.delta_points_per_label, 0.5);
  EXPECT_DOUBLE_EQ(v.delta_centers_per_label, 0.5);
  EXPECT_DOUBLE_EQ(v.delta_color, 0.0);
}

TEST(ReportTest, JsonCarriesRequiredFields) {
  const Instance inst = LineInstance(false, Objective::kKMeans);
  const SolveReport r = SolveLcal(inst, std::vector<int>{0, 1}, HalfAndHalf());
  const nlohmann::json j = ToJson(r, Objective::kKMeans, true);
  EXPECT_EQ(j["status"], "optimal");
  EXPECT_EQ(j["path"], "flow");
  EXPECT_EQ(j["objective"]["kind"], "kmeans");
  EXPECT_DOUBLE_EQ(j["objective"]["root"].get<double>(),
                   std::sqrt(j["objective"]["value"].get<double>()));
  EXPECT_EQ(j["point_to_center"].size(), 4u);
  EXPECT_FALSE(ToJson(r, Objective::kKMeans, false).contains("point_to_center"));
  EXPECT_TRUE(j["violations"].is_object());
  EXPECT_TRUE(ToJson(InfeasibleReport("x"), Objective::kKMedian, false)["scaled_objective"]
                  .is_null());
}

TEST(ReportTest, SchemaValidation) {
  nlohmann::json ok = {{"schema", kReportSchema},
                       {"command", "solve-lcal"},
                       {"config", nlohmann::json::object()},
                       {"timing_ms", {{"total", 1.5}}}};
  EXPECT_TRUE(ValidateReportSchema(ok).empty());
  nlohmann::json bad = ok;
  bad.erase("timing_ms");
  EXPECT_EQ(ValidateReportSchema(bad).size(), 1u);
  bad = ok;
  bad["schema"] = "flc-report/0";
  EXPECT_EQ(ValidateReportSchema(bad).size(), 1u);
  bad = ok;
  bad["config"] = 3;
  EXPECT_EQ(ValidateReportSchema(bad).size(), 1u);
  EXPECT_EQ(ValidateReportSchema(nlohmann::json::array()).size(), 1u);
}

TEST(ReportTest, FormatRealRoundTrips) {
  CounterRng rng(55);
  for (int i = 0; i < 1000; ++i) {
    const double v = (rng.Uniform() - 0.5) * std::pow(10.0, static_cast<double>(rng.Below(20)) - 10);
    EXPECT_EQ(std::stod(FormatReal(v)), v);
  }
  EXPECT_EQ(FormatReal(0.5), "0.5");
}

}  // namespace
}  // namespace flc
