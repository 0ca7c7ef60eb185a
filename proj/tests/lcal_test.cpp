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

#include <cstdint>
#include <vector>

#include <gtest/gtest.h>

#include "flc/eval.hpp"
#include "flc/lcal.hpp"
#include "flc/metrics.hpp"
#include "flc/rng.hpp"
#include "oracles.hpp"

namespace flc {
namespace {

using testing::HalfAndHalf;
using testing::LineInstance;

const std::vector<int> kPosNeg = {0, 1};

std::vector<std::vector<std::int64_t>> Sizes(const std::vector<Distribution>& d) {
  std::vector<std::vector<std::int64_t>> out;
  for (const auto& x : d) out.push_back(x.per_label);
  return out;
}

void ExpectExactlyFeasible(const Instance& instance, const SolveReport& r,
                           const LabelConstraints& c) {
  ASSERT_TRUE(r.feasible());
  EXPECT_TRUE(testing::SatisfiesLabelConstraints(instance, r.assignment, c));
  ASSERT_TRUE(r.violations.has_value());
  EXPECT_EQ(r.violations->delta_color, 0.0);
  EXPECT_EQ(r.violations->delta_points_per_label, 0.0);
  EXPECT_DOUBLE_EQ(r.objective, ObjectiveValue(instance, r.assignment));
}

TEST(DistributionsTest, UnconstrainedTwoLabelsOverFourPoints) {
  const Instance inst = LineInstance(false, Objective::kKMedian);
  const auto c = LabelConstraints::Unconstrained(2, 2, 4, 2);
  const auto d = EnumerateDistributions(4, c, inst.color_counts());
  EXPECT_EQ(Sizes(d), (std::vector<std::vector<std::int64_t>>{
                          {0, 4}, {1, 3}, {2, 2}, {3, 1}, {4, 0}}));
}

TEST(DistributionsTest, HalfBoundsKeepEvenSizes) {
  const Instance inst = LineInstance(false, Objective::kKMedian);
  auto c = LabelConstraints::Unconstrained(2, 2, 4, 2);
  c.SetColorBounds({Rational(1, 2), Rational(1, 2)}, {Rational(1, 2), Rational(1, 2)});
  const auto d = EnumerateDistributions(4, c, inst.color_counts());
  EXPECT_EQ(Sizes(d), (std::vector<std::vector<std::int64_t>>{{0, 4}, {2, 2}, {4, 0}}));
}

TEST(DistributionsTest, RespectsColorSupply) {
  // Label 0 needs at least 3/4 red but only 2 of 4 points are red.
  auto c = LabelConstraints::Unconstrained(2, 2, 4, 2);
  c.color_lower[0] = {Rational(3, 4), Rational(0)};
  const std::vector<std::int64_t> counts = {2, 2};
  for (const auto& d : EnumerateDistributions(4, c, counts)) {
    EXPECT_LE(d.per_label[0], 2);
  }
}

TEST(DistributionsTest, ThreeLabelsSumToN) {
  auto c = LabelConstraints::Unconstrained(3, 1, 6, 3);
  const std::vector<std::int64_t> counts = {6};
  const auto d = EnumerateDistributions(6, c, counts);
  EXPECT_EQ(d.size(), 28u);  // C(8, 2)
  for (const auto& x : d) EXPECT_EQ(x.per_label[0] + x.per_label[1] + x.per_label[2], 6);
}

TEST(LcalNetworkTest, LayerSizes) {
  const Instance inst = LineInstance(false, Objective::kKMedian);
  const auto net =
      BuildLcalNetwork(inst, kPosNeg, HalfAndHalf(), Distribution{{2, 2}});
  // source, 4 points, 2x2 center copies, 2x2 label colors, 2 labels, sink
  EXPECT_EQ(net.network.node_count, 16);
  EXPECT_EQ(net.point_arc_begin.size(), 5u);
  EXPECT_EQ(net.arc_center.size(), 8u);  // each point reaches its color's copy of both centers
}

TEST(LineSplitTest, FlowSolverPicksOneOfEachColorNearPositiveCenter) {
  const Instance inst = LineInstance(false, Objective::kKMedian);
  const SolveReport r = SolveLcal(inst, kPosNeg, HalfAndHalf());
  EXPECT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_EQ(r.path, "flow");
  EXPECT_DOUBLE_EQ(r.objective, 8.0);
  EXPECT_EQ(r.scaled_objective, 8'000'000);
  EXPECT_EQ(r.assignment.point_to_center, (std::vector<int>{0, 1, 0, 1}));
  EXPECT_EQ(r.distribution, (std::vector<std::int64_t>{2, 2}));
  ExpectExactlyFeasible(inst, r, HalfAndHalf());
}

TEST(LineSplitTest, TwoLabelSolversAgree) {
  const Instance inst = LineInstance(false, Objective::kKMedian);
  const SolveReport sweep = SolveTwoLabelSweep(inst, kPosNeg, HalfAndHalf());
  EXPECT_EQ(sweep.path, "two_label_sweep");
  EXPECT_DOUBLE_EQ(sweep.objective, 8.0);
  EXPECT_EQ(sweep.assignment.point_to_center, (std::vector<int>{0, 1, 0, 1}));

  const auto exact = ExactPreservationConstraints(inst, 2);
  const SolveReport greedy = SolveTwoLabelExact(inst, kPosNeg, exact);
  EXPECT_EQ(greedy.path, "two_label_exact");
  EXPECT_DOUBLE_EQ(greedy.objective, 8.0);
  EXPECT_EQ(greedy.distribution, (std::vector<std::int64_t>{2, 2}));
  EXPECT_EQ(SolveLcalAuto(inst, kPosNeg, exact).path, "two_label_exact");
  EXPECT_EQ(SolveLcalAuto(inst, kPosNeg, HalfAndHalf()).path, "two_label_sweep");
}

TEST(LineSplitTest, KCenterRadius) {
  const Instance inst = LineInstance(false, Objective::kKCenter);
  const SolveReport flow = SolveLcal(inst, kPosNeg, HalfAndHalf());
  EXPECT_EQ(flow.path, "kcenter_flow");
  EXPECT_DOUBLE_EQ(flow.objective, 3.5);
  const SolveReport two = SolveTwoLabelKCenter(inst, kPosNeg, HalfAndHalf());
  EXPECT_EQ(two.path, "two_label_kcenter");
  EXPECT_DOUBLE_EQ(two.objective, 3.5);
  ExpectExactlyFeasible(inst, two, HalfAndHalf());
}

TEST(LineSplitTest, DropsSortedPerColor) {
  const Instance inst = LineInstance(false, Objective::kKMedian);
  const DropTable t = ComputeDrops(inst, kPosNeg);
  ASSERT_EQ(t.by_color.size(), 2u);
  EXPECT_EQ(t.by_color[0][0].point, 0);
  EXPECT_DOUBLE_EQ(t.by_color[0][0].drop, 4.0);
  EXPECT_EQ(t.by_color[0][1].point, 1);
  EXPECT_DOUBLE_EQ(t.by_color[0][1].drop, 3.0);
  EXPECT_EQ(t.by_color[1][0].point, 2);
  EXPECT_DOUBLE_EQ(t.by_color[1][0].drop, -3.0);
  EXPECT_EQ(t.by_color[1][1].point, 3);
  EXPECT_EQ(t.by_color[1][1].scaled_drop, -4'000'000);
  EXPECT_THROW(ComputeDrops(inst, std::vector<int>{0, 0}), ParameterError);
}

TEST(LineSplitTest, TradeoffCurve) {
  const Instance inst = LineInstance(false, Objective::kKMedian);
  const auto curve = TradeoffCurve(inst, kPosNeg);
  ASSERT_EQ(curve.size(), 3u);
  EXPECT_EQ(curve[0].positive_count, 0);
  EXPECT_DOUBLE_EQ(curve[0].cost, 9.0);
  EXPECT_EQ(curve[1].positive_count, 2);
  EXPECT_DOUBLE_EQ(curve[1].cost, 8.0);
  EXPECT_EQ(curve[2].positive_count, 4);
  EXPECT_DOUBLE_EQ(curve[2].cost, 9.0);
  EXPECT_EQ(curve[1].scaled_cost, 8'000'000);
}

TEST(LineSplitTest, PriceOfFairnessAgainstNearest) {
  const Instance inst = LineInstance(false, Objective::kKMedian);
  const double blind = ObjectiveValue(inst, NearestCenter(inst));
  EXPECT_DOUBLE_EQ(blind, 2.0);
  const SolveReport r = SolveLcal(inst, kPosNeg, HalfAndHalf());
  EXPECT_EQ(PriceOfFairness(r.objective, blind), 4.0);
  EXPECT_FALSE(PriceOfFairness(1.0, 0.0).has_value());
}

TEST(LineAlternatingTest, NearestAssignmentIsAlreadyFair) {
  const Instance inst = LineInstance(true, Objective::kKMedian);
  const SolveReport r = SolveLcal(inst, kPosNeg, HalfAndHalf());
  EXPECT_DOUBLE_EQ(r.objective, 2.0);
  EXPECT_EQ(r.assignment.point_to_center, (std::vector<int>{0, 0, 1, 1}));
  EXPECT_DOUBLE_EQ(SolveLcal(inst.WithObjective(Objective::kKCenter), kPosNeg,
                             HalfAndHalf()).objective, 0.5);
  EXPECT_DOUBLE_EQ(SolveLcal(inst.WithObjective(Objective::kKMeans), kPosNeg,
                             HalfAndHalf()).objective, 1.0);
}

TEST(LcalTest, InfeasibleSizesReported) {
  const Instance inst = LineInstance(false, Objective::kKMedian);
  LabelConstraints c = HalfAndHalf();
  c.size_lower = {3, 1};
  c.size_upper = {3, 1};
  EXPECT_EQ(SolveLcal(inst, kPosNeg, c).status, SolveStatus::kInfeasible);
  EXPECT_EQ(SolveTwoLabelSweep(inst, kPosNeg, c).status, SolveStatus::kInfeasible);
  EXPECT_EQ(SolveLcal(inst.WithObjective(Objective::kKCenter), kPosNeg, c).status,
            SolveStatus::kInfeasible);
  EXPECT_EQ(SolveTwoLabelKCenter(inst.WithObjective(Objective::kKCenter), kPosNeg, c).status,
            SolveStatus::kInfeasible);
}

TEST(LcalTest, LabelWithoutCenterCannotReceivePoints) {
  const Instance inst = LineInstance(false, Objective::kKMedian);
  const std::vector<int> both_negative = {1, 1};
  EXPECT_EQ(SolveLcal(inst, both_negative, HalfAndHalf()).status, SolveStatus::kInfeasible);
  EXPECT_EQ(SolveTwoLabelSweep(inst, both_negative, HalfAndHalf()).status,
            SolveStatus::kInfeasible);
  auto c = LabelConstraints::Unconstrained(2, 2, 4, 2);
  const SolveReport r = SolveLcalAuto(inst, both_negative, c);
  EXPECT_TRUE(r.feasible());
  EXPECT_DOUBLE_EQ(r.objective, 2.0);
}

TEST(LcalTest, RejectsBadInputs) {
  const Instance inst = LineInstance(false, Objective::kKMedian);
  EXPECT_THROW(SolveLcal(inst, std::vector<int>{0}, HalfAndHalf()), std::exception);
  EXPECT_THROW(SolveLcal(inst, std::vector<int>{0, 2}, HalfAndHalf()), std::exception);
  LcalOptions options;
  options.max_labels = 2;
  const auto c = LabelConstraints::Unconstrained(3, 2, 4, 2);
  EXPECT_THROW(SolveLcal(inst, std::vector<int>{0, 2}, c, options), ParameterError);
  EXPECT_THROW(SolveTwoLabelExact(inst, kPosNeg, HalfAndHalf()), ParameterError);
  EXPECT_THROW(SolveTwoLabelExact(inst.WithObjective(Objective::kKCenter), kPosNeg,
                                  ExactPreservationConstraints(inst, 2)),
               ParameterError);
}

TEST(AtomicUnitTest, GcdOfColorCounts) {
  const std::vector<std::int64_t> counts = {6, 9};
  const AtomicUnit u = ComputeAtomicUnit(counts);
  EXPECT_EQ(u.units, 3);
  EXPECT_EQ(u.n_fair, 5);
  EXPECT_EQ(u.per_color, (std::vector<std::int64_t>{2, 3}));
  const std::vector<std::int64_t> coprime = {4, 7};
  EXPECT_EQ(ComputeAtomicUnit(coprime).units, 1);
}

// Random small instances against exhaustive enumeration of all k^n
// assignments.
struct Case {
  Instance instance;
  std::vector<int> labels;
  LabelConstraints constraints;
};

Case RandomCase(CounterRng& rng, int m, Objective objective) {
  const std::size_t n = 3 + rng.Below(4);
  const std::size_t k = 2 + rng.Below(2);
  const int colors = 1 + static_cast<int>(rng.Below(2));
  Instance inst = testing::RandomInstance(rng, n, k, colors, objective, rng.Below(2) == 0);
  std::vector<int> labels = testing::RandomLabeling(rng, k, m);
  LabelConstraints c = rng.Below(4) == 0
                           ? LabelConstraints::Unconstrained(
                                 m, colors, static_cast<std::int64_t>(n),
                                 static_cast<std::int64_t>(k))
                           : testing::ConstraintsAroundWitness(rng, inst, labels, m);
  if (rng.Below(5) == 0) {
    // sometimes infeasible: demand every label be at least 3/4 one color
    for (std::size_t L = 0; L < c.color_lower.size(); ++L) {
      c.color_lower[L][0] = Rational(3, 4);
      c.color_upper[L][0] = Rational(1);
    }
  }
  return {std::move(inst), std::move(labels), std::move(c)};
}

template <typename Solve>
void CompareWithNaive(std::uint64_t seed, int m, Objective objective, int trials,
                      Solve&& solve) {
  CounterRng rng(seed);
  int feasible = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const Case tc = RandomCase(rng, m, objective);
    const auto naive = testing::NaiveLcal(tc.instance, tc.labels, tc.constraints);
    const SolveReport r = solve(tc);
    ASSERT_EQ(r.feasible(), naive.feasible) << "trial " << trial;
    if (!naive.feasible) continue;
    ++feasible;
    ExpectExactlyFeasible(tc.instance, r, tc.constraints);
    if (objective == Objective::kKCenter) {
      EXPECT_DOUBLE_EQ(r.objective, naive.radius) << "trial " << trial;
    } else {
      EXPECT_NEAR(r.objective, static_cast<double>(naive.scaled) / kDefaultCostScale, 1e-5)
          << "trial " << trial;
    }
  }
  EXPECT_GT(feasible, trials / 3);
}

TEST(LcalPropertyTest, FlowMatchesNaiveKMedian) {
  CompareWithNaive(1, 2, Objective::kKMedian, 150, [](const Case& c) {
    return SolveLcal(c.instance, c.labels, c.constraints);
  });
}

TEST(LcalPropertyTest, FlowMatchesNaiveKMeansThreeLabels) {
  CompareWithNaive(2, 3, Objective::kKMeans, 100, [](const Case& c) {
    return SolveLcal(c.instance, c.labels, c.constraints);
  });
}

TEST(LcalPropertyTest, FlowMatchesNaiveKCenter) {
  CompareWithNaive(3, 2, Objective::kKCenter, 150, [](const Case& c) {
    return SolveLcal(c.instance, c.labels, c.constraints);
  });
}

TEST(LcalPropertyTest, SweepMatchesNaive) {
  CompareWithNaive(4, 2, Objective::kKMedian, 200, [](const Case& c) {
    return SolveTwoLabelSweep(c.instance, c.labels, c.constraints);
  });
  CompareWithNaive(5, 2, Objective::kKMeans, 200, [](const Case& c) {
    return SolveTwoLabelSweep(c.instance, c.labels, c.constraints);
  });
}

TEST(LcalPropertyTest, TwoLabelKCenterMatchesNaive) {
  CompareWithNaive(6, 2, Objective::kKCenter, 200, [](const Case& c) {
    return SolveTwoLabelKCenter(c.instance, c.labels, c.constraints);
  });
}

TEST(LcalPropertyTest, AutoMatchesNaive) {
  for (int m = 1; m <= 3; ++m) {
    CompareWithNaive(7 + static_cast<std::uint64_t>(m), m, Objective::kKMedian, 80,
                     [](const Case& c) {
                       return SolveLcalAuto(c.instance, c.labels, c.constraints);
                     });
  }
}

TEST(LcalPropertyTest, GreedyMatchesNaiveUnderExactPreservation) {
  CounterRng rng(20);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 4 + rng.Below(3);
    const std::size_t k = 2 + rng.Below(2);
    const Instance inst = testing::RandomInstance(rng, n, k, 2, Objective::kKMedian,
                                                  rng.Below(2) == 0);
    std::vector<int> labels = testing::RandomLabeling(rng, k, 2);
    labels[0] = 0;
    labels[1] = 1;
    LabelConstraints c = ExactPreservationConstraints(inst, 2);
    c.size_lower[0] = static_cast<std::int64_t>(rng.Below(n + 1));
    c.size_upper[0] = std::min<std::int64_t>(static_cast<std::int64_t>(n),
                                             c.size_lower[0] + static_cast<std::int64_t>(rng.Below(n)));
    const auto naive = testing::NaiveLcal(inst, labels, c);
    const SolveReport r = SolveTwoLabelExact(inst, labels, c);
    ASSERT_EQ(r.feasible(), naive.feasible) << "trial " << trial;
    if (!naive.feasible) continue;
    ++checked;
    ExpectExactlyFeasible(inst, r, c);
    EXPECT_EQ(r.scaled_objective, naive.scaled) << "trial " << trial;
  }
  EXPECT_GT(checked, 60);
}

TEST(LcalPropertyTest, TradeoffCurveMatchesNaivePerSize) {
  CounterRng rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    const Instance inst = testing::RandomInstance(rng, 6, 3, 2, Objective::kKMeans);
    const std::vector<int> labels = {0, 1, static_cast<int>(rng.Below(2))};
    for (const TradeoffPoint& p : TradeoffCurve(inst, labels)) {
      LabelConstraints c = ExactPreservationConstraints(inst, 2);
      c.size_lower = {p.positive_count, 6 - p.positive_count};
      c.size_upper = c.size_lower;
      const auto naive = testing::NaiveLcal(inst, labels, c);
      ASSERT_TRUE(naive.feasible);
      EXPECT_EQ(p.scaled_cost, naive.scaled) << "trial " << trial;
    }
  }
}

TEST(LcalPropertyTest, LooseningConstraintsNeverHurts) {
  CounterRng rng(22);
  for (int trial = 0; trial < 150; ++trial) {
    Case tc = RandomCase(rng, 2, Objective::kKMedian);
    const SolveReport tight = SolveLcal(tc.instance, tc.labels, tc.constraints);
    if (!tight.feasible()) continue;
    LabelConstraints loose = tc.constraints;
    for (auto& row : loose.color_lower) {
      for (auto& v : row) v = std::max(Rational(0), v - Rational(1, 10));
    }
    for (auto& v : loose.size_upper) v = static_cast<std::int64_t>(tc.instance.n());
    const SolveReport relaxed = SolveLcal(tc.instance, tc.labels, loose);
    ASSERT_TRUE(relaxed.feasible());
    EXPECT_LE(*relaxed.scaled_objective, *tight.scaled_objective);
    EXPECT_GE(relaxed.objective,
              ObjectiveValue(tc.instance, NearestCenter(tc.instance)) - 1e-9);
  }
}

TEST(LcalPropertyTest, FlowAndSweepAgreeOnLargerInstances) {
  CounterRng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Instance inst = testing::RandomInstance(rng, 40, 5, 3, Objective::kKMedian);
    const std::vector<int> labels = {0, 1, 0, 1, static_cast<int>(rng.Below(2))};
    auto c = LabelConstraints::Unconstrained(2, 3, 40, 5);
    std::vector<Rational> lo;
    std::vector<Rational> hi;
    for (int h = 0; h < 3; ++h) {
      lo.push_back(std::max(Rational(0), inst.PopulationRatio(h) - Rational(1, 10)));
      hi.push_back(std::min(Rational(1), inst.PopulationRatio(h) + Rational(1, 10)));
    }
    c.SetColorBounds(lo, hi);
    c.size_lower = {10, 10};
    const SolveReport flow = SolveLcal(inst, labels, c);
    const SolveReport sweep = SolveTwoLabelSweep(inst, labels, c);
    ASSERT_EQ(flow.feasible(), sweep.feasible());
    if (!flow.feasible()) continue;
    EXPECT_NEAR(flow.objective, sweep.objective, 1e-4);
    ExpectExactlyFeasible(inst, sweep, c);
  }
}

}  // namespace
}  // namespace flc
