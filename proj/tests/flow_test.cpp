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
#include <optional>

#include <gtest/gtest.h>

#include "flc/flow.hpp"
#include "flc/rng.hpp"
#include "oracles.hpp"

namespace flc {
namespace {

// s -> a -> t and s -> b -> t, unit capacities, unit costs, plus a free a -> b.
FlowNetwork Diamond() {
  FlowNetwork net;
  const int s = net.AddNode();
  const int a = net.AddNode();
  const int b = net.AddNode();
  const int t = net.AddNode();
  net.source = s;
  net.sink = t;
  net.AddArc(s, a, 1, 1);
  net.AddArc(s, b, 1, 1);
  net.AddArc(a, t, 1, 1);
  net.AddArc(b, t, 1, 1);
  net.AddArc(a, b, 1, 0);
  return net;
}

void ExpectConserved(const FlowNetwork& net, const FlowSolution& sol) {
  std::vector<std::int64_t> balance(static_cast<std::size_t>(net.node_count), 0);
  std::int64_t cost = 0;
  for (std::size_t e = 0; e < net.arcs.size(); ++e) {
    const FlowArc& a = net.arcs[e];
    ASSERT_GE(sol.arc_flow[e], a.lower);
    ASSERT_LE(sol.arc_flow[e], a.capacity);
    balance[static_cast<std::size_t>(a.from)] -= sol.arc_flow[e];
    balance[static_cast<std::size_t>(a.to)] += sol.arc_flow[e];
    cost += sol.arc_flow[e] * a.cost;
  }
  for (int v = 0; v < net.node_count; ++v) {
    if (v == net.source || v == net.sink) continue;
    EXPECT_EQ(balance[static_cast<std::size_t>(v)], 0) << "node " << v;
  }
  EXPECT_EQ(balance[static_cast<std::size_t>(net.sink)], sol.flow_value);
  EXPECT_EQ(cost, sol.total_cost);
}

TEST(MinCostMaxFlowTest, Diamond) {
  const FlowNetwork net = Diamond();
  const auto sol = MinCostMaxFlow(net);
  ASSERT_TRUE(sol.has_value());
  EXPECT_EQ(sol->flow_value, 2);
  EXPECT_EQ(sol->total_cost, 4);
  ExpectConserved(net, *sol);
}

TEST(MinCostMaxFlowTest, PrefersCheaperParallelArc) {
  FlowNetwork net;
  net.AddNode();
  net.AddNode();
  net.source = 0;
  net.sink = 1;
  net.AddArc(0, 1, 2, 5);
  net.AddArc(0, 1, 1, 1);
  const auto sol = MinCostMaxFlow(net);
  ASSERT_TRUE(sol.has_value());
  EXPECT_EQ(sol->flow_value, 3);
  EXPECT_EQ(sol->total_cost, 11);
}

TEST(MinCostMaxFlowTest, LowerBoundForcesExpensivePath) {
  FlowNetwork net = Diamond();
  net.arcs[4] = FlowArc{1, 2, 1, 1, 0};  // a -> b must carry one unit
  const auto sol = MinCostMaxFlow(net);
  ASSERT_TRUE(sol.has_value());
  EXPECT_EQ(sol->arc_flow[4], 1);
  EXPECT_EQ(sol->flow_value, 1);  // b -> t is the only way out of b
  ExpectConserved(net, *sol);
}

TEST(MinCostMaxFlowTest, NodeDemandForcesFlowThroughNode) {
  FlowNetwork net;
  const int s = net.AddNode();
  const int t = net.AddNode();
  const int mid = net.AddNode(2);
  net.source = s;
  net.sink = t;
  net.AddArc(s, t, 5, 0);
  net.AddArc(s, mid, 2, 3);
  net.AddArc(mid, t, 2, 3);
  const auto sol = MinCostMaxFlow(net);
  ASSERT_TRUE(sol.has_value());
  EXPECT_EQ(sol->flow_value, 7);
  EXPECT_EQ(sol->total_cost, 12);
}

TEST(MinCostMaxFlowTest, UnmeetableDemandIsInfeasible) {
  FlowNetwork net;
  const int s = net.AddNode();
  const int t = net.AddNode();
  const int mid = net.AddNode(3);
  net.source = s;
  net.sink = t;
  net.AddArc(s, mid, 2, 0);
  net.AddArc(mid, t, 5, 0);
  EXPECT_FALSE(MinCostMaxFlow(net).has_value());
  EXPECT_FALSE(MaxFlowFeasible(net));
  net.node_demand[2] = 2;
  EXPECT_TRUE(MaxFlowFeasible(net));
}

TEST(MinCostMaxFlowTest, LowerBoundWithoutOutletIsInfeasible) {
  FlowNetwork net;
  const int s = net.AddNode();
  const int t = net.AddNode();
  const int dead = net.AddNode();
  net.source = s;
  net.sink = t;
  net.AddArc(s, t, 1, 0);
  net.AddArc(s, dead, 1, 0, 1);
  EXPECT_FALSE(MinCostMaxFlow(net).has_value());
}

TEST(MinCostMaxFlowTest, EmptyNetworkHasZeroFlow) {
  FlowNetwork net;
  net.AddNode();
  net.AddNode();
  net.source = 0;
  net.sink = 1;
  const auto sol = MinCostMaxFlow(net);
  ASSERT_TRUE(sol.has_value());
  EXPECT_EQ(sol->flow_value, 0);
  EXPECT_EQ(sol->total_cost, 0);
}

TEST(FlowNetworkTest, ValidationRejectsMalformedNetworks) {
  FlowNetwork net = Diamond();
  net.arcs[0] = FlowArc{0, 1, 3, 2, 0};
  EXPECT_THROW(MinCostMaxFlow(net), StructuralError);
  net = Diamond();
  net.arcs[0].cost = -1;
  EXPECT_THROW(MinCostMaxFlow(net), StructuralError);
  net = Diamond();
  net.arcs[0].to = 9;
  EXPECT_THROW(MinCostMaxFlow(net), StructuralError);
  net = Diamond();
  net.sink = net.source;
  EXPECT_THROW(MinCostMaxFlow(net), StructuralError);
  net = Diamond();
  net.node_demand = {0, 1};
  EXPECT_THROW(MinCostMaxFlow(net), StructuralError);
  FlowNetwork single;
  single.AddNode();
  EXPECT_THROW(MinCostMaxFlow(single), StructuralError);
}

TEST(FlowNetworkTest, AddNodeKeepsDemandVectorAligned) {
  FlowNetwork net;
  net.AddNode();
  net.AddNode();
  EXPECT_TRUE(net.node_demand.empty());
  net.AddNode(4);
  net.AddNode();
  ASSERT_EQ(net.node_demand.size(), 4u);
  EXPECT_EQ(net.demand(2), 4);
  EXPECT_EQ(net.demand(3), 0);
}

void CompareWithExhaustive(std::uint64_t seed, bool with_bounds, int trials) {
  CounterRng rng(seed);
  int feasible = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const FlowNetwork net = testing::RandomFlowNetwork(rng, 6, 7, with_bounds);
    const auto expected = testing::ExhaustiveFlow(net);
    const auto got = MinCostMaxFlow(net);
    ASSERT_EQ(expected.has_value(), got.has_value()) << "trial " << trial;
    if (!got) continue;
    ++feasible;
    EXPECT_EQ(got->flow_value, expected->value) << "trial " << trial;
    EXPECT_EQ(got->total_cost, expected->cost) << "trial " << trial;
    ExpectConserved(net, *got);
  }
  EXPECT_GT(feasible, trials / 4);
}

TEST(MinCostMaxFlowTest, MatchesExhaustiveSearch) { CompareWithExhaustive(101, false, 300); }

TEST(MinCostMaxFlowTest, MatchesExhaustiveSearchWithBoundsAndDemands) {
  CompareWithExhaustive(202, true, 300);
}

TEST(MinCostMaxFlowTest, ScalingCostsScalesOptimum) {
  CounterRng rng(303);
  for (int trial = 0; trial < 100; ++trial) {
    FlowNetwork net = testing::RandomFlowNetwork(rng, 7, 9, true);
    const auto base = MinCostMaxFlow(net);
    for (FlowArc& a : net.arcs) a.cost *= 3;
    const auto scaled = MinCostMaxFlow(net);
    ASSERT_EQ(base.has_value(), scaled.has_value());
    if (!base) continue;
    EXPECT_EQ(scaled->flow_value, base->flow_value);
    EXPECT_EQ(scaled->total_cost, 3 * base->total_cost);
  }
}

}  // namespace
}  // namespace flc
