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

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "flc/model.hpp"

namespace flc {

struct FlowArc {
  int from = 0;
  int to = 0;
  std::int64_t lower = 0;
  std::int64_t capacity = 0;
  std::int64_t cost = 0;
};

// Network with arc lower bounds and per-node demands. A node demand is the
// minimum total inflow that must pass through the node.
struct FlowNetwork {
  int node_count = 0;
  std::vector<FlowArc> arcs;
  int source = 0;
  int sink = 0;
  std::vector<std::int64_t> node_demand;  // empty, or one entry per node

  int AddNode(std::int64_t demand = 0) {
    if (!node_demand.empty() || demand != 0) {
      node_demand.resize(static_cast<std::size_t>(node_count), 0);
      node_demand.push_back(demand);
    }
    return node_count++;
  }

  int AddArc(int from, int to, std::int64_t capacity, std::int64_t cost = 0,
             std::int64_t lower = 0) {
    arcs.push_back({from, to, lower, capacity, cost});
    return static_cast<int>(arcs.size()) - 1;
  }

  std::int64_t demand(int node) const {
    return node_demand.empty() ? 0
                               : node_demand[static_cast<std::size_t>(node)];
  }

  void Validate() const {
    if (node_count < 2) throw StructuralError("flow: need at least two nodes");
    auto in_range = [&](int v) { return v >= 0 && v < node_count; };
    if (!in_range(source) || !in_range(sink) || source == sink) {
      throw StructuralError("flow: invalid source/sink");
    }
    if (!node_demand.empty() &&
        node_demand.size() != static_cast<std::size_t>(node_count)) {
      throw StructuralError("flow: node demand vector has wrong size");
    }
    for (std::int64_t d : node_demand) {
      if (d < 0) throw StructuralError("flow: negative node demand");
    }
    for (const FlowArc& a : arcs) {
      if (!in_range(a.from) || !in_range(a.to)) {
        throw StructuralError("flow: arc endpoint out of range");
      }
      if (a.lower < 0 || a.capacity < 0 || a.lower > a.capacity) {
        throw StructuralError("flow: arc needs 0 <= lower <= capacity");
      }
      if (a.cost < 0) throw StructuralError("flow: negative arc cost");
    }
  }
};

struct FlowSolution {
  std::vector<std::int64_t> arc_flow;  // per original arc, includes lower bound
  std::int64_t total_cost = 0;
  std::int64_t flow_value = 0;
};

namespace detail {

// Residual graph driven by successive shortest paths with node potentials.
// Edges 2e and 2e+1 are a forward/backward pair.
class ResidualGraph {
 public:
  explicit ResidualGraph(int nodes) : nodes_(nodes) {}

  int AddEdge(int from, int to, std::int64_t cap, std::int64_t cost) {
    const int id = static_cast<int>(to_.size());
    from_.push_back(from);
    to_.push_back(to);
    cap_.push_back(cap);
    cost_.push_back(cost);
    from_.push_back(to);
    to_.push_back(from);
    cap_.push_back(0);
    cost_.push_back(-cost);
    return id;
  }

  void Finalize() {
    // Adjacency in increasing edge index order.
    offsets_.assign(static_cast<std::size_t>(nodes_) + 1, 0);
    for (int f : from_) ++offsets_[static_cast<std::size_t>(f) + 1];
    for (int v = 0; v < nodes_; ++v) {
      offsets_[static_cast<std::size_t>(v) + 1] +=
          offsets_[static_cast<std::size_t>(v)];
    }
    adjacency_.assign(from_.size(), 0);
    std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
    for (int e = 0; e < static_cast<int>(from_.size()); ++e) {
      adjacency_[static_cast<std::size_t>(
          fill[static_cast<std::size_t>(from_[static_cast<std::size_t>(e)])]++)] = e;
    }
    potential_.assign(static_cast<std::size_t>(nodes_), 0);
    dist_.assign(static_cast<std::size_t>(nodes_), kInf);
    pred_.assign(static_cast<std::size_t>(nodes_), -1);
    settled_.assign(static_cast<std::size_t>(nodes_), false);
  }

  // Removes an edge pair from further augmentation, keeping its flow.
  void Freeze(int edge) {
    cap_[static_cast<std::size_t>(edge)] = 0;
    cap_[static_cast<std::size_t>(edge ^ 1)] = 0;
  }

  std::int64_t flow(int edge) const {
    return cap_[static_cast<std::size_t>(edge ^ 1)];
  }

  // Augments from s to t along shortest paths until no path remains.
  // Returns (flow pushed, cost of that flow).
  std::pair<std::int64_t, std::int64_t> Augment(int s, int t) {
    std::int64_t pushed = 0;
    std::int64_t cost = 0;
    while (ShortestPaths(s, t)) {
      std::int64_t delta = std::numeric_limits<std::int64_t>::max();
      for (int v = t; v != s;) {
        const int e = pred_[static_cast<std::size_t>(v)];
        delta = std::min(delta, cap_[static_cast<std::size_t>(e)]);
        v = from_[static_cast<std::size_t>(e)];
      }
      for (int v = t; v != s;) {
        const auto e = static_cast<std::size_t>(pred_[static_cast<std::size_t>(v)]);
        cap_[e] -= delta;
        cap_[e ^ 1] += delta;
        cost += delta * cost_[e];
        v = from_[e];
      }
      pushed += delta;
    }
    return {pushed, cost};
  }

 private:
  static constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

  // Dijkstra on reduced costs, stopped once t is settled. Among equal-length
  // paths the predecessor edge with the lowest index wins. Updates potentials.
  bool ShortestPaths(int s, int t) {
    std::fill(dist_.begin(), dist_.end(), kInf);
    std::fill(pred_.begin(), pred_.end(), -1);
    std::fill(settled_.begin(), settled_.end(), false);
    using Entry = std::pair<std::int64_t, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    dist_[static_cast<std::size_t>(s)] = 0;
    heap.emplace(0, s);
    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      if (settled_[static_cast<std::size_t>(u)]) continue;
      settled_[static_cast<std::size_t>(u)] = true;
      if (u == t) break;
      const std::int64_t pu = potential_[static_cast<std::size_t>(u)];
      for (int idx = offsets_[static_cast<std::size_t>(u)];
           idx < offsets_[static_cast<std::size_t>(u) + 1]; ++idx) {
        const auto e = static_cast<std::size_t>(adjacency_[static_cast<std::size_t>(idx)]);
        if (cap_[e] <= 0) continue;
        const auto v = static_cast<std::size_t>(to_[e]);
        if (settled_[v]) continue;
        const std::int64_t nd = d + cost_[e] + pu - potential_[v];
        if (nd < dist_[v]) {
          dist_[v] = nd;
          pred_[v] = static_cast<int>(e);
          heap.emplace(nd, static_cast<int>(v));
        } else if (nd == dist_[v] && static_cast<int>(e) < pred_[v]) {
          pred_[v] = static_cast<int>(e);
        }
      }
    }
    const std::int64_t dt = dist_[static_cast<std::size_t>(t)];
    if (dt < kInf) {
      // Unsettled nodes are at least dt away.
      for (std::size_t v = 0; v < dist_.size(); ++v) {
        potential_[v] += settled_[v] ? dist_[v] : dt;
      }
      return true;
    }
    std::int64_t reach = 0;
    for (std::int64_t dv : dist_) {
      if (dv < kInf) reach = std::max(reach, dv);
    }
    for (std::size_t v = 0; v < dist_.size(); ++v) {
      potential_[v] += dist_[v] < kInf ? dist_[v] : reach;
    }
    return false;
  }

  int nodes_;
  std::vector<int> from_;
  std::vector<int> to_;
  std::vector<std::int64_t> cap_;
  std::vector<std::int64_t> cost_;
  std::vector<int> offsets_;
  std::vector<int> adjacency_;
  std::vector<std::int64_t> potential_;
  std::vector<std::int64_t> dist_;
  std::vector<int> pred_;
  std::vector<bool> settled_;
};

}  // namespace detail

// Integral flow meeting all lower bounds and node demands that maximizes the
// source-to-sink value and, among maximum flows, minimizes cost. Returns
// nullopt when no flow satisfies the lower bounds and demands.
//
// Demands are modeled by splitting the node into in/out halves joined by an
// arc whose lower bound is the demand. Lower bounds are removed with the
// excess-node circulation reduction (super source/sink plus a sink->source
// return arc); a min-cost phase from the super source establishes a cheapest
// feasible flow, then the super arcs and return arc are frozen and the flow is
// augmented from source to sink.
inline std::optional<FlowSolution> MinCostMaxFlow(const FlowNetwork& net) {
  net.Validate();
  const int n = net.node_count;
  std::vector<int> out_half(static_cast<std::size_t>(n));
  int nodes = n;
  for (int v = 0; v < n; ++v) {
    out_half[static_cast<std::size_t>(v)] = net.demand(v) > 0 ? nodes++ : v;
  }
  const int source = net.source;
  const int sink = out_half[static_cast<std::size_t>(net.sink)];
  const int super_source = nodes++;
  const int super_sink = nodes++;

  std::int64_t big = 1;
  for (const FlowArc& a : net.arcs) big += a.capacity;
  for (int v = 0; v < n; ++v) big += net.demand(v);

  struct Reduced {
    int from, to;
    std::int64_t lower, capacity, cost;
  };
  std::vector<Reduced> reduced;
  reduced.reserve(net.arcs.size() + static_cast<std::size_t>(n));
  for (const FlowArc& a : net.arcs) {
    reduced.push_back({out_half[static_cast<std::size_t>(a.from)], a.to,
                       a.lower, a.capacity, a.cost});
  }
  for (int v = 0; v < n; ++v) {
    if (net.demand(v) > 0) {
      reduced.push_back({v, out_half[static_cast<std::size_t>(v)],
                         net.demand(v), big, 0});
    }
  }

  detail::ResidualGraph graph(nodes);
  std::vector<std::int64_t> excess(static_cast<std::size_t>(nodes), 0);
  std::vector<int> edge_of(reduced.size());
  for (std::size_t e = 0; e < reduced.size(); ++e) {
    const Reduced& r = reduced[e];
    edge_of[e] = graph.AddEdge(r.from, r.to, r.capacity - r.lower, r.cost);
    excess[static_cast<std::size_t>(r.to)] += r.lower;
    excess[static_cast<std::size_t>(r.from)] -= r.lower;
  }
  const int return_edge = graph.AddEdge(sink, source, big, 0);
  std::vector<int> super_edges;
  std::int64_t required = 0;
  for (int v = 0; v < nodes; ++v) {
    const std::int64_t x = excess[static_cast<std::size_t>(v)];
    if (x > 0) {
      super_edges.push_back(graph.AddEdge(super_source, v, x, 0));
      required += x;
    } else if (x < 0) {
      super_edges.push_back(graph.AddEdge(v, super_sink, -x, 0));
    }
  }
  graph.Finalize();

  const auto [phase1_flow, phase1_cost] = graph.Augment(super_source, super_sink);
  if (phase1_flow != required) return std::nullopt;
  (void)phase1_cost;

  const std::int64_t base_value = graph.flow(return_edge);
  graph.Freeze(return_edge);
  for (int e : super_edges) graph.Freeze(e);
  const auto [extra_flow, extra_cost] = graph.Augment(source, sink);
  (void)extra_cost;

  FlowSolution solution;
  solution.flow_value = base_value + extra_flow;
  solution.arc_flow.resize(net.arcs.size());
  for (std::size_t e = 0; e < net.arcs.size(); ++e) {
    const std::int64_t f = net.arcs[e].lower + graph.flow(edge_of[e]);
    solution.arc_flow[e] = f;
    solution.total_cost += f * net.arcs[e].cost;
  }
  return solution;
}

// True iff some flow satisfies every lower bound and node demand.
inline bool MaxFlowFeasible(const FlowNetwork& net) {
  FlowNetwork unit = net;
  for (FlowArc& a : unit.arcs) a.cost = 0;
  return MinCostMaxFlow(unit).has_value();
}

}  // namespace flc
