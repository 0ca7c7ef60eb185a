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
#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "flc/flow.hpp"
#include "flc/metrics.hpp"
#include "flc/model.hpp"
#include "flc/parallel.hpp"
#include "flc/solve_report.hpp"

namespace flc {

struct LcalOptions {
  double cost_scale = kDefaultCostScale;
  // The distribution sweep visits O(n^(m-1)) label-size vectors.
  int max_labels = 3;
  unsigned threads = 1;
};

// Number of points routed to each label; sums to n.
struct Distribution {
  std::vector<std::int64_t> per_label;

  friend bool operator==(const Distribution&, const Distribution&) = default;
};

namespace detail {

inline bool LabelSizeAdmissible(const LabelConstraints& c, std::size_t L,
                                std::int64_t size) {
  if (size < c.size_lower[L] || size > c.size_upper[L]) return false;
  std::int64_t min_total = 0;
  std::int64_t max_total = 0;
  for (std::size_t h = 0; h < static_cast<std::size_t>(c.num_colors); ++h) {
    min_total += c.color_lower[L][h].CeilTimes(size);
    max_total += c.color_upper[L][h].FloorTimes(size);
  }
  return min_total <= size && size <= max_total;
}

template <typename Visitor>
void VisitDistributions(const LabelConstraints& c,
                        std::span<const std::int64_t> color_counts,
                        std::size_t label, std::int64_t remaining,
                        std::vector<std::int64_t>& current,
                        std::vector<std::int64_t>& color_demand,
                        Visitor& visit) {
  const auto m = static_cast<std::size_t>(c.num_labels);
  auto try_size = [&](std::int64_t size) {
    if (!LabelSizeAdmissible(c, label, size)) return;
    bool supply_ok = true;
    for (std::size_t h = 0; h < color_counts.size(); ++h) {
      color_demand[h] += c.color_lower[label][h].CeilTimes(size);
      if (color_demand[h] > color_counts[h]) supply_ok = false;
    }
    if (supply_ok) {
      current[label] = size;
      if (label + 1 == m) {
        visit(Distribution{current});
      } else {
        VisitDistributions(c, color_counts, label + 1, remaining - size,
                           current, color_demand, visit);
      }
    }
    for (std::size_t h = 0; h < color_counts.size(); ++h) {
      color_demand[h] -= c.color_lower[label][h].CeilTimes(size);
    }
  };
  if (label + 1 == m) {
    try_size(remaining);
    return;
  }
  const std::int64_t hi = std::min(remaining, c.size_upper[label]);
  for (std::int64_t size = std::max<std::int64_t>(0, c.size_lower[label]);
       size <= hi; ++size) {
    try_size(size);
  }
}

}  // namespace detail

// Calls visit(Distribution) for every per-label size vector within the size
// bounds that passes the color counting conditions
//   sum_h ceil(l_h^L n_L) <= n_L <= sum_h floor(u_h^L n_L)
//   sum_L ceil(l_h^L n_L) <= |X_h|,
// in lexicographic order of (n_0, n_1, ...).
template <typename Visitor>
void ForEachDistribution(std::int64_t n, const LabelConstraints& constraints,
                         std::span<const std::int64_t> color_counts,
                         Visitor&& visit) {
  constraints.Validate();
  if (color_counts.size() != static_cast<std::size_t>(constraints.num_colors)) {
    throw StructuralError("distributions: color count mismatch");
  }
  std::vector<std::int64_t> current(
      static_cast<std::size_t>(constraints.num_labels), 0);
  std::vector<std::int64_t> demand(color_counts.size(), 0);
  detail::VisitDistributions(constraints, color_counts, 0, n, current, demand,
                             visit);
}

inline std::vector<Distribution> EnumerateDistributions(
    std::int64_t n, const LabelConstraints& constraints,
    std::span<const std::int64_t> color_counts) {
  std::vector<Distribution> out;
  ForEachDistribution(n, constraints, color_counts,
                      [&](Distribution d) { out.push_back(std::move(d)); });
  return out;
}

// Flow network for one label-size distribution, plus the layout needed to
// read an assignment back out of a flow.
struct LcalNetwork {
  FlowNetwork network;
  std::vector<int> point_arc_begin;  // n + 1 offsets into the arcs below
  std::vector<int> arc_center;       // center of each point arc
  int first_point_arc = 0;

  std::vector<int> DecodeAssignment(const FlowSolution& flow) const {
    const std::size_t n = point_arc_begin.size() - 1;
    std::vector<int> point_to_center(n, -1);
    for (std::size_t j = 0; j < n; ++j) {
      for (int a = point_arc_begin[j]; a < point_arc_begin[j + 1]; ++a) {
        if (flow.arc_flow[static_cast<std::size_t>(first_point_arc + a)] > 0) {
          point_to_center[j] = arc_center[static_cast<std::size_t>(a)];
          break;
        }
      }
    }
    return point_to_center;
  }
};

// Layers: source -> points -> per-color center copies -> per-color label
// nodes -> label nodes -> sink. Point j reaches only the copies i^{color(j)}.
// Label-color node (L,h) demands ceil(l n_L) and forwards at most
// floor(u n_L); label node L demands n_L and forwards n_L to the sink.
//
// With `radius` set, point arcs exist only where d(x_j, s_i) <= radius and
// all costs are zero (the k-center feasibility variant).
inline LcalNetwork BuildLcalNetwork(const Instance& instance,
                                    std::span<const int> labels,
                                    const LabelConstraints& constraints,
                                    const Distribution& dist,
                                    double cost_scale = kDefaultCostScale,
                                    std::optional<double> radius = {}) {
  const auto n = static_cast<int>(instance.n());
  const auto k = static_cast<int>(instance.k());
  const int colors = instance.num_colors();
  const int m = constraints.num_labels;
  if (labels.size() != instance.k()) {
    throw StructuralError("lcal network: need one label per center");
  }
  for (int L : labels) {
    if (L < 0 || L >= m) throw StructuralError("lcal network: label out of range");
  }
  if (constraints.num_colors != colors) {
    throw StructuralError("lcal network: constraint colors mismatch instance");
  }
  if (dist.per_label.size() != static_cast<std::size_t>(m)) {
    throw StructuralError("lcal network: distribution has wrong length");
  }

  LcalNetwork out;
  FlowNetwork& net = out.network;
  net.source = net.AddNode();
  const int point_base = net.node_count;
  for (int j = 0; j < n; ++j) net.AddNode();
  const int copy_base = net.node_count;
  for (int c = 0; c < k * colors; ++c) net.AddNode();
  const int label_color_base = net.node_count;
  for (int L = 0; L < m; ++L) {
    const std::int64_t nl = dist.per_label[static_cast<std::size_t>(L)];
    for (int h = 0; h < colors; ++h) {
      net.AddNode(constraints.color_lower[static_cast<std::size_t>(L)]
                                         [static_cast<std::size_t>(h)]
                                             .CeilTimes(nl));
    }
  }
  const int label_base = net.node_count;
  for (int L = 0; L < m; ++L) {
    net.AddNode(dist.per_label[static_cast<std::size_t>(L)]);
  }
  net.sink = net.AddNode();

  for (int j = 0; j < n; ++j) net.AddArc(net.source, point_base + j, 1);

  out.first_point_arc = static_cast<int>(net.arcs.size());
  out.point_arc_begin.reserve(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j < n; ++j) {
    out.point_arc_begin.push_back(static_cast<int>(out.arc_center.size()));
    const int h = instance.color(static_cast<std::size_t>(j));
    for (int i = 0; i < k; ++i) {
      const double d = instance.distance(static_cast<std::size_t>(j),
                                         static_cast<std::size_t>(i));
      std::int64_t cost = 0;
      if (radius) {
        if (d > *radius) continue;
      } else {
        cost = ScaleCost(PointCost(instance.objective(), d), cost_scale);
      }
      net.AddArc(point_base + j, copy_base + i * colors + h, 1, cost);
      out.arc_center.push_back(i);
    }
  }
  out.point_arc_begin.push_back(static_cast<int>(out.arc_center.size()));

  for (int i = 0; i < k; ++i) {
    for (int h = 0; h < colors; ++h) {
      net.AddArc(copy_base + i * colors + h,
                 label_color_base + labels[static_cast<std::size_t>(i)] * colors + h,
                 n);
    }
  }
  for (int L = 0; L < m; ++L) {
    const std::int64_t nl = dist.per_label[static_cast<std::size_t>(L)];
    for (int h = 0; h < colors; ++h) {
      net.AddArc(label_color_base + L * colors + h, label_base + L,
                 constraints.color_upper[static_cast<std::size_t>(L)]
                                        [static_cast<std::size_t>(h)]
                                            .FloorTimes(nl));
    }
  }
  for (int L = 0; L < m; ++L) {
    net.AddArc(label_base + L, net.sink,
               dist.per_label[static_cast<std::size_t>(L)]);
  }
  return out;
}

namespace detail {

inline double ElapsedMs(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

inline void CheckLcalInputs(const Instance& instance,
                            std::span<const int> labels,
                            const LabelConstraints& constraints,
                            const LcalOptions& options) {
  constraints.Validate();
  if (constraints.num_colors != instance.num_colors()) {
    throw StructuralError("lcal: constraint colors mismatch instance");
  }
  if (labels.size() != instance.k()) {
    throw StructuralError("lcal: need one label per center");
  }
  for (int L : labels) {
    if (L < 0 || L >= constraints.num_labels) {
      throw StructuralError("lcal: label out of range");
    }
  }
  if (constraints.num_labels > options.max_labels) {
    throw ParameterError("lcal: " + std::to_string(constraints.num_labels) +
                         " labels exceeds the configured maximum of " +
                         std::to_string(options.max_labels));
  }
}

// Distributions that can be realized at all: labels without centers get no
// points.
inline std::vector<Distribution> CandidateDistributions(
    const Instance& instance, std::span<const int> labels,
    const LabelConstraints& constraints) {
  std::vector<bool> has_center(static_cast<std::size_t>(constraints.num_labels),
                               false);
  for (int L : labels) has_center[static_cast<std::size_t>(L)] = true;
  std::vector<Distribution> out;
  ForEachDistribution(
      static_cast<std::int64_t>(instance.n()), constraints,
      instance.color_counts(), [&](Distribution d) {
        for (std::size_t L = 0; L < d.per_label.size(); ++L) {
          if (d.per_label[L] > 0 && !has_center[L]) return;
        }
        out.push_back(std::move(d));
      });
  return out;
}

inline std::vector<std::int64_t> PointsPerLabel(const Assignment& a, int m) {
  std::vector<std::int64_t> out(static_cast<std::size_t>(m), 0);
  for (int c : a.point_to_center) {
    ++out[static_cast<std::size_t>(a.center_to_label[static_cast<std::size_t>(c)])];
  }
  return out;
}

}  // namespace detail

inline SolveReport SolveLcalKCenter(const Instance& instance,
                                    std::span<const int> labels,
                                    const LabelConstraints& constraints,
                                    const LcalOptions& options = {});

// Exact LCAL for k-median / k-means: one min-cost flow per candidate
// distribution, keeping the assignment of smallest true objective (ties go to
// the earliest distribution). k-center instances are forwarded to
// SolveLcalKCenter.
inline SolveReport SolveLcal(const Instance& instance,
                             std::span<const int> labels,
                             const LabelConstraints& constraints,
                             const LcalOptions& options = {}) {
  if (instance.objective() == Objective::kKCenter) {
    return SolveLcalKCenter(instance, labels, constraints, options);
  }
  const auto start = std::chrono::steady_clock::now();
  detail::CheckLcalInputs(instance, labels, constraints, options);
  const auto dists =
      detail::CandidateDistributions(instance, labels, constraints);

  struct Outcome {
    bool feasible = false;
    std::vector<int> point_to_center;
    double objective = 0.0;
    std::int64_t scaled = 0;
  };
  std::vector<Outcome> outcomes(dists.size());
  ParallelFor(dists.size(), options.threads, [&](std::size_t idx) {
    const LcalNetwork built = BuildLcalNetwork(instance, labels, constraints,
                                               dists[idx], options.cost_scale);
    const auto flow = MinCostMaxFlow(built.network);
    if (!flow) return;
    Outcome& o = outcomes[idx];
    o.feasible = true;
    o.point_to_center = built.DecodeAssignment(*flow);
    o.objective = ObjectiveValue(instance, o.point_to_center);
    o.scaled = flow->total_cost;
  });

  std::optional<std::size_t> best;
  for (std::size_t idx = 0; idx < outcomes.size(); ++idx) {
    if (!outcomes[idx].feasible) continue;
    if (!best || outcomes[idx].objective < outcomes[*best].objective) {
      best = idx;
    }
  }
  if (!best) {
    SolveReport r = InfeasibleReport("flow");
    r.wall_time_ms = detail::ElapsedMs(start);
    return r;
  }
  SolveReport r;
  r.status = SolveStatus::kOptimal;
  r.path = "flow";
  r.assignment.point_to_center = std::move(outcomes[*best].point_to_center);
  r.assignment.center_to_label.assign(labels.begin(), labels.end());
  r.objective = outcomes[*best].objective;
  r.scaled_objective = outcomes[*best].scaled;
  r.distribution = dists[*best].per_label;
  r.violations = Violations(instance, r.assignment, constraints);
  r.wall_time_ms = detail::ElapsedMs(start);
  return r;
}

// Exact LCAL for k-center: binary search over the sorted distinct point-center
// distances; a radius is feasible when some distribution admits a flow using
// only arcs no longer than the radius.
inline SolveReport SolveLcalKCenter(const Instance& instance,
                                    std::span<const int> labels,
                                    const LabelConstraints& constraints,
                                    const LcalOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  detail::CheckLcalInputs(instance, labels, constraints, options);
  if (instance.objective() != Objective::kKCenter) {
    throw ParameterError("lcal k-center: instance objective is not k-center");
  }
  const auto dists =
      detail::CandidateDistributions(instance, labels, constraints);

  std::vector<double> radii = instance.distances().data();
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

  struct Witness {
    std::vector<int> point_to_center;
    std::size_t dist_index = 0;
  };
  auto feasible_at = [&](double radius) -> std::optional<Witness> {
    std::vector<std::optional<std::vector<int>>> found(dists.size());
    ParallelFor(dists.size(), options.threads, [&](std::size_t idx) {
      const LcalNetwork built =
          BuildLcalNetwork(instance, labels, constraints, dists[idx],
                           options.cost_scale, radius);
      if (const auto flow = MinCostMaxFlow(built.network)) {
        found[idx] = built.DecodeAssignment(*flow);
      }
    });
    for (std::size_t idx = 0; idx < found.size(); ++idx) {
      if (found[idx]) return Witness{std::move(*found[idx]), idx};
    }
    return std::nullopt;
  };

  std::optional<Witness> witness;
  if (!dists.empty()) witness = feasible_at(radii.back());
  if (!witness) {
    SolveReport r = InfeasibleReport("kcenter_flow");
    r.wall_time_ms = detail::ElapsedMs(start);
    return r;
  }
  std::size_t lo = 0;
  std::size_t hi = radii.size() - 1;  // feasible
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (auto w = feasible_at(radii[mid])) {
      hi = mid;
      witness = std::move(w);
    } else {
      lo = mid + 1;
    }
  }
  // witness always comes from the probe at radii[hi]

  SolveReport r;
  r.status = SolveStatus::kOptimal;
  r.path = "kcenter_flow";
  r.assignment.point_to_center = std::move(witness->point_to_center);
  r.assignment.center_to_label.assign(labels.begin(), labels.end());
  r.objective = ObjectiveValue(instance, r.assignment);
  r.distribution = dists[witness->dist_index].per_label;
  r.violations = Violations(instance, r.assignment, constraints);
  r.wall_time_ms = detail::ElapsedMs(start);
  return r;
}

// ---------------------------------------------------------------------------
// Two labels (label 0 = positive, label 1 = negative) with exact population
// proportions in both labels.

struct DropEntry {
  int point = 0;
  double drop = 0.0;            // N(v) - P(v)
  std::int64_t scaled_drop = 0;  // same, on scaled costs
};

// P(v) and N(v) are the per-point objective costs (d, or d^2 for k-means) to
// the nearest positive and negative center.
struct DropTable {
  std::vector<double> positive_cost;
  std::vector<double> negative_cost;
  std::vector<std::int64_t> scaled_positive;
  std::vector<std::int64_t> scaled_negative;
  std::vector<int> nearest_positive;
  std::vector<int> nearest_negative;
  // Per color, sorted by drop descending then point index ascending. Sorting
  // uses the scaled drop so the order agrees with the flow solver's costs.
  std::vector<std::vector<DropEntry>> by_color;
};

inline DropTable ComputeDrops(const Instance& instance,
                              std::span<const int> labels,
                              double cost_scale = kDefaultCostScale) {
  if (labels.size() != instance.k()) {
    throw StructuralError("drops: need one label per center");
  }
  bool has_pos = false;
  bool has_neg = false;
  for (int L : labels) {
    if (L == 0) has_pos = true;
    else if (L == 1) has_neg = true;
    else throw StructuralError("drops: labels must be 0 (positive) or 1 (negative)");
  }
  if (!has_pos || !has_neg) {
    throw ParameterError("drops: both labels need at least one center");
  }
  const std::size_t n = instance.n();
  DropTable t;
  t.positive_cost.resize(n);
  t.negative_cost.resize(n);
  t.scaled_positive.resize(n);
  t.scaled_negative.resize(n);
  t.nearest_positive.resize(n);
  t.nearest_negative.resize(n);
  t.by_color.resize(static_cast<std::size_t>(instance.num_colors()));
  for (std::size_t j = 0; j < n; ++j) {
    int best_p = -1;
    int best_n = -1;
    for (std::size_t i = 0; i < instance.k(); ++i) {
      int& best = labels[i] == 0 ? best_p : best_n;
      if (best < 0 ||
          instance.distance(j, i) < instance.distance(j, static_cast<std::size_t>(best))) {
        best = static_cast<int>(i);
      }
    }
    t.nearest_positive[j] = best_p;
    t.nearest_negative[j] = best_n;
    t.positive_cost[j] = instance.cost(j, static_cast<std::size_t>(best_p));
    t.negative_cost[j] = instance.cost(j, static_cast<std::size_t>(best_n));
    t.scaled_positive[j] = ScaleCost(t.positive_cost[j], cost_scale);
    t.scaled_negative[j] = ScaleCost(t.negative_cost[j], cost_scale);
    t.by_color[static_cast<std::size_t>(instance.color(j))].push_back(
        {static_cast<int>(j), t.negative_cost[j] - t.positive_cost[j],
         t.scaled_negative[j] - t.scaled_positive[j]});
  }
  for (auto& list : t.by_color) {
    std::sort(list.begin(), list.end(),
              [](const DropEntry& a, const DropEntry& b) {
                if (a.scaled_drop != b.scaled_drop) {
                  return a.scaled_drop > b.scaled_drop;
                }
                return a.point < b.point;
              });
  }
  return t;
}

// Smallest color-proportional block: n_fair = n / g and n_fair_h = |X_h| / g
// with g the gcd of the color counts.
struct AtomicUnit {
  std::int64_t n_fair = 0;
  std::vector<std::int64_t> per_color;
  std::int64_t units = 0;  // g = n / n_fair
};

inline AtomicUnit ComputeAtomicUnit(std::span<const std::int64_t> color_counts) {
  std::int64_t g = 0;
  for (std::int64_t c : color_counts) g = std::gcd(g, c);
  if (g == 0) throw ParameterError("atomic unit: no points");
  AtomicUnit unit;
  unit.units = g;
  for (std::int64_t c : color_counts) {
    unit.per_color.push_back(c / g);
    unit.n_fair += c / g;
  }
  return unit;
}

// l = u = r_h for every label and color.
inline LabelConstraints ExactPreservationConstraints(const Instance& instance,
                                                     int num_labels) {
  LabelConstraints c = LabelConstraints::Unconstrained(
      num_labels, instance.num_colors(), static_cast<std::int64_t>(instance.n()),
      static_cast<std::int64_t>(instance.k()));
  std::vector<Rational> ratio;
  for (int h = 0; h < instance.num_colors(); ++h) {
    ratio.push_back(instance.PopulationRatio(h));
  }
  c.SetColorBounds(ratio, ratio);
  return c;
}

inline bool IsExactPreservation(const Instance& instance,
                                const LabelConstraints& constraints) {
  if (constraints.num_colors != instance.num_colors()) return false;
  for (int L = 0; L < constraints.num_labels; ++L) {
    for (int h = 0; h < instance.num_colors(); ++h) {
      const Rational r = instance.PopulationRatio(h);
      const auto l = static_cast<std::size_t>(L);
      const auto hh = static_cast<std::size_t>(h);
      if (!(constraints.color_lower[l][hh] == r) ||
          !(constraints.color_upper[l][hh] == r)) {
        return false;
      }
    }
  }
  return true;
}

namespace detail {

inline Assignment TwoLabelAssignment(const DropTable& drops,
                                     const AtomicUnit& unit,
                                     std::int64_t positive_units,
                                     std::span<const int> labels) {
  Assignment a;
  a.center_to_label.assign(labels.begin(), labels.end());
  a.point_to_center = drops.nearest_negative;
  for (std::size_t h = 0; h < drops.by_color.size(); ++h) {
    const std::int64_t take = positive_units * unit.per_color[h];
    for (std::int64_t t = 0; t < take; ++t) {
      const int p = drops.by_color[h][static_cast<std::size_t>(t)].point;
      a.point_to_center[static_cast<std::size_t>(p)] =
          drops.nearest_positive[static_cast<std::size_t>(p)];
    }
  }
  return a;
}

inline std::int64_t UnitScaledGain(const DropTable& drops,
                                   const AtomicUnit& unit, std::int64_t index) {
  std::int64_t gain = 0;
  for (std::size_t h = 0; h < drops.by_color.size(); ++h) {
    const std::int64_t per = unit.per_color[h];
    for (std::int64_t t = index * per; t < (index + 1) * per; ++t) {
      gain += drops.by_color[h][static_cast<std::size_t>(t)].scaled_drop;
    }
  }
  return gain;
}

}  // namespace detail

// Greedy exact solver for two labels under exact population proportions:
// start with every point at its nearest negative center, move the fewest
// atomic units needed to satisfy the size bounds, then keep moving the
// highest-drop unit while the cost strictly decreases and bounds allow.
inline SolveReport SolveTwoLabelExact(const Instance& instance,
                                      std::span<const int> labels,
                                      const LabelConstraints& constraints,
                                      const LcalOptions& options = {}) {
  const auto start = std::chrono::steady_clock::now();
  constraints.Validate();
  if (constraints.num_labels != 2) {
    throw ParameterError("two-label solver: needs exactly two labels");
  }
  if (instance.objective() == Objective::kKCenter) {
    throw ParameterError("two-label solver: k-median or k-means only");
  }
  if (!IsExactPreservation(instance, constraints)) {
    throw ParameterError(
        "two-label solver: color bounds must equal the population ratios");
  }
  const DropTable drops = ComputeDrops(instance, labels, options.cost_scale);
  const AtomicUnit unit = ComputeAtomicUnit(instance.color_counts());
  const auto n = static_cast<std::int64_t>(instance.n());
  const std::int64_t nf = unit.n_fair;
  auto up = [&](std::int64_t v) { return (v + nf - 1) / nf * nf; };
  auto down = [&](std::int64_t v) { return v / nf * nf; };

  // Bounds tightened to multiples of n_fair, then expressed on |P|.
  const std::int64_t lo_p = up(constraints.size_lower[0]);
  const std::int64_t hi_p = down(std::min(constraints.size_upper[0], n));
  const std::int64_t lo_n = up(constraints.size_lower[1]);
  const std::int64_t hi_n = down(std::min(constraints.size_upper[1], n));
  const std::int64_t lo = std::max(lo_p, n - hi_n);
  const std::int64_t hi = std::min(hi_p, n - lo_n);
  if (lo_p > hi_p || lo_n > hi_n || lo > hi || lo > n) {
    SolveReport r = InfeasibleReport("two_label_exact");
    r.wall_time_ms = detail::ElapsedMs(start);
    return r;
  }

  std::int64_t scaled = 0;
  for (std::int64_t v : drops.scaled_negative) scaled += v;
  std::int64_t units = 0;
  const std::int64_t first = lo / nf;
  for (; units < first; ++units) {
    scaled -= detail::UnitScaledGain(drops, unit, units);
  }
  const std::int64_t last = hi / nf;
  while (units < last) {
    const std::int64_t gain = detail::UnitScaledGain(drops, unit, units);
    if (gain <= 0) break;
    scaled -= gain;
    ++units;
  }

  SolveReport r;
  r.status = SolveStatus::kOptimal;
  r.path = "two_label_exact";
  r.assignment = detail::TwoLabelAssignment(drops, unit, units, labels);
  r.objective = ObjectiveValue(instance, r.assignment);
  r.scaled_objective = scaled;
  r.distribution = {units * nf, n - units * nf};
  r.violations = Violations(instance, r.assignment, constraints);
  r.wall_time_ms = detail::ElapsedMs(start);
  return r;
}

struct TradeoffPoint {
  std::int64_t positive_count = 0;
  double cost = 0.0;
  std::int64_t scaled_cost = 0;
};

// Optimal exact-preservation cost for every positive size c * n_fair,
// c = 0..g, from prefix sums over the sorted drop lists.
inline std::vector<TradeoffPoint> TradeoffCurve(
    const Instance& instance, std::span<const int> labels,
    double cost_scale = kDefaultCostScale) {
  if (instance.objective() == Objective::kKCenter) {
    throw ParameterError("trade-off curve: k-median or k-means only");
  }
  const DropTable drops = ComputeDrops(instance, labels, cost_scale);
  const AtomicUnit unit = ComputeAtomicUnit(instance.color_counts());
  double cost = 0.0;
  std::int64_t scaled = 0;
  for (std::size_t j = 0; j < instance.n(); ++j) {
    cost += drops.negative_cost[j];
    scaled += drops.scaled_negative[j];
  }
  std::vector<TradeoffPoint> curve;
  curve.reserve(static_cast<std::size_t>(unit.units) + 1);
  curve.push_back({0, cost, scaled});
  for (std::int64_t c = 0; c < unit.units; ++c) {
    for (std::size_t h = 0; h < drops.by_color.size(); ++h) {
      const std::int64_t per = unit.per_color[h];
      for (std::int64_t t = c * per; t < (c + 1) * per; ++t) {
        const DropEntry& e = drops.by_color[h][static_cast<std::size_t>(t)];
        cost -= e.drop;
        scaled -= e.scaled_drop;
      }
    }
    curve.push_back({(c + 1) * unit.n_fair, cost, scaled});
  }
  return curve;
}

// ---------------------------------------------------------------------------
// Two labels, arbitrary bounds. With the labels fixed, a point's cheapest
// center inside a label is its nearest one, so for a fixed |P| the problem
// splits by color: color h sends some x_h of its points to P, and the best
// x_h points are the top of its drop list. The sweep evaluates every
// candidate |P| this way instead of solving a flow per distribution.

namespace detail {

struct TwoLabelSides {
  bool has[2] = {false, false};
  std::vector<int> nearest[2];
  std::vector<double> distance[2];
};

inline TwoLabelSides NearestPerLabel(const Instance& instance,
                                     std::span<const int> labels) {
  TwoLabelSides sides;
  const std::size_t n = instance.n();
  for (int L : labels) sides.has[L] = true;
  for (int L = 0; L < 2; ++L) {
    sides.nearest[L].assign(n, -1);
    sides.distance[L].assign(n, std::numeric_limits<double>::infinity());
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < instance.k(); ++i) {
      const int L = labels[i];
      const double d = instance.distance(j, i);
      if (d < sides.distance[L][j]) {
        sides.distance[L][j] = d;
        sides.nearest[L][j] = static_cast<int>(i);
      }
    }
  }
  return sides;
}

// Range of x_h (color-h points in P) allowed by the color bounds of both
// labels for |P| = np.
inline std::pair<std::int64_t, std::int64_t> ColorRangeInPositive(
    const LabelConstraints& c, std::size_t h, std::int64_t color_count,
    std::int64_t np, std::int64_t nn) {
  const std::int64_t lo =
      std::max({std::int64_t{0}, c.color_lower[0][h].CeilTimes(np),
                color_count - c.color_upper[1][h].FloorTimes(nn)});
  const std::int64_t hi =
      std::min({color_count, c.color_upper[0][h].FloorTimes(np),
                color_count - c.color_lower[1][h].CeilTimes(nn)});
  return {lo, hi};
}

inline void CheckTwoLabelInputs(const Instance& instance,
                                std::span<const int> labels,
                                const LabelConstraints& constraints) {
  LcalOptions options;
  CheckLcalInputs(instance, labels, constraints, options);
  if (constraints.num_labels != 2) {
    throw ParameterError("two-label sweep: needs exactly two labels");
  }
}

}  // namespace detail

// Exact LCAL for two labels under arbitrary color and size bounds (k-median,
// k-means). Among candidate distributions the one of smallest true objective
// wins, ties to the smallest |P|.
inline SolveReport SolveTwoLabelSweep(const Instance& instance,
                                      std::span<const int> labels,
                                      const LabelConstraints& constraints,
                                      const LcalOptions& options = {}) {
  const auto start = std::chrono::steady_clock::now();
  detail::CheckTwoLabelInputs(instance, labels, constraints);
  if (instance.objective() == Objective::kKCenter) {
    throw ParameterError("two-label sweep: k-median or k-means only");
  }
  const auto n = static_cast<std::int64_t>(instance.n());
  const auto cc = static_cast<std::size_t>(instance.num_colors());
  const auto& counts = instance.color_counts();
  const detail::TwoLabelSides sides = detail::NearestPerLabel(instance, labels);
  const auto dists = detail::CandidateDistributions(instance, labels, constraints);

  // Per-point scaled and true costs on each side; a missing side never
  // receives points because CandidateDistributions excludes it.
  std::vector<std::int64_t> scaled[2];
  std::vector<double> cost[2];
  for (int L = 0; L < 2; ++L) {
    scaled[L].assign(instance.n(), 0);
    cost[L].assign(instance.n(), 0.0);
    if (!sides.has[L]) continue;
    for (std::size_t j = 0; j < instance.n(); ++j) {
      cost[L][j] = instance.cost(j, static_cast<std::size_t>(sides.nearest[L][j]));
      scaled[L][j] = ScaleCost(cost[L][j], options.cost_scale);
    }
  }
  std::int64_t scaled_all_negative = 0;
  double cost_all_negative = 0.0;
  for (std::size_t j = 0; j < instance.n(); ++j) {
    scaled_all_negative += scaled[1][j];
    cost_all_negative += cost[1][j];
  }

  // Drop lists per color in the global order (scaled drop desc, point asc),
  // with global ranks and prefix sums.
  std::vector<int> global(instance.n());
  std::iota(global.begin(), global.end(), 0);
  auto drop = [&](int j) {
    return scaled[1][static_cast<std::size_t>(j)] - scaled[0][static_cast<std::size_t>(j)];
  };
  std::sort(global.begin(), global.end(), [&](int a, int b) {
    if (drop(a) != drop(b)) return drop(a) > drop(b);
    return a < b;
  });
  std::vector<std::vector<int>> order(cc);
  std::vector<std::vector<std::int64_t>> rank(cc);
  std::vector<std::vector<std::int64_t>> prefix_scaled(cc, {0});
  std::vector<std::vector<double>> prefix_cost(cc, {0.0});
  for (std::size_t r = 0; r < global.size(); ++r) {
    const int j = global[r];
    const auto h = static_cast<std::size_t>(instance.color(static_cast<std::size_t>(j)));
    order[h].push_back(j);
    rank[h].push_back(static_cast<std::int64_t>(r));
    prefix_scaled[h].push_back(prefix_scaled[h].back() + drop(j));
    prefix_cost[h].push_back(prefix_cost[h].back() + cost[1][static_cast<std::size_t>(j)] -
                             cost[0][static_cast<std::size_t>(j)]);
  }

  struct Choice {
    std::vector<std::int64_t> x;
    std::int64_t scaled = 0;
    double cost = 0.0;
  };
  auto evaluate = [&](std::int64_t np) -> std::optional<Choice> {
    const std::int64_t nn = n - np;
    std::vector<std::int64_t> lo(cc), hi(cc);
    std::int64_t lo_sum = 0;
    std::int64_t hi_sum = 0;
    for (std::size_t h = 0; h < cc; ++h) {
      std::tie(lo[h], hi[h]) =
          detail::ColorRangeInPositive(constraints, h, counts[h], np, nn);
      if (lo[h] > hi[h]) return std::nullopt;
      lo_sum += lo[h];
      hi_sum += hi[h];
    }
    if (np < lo_sum || np > hi_sum) return std::nullopt;
    // The np - lo_sum best remaining entries: the smallest threshold rank
    // admitting that many.
    const std::int64_t need = np - lo_sum;
    auto taken = [&](std::size_t h, std::int64_t threshold) {
      const auto it = std::lower_bound(rank[h].begin(), rank[h].end(), threshold);
      const std::int64_t below = it - rank[h].begin();
      return std::clamp<std::int64_t>(below - lo[h], 0, hi[h] - lo[h]);
    };
    std::int64_t a = 0;
    std::int64_t b = n;
    while (a < b) {
      const std::int64_t mid = a + (b - a) / 2;
      std::int64_t total = 0;
      for (std::size_t h = 0; h < cc; ++h) total += taken(h, mid);
      if (total >= need) {
        b = mid;
      } else {
        a = mid + 1;
      }
    }
    Choice choice;
    choice.x.resize(cc);
    choice.scaled = scaled_all_negative;
    choice.cost = cost_all_negative;
    for (std::size_t h = 0; h < cc; ++h) {
      choice.x[h] = lo[h] + taken(h, a);
      choice.scaled -= prefix_scaled[h][static_cast<std::size_t>(choice.x[h])];
      choice.cost -= prefix_cost[h][static_cast<std::size_t>(choice.x[h])];
    }
    return choice;
  };

  std::optional<Choice> best;
  std::int64_t best_np = 0;
  for (const Distribution& d : dists) {
    auto c = evaluate(d.per_label[0]);
    if (c && (!best || c->cost < best->cost)) {
      best = std::move(c);
      best_np = d.per_label[0];
    }
  }
  if (!best) {
    SolveReport r = InfeasibleReport("two_label_sweep");
    r.wall_time_ms = detail::ElapsedMs(start);
    return r;
  }
  SolveReport r;
  r.status = SolveStatus::kOptimal;
  r.path = "two_label_sweep";
  r.assignment.center_to_label.assign(labels.begin(), labels.end());
  r.assignment.point_to_center.assign(instance.n(), -1);
  for (std::size_t h = 0; h < cc; ++h) {
    for (std::size_t t = 0; t < order[h].size(); ++t) {
      const auto j = static_cast<std::size_t>(order[h][t]);
      const int side = static_cast<std::int64_t>(t) < best->x[h] ? 0 : 1;
      r.assignment.point_to_center[j] = sides.nearest[side][j];
    }
  }
  r.objective = ObjectiveValue(instance, r.assignment);
  r.scaled_objective = best->scaled;
  r.distribution = {best_np, n - best_np};
  r.violations = Violations(instance, r.assignment, constraints);
  r.wall_time_ms = detail::ElapsedMs(start);
  return r;
}

// Exact two-label LCAL for k-center: binary search over the distinct
// point-center distances. At radius d each point may join the labels whose
// nearest center lies within d, and a |P| is feasible when every color's
// admissible range for x_h meets the bounds and the ranges can sum to |P|.
inline SolveReport SolveTwoLabelKCenter(const Instance& instance,
                                        std::span<const int> labels,
                                        const LabelConstraints& constraints) {
  const auto start = std::chrono::steady_clock::now();
  detail::CheckTwoLabelInputs(instance, labels, constraints);
  if (instance.objective() != Objective::kKCenter) {
    throw ParameterError("two-label k-center: instance objective is not k-center");
  }
  const auto n = static_cast<std::int64_t>(instance.n());
  const auto cc = static_cast<std::size_t>(instance.num_colors());
  const auto& counts = instance.color_counts();
  const detail::TwoLabelSides sides = detail::NearestPerLabel(instance, labels);
  const auto dists = detail::CandidateDistributions(instance, labels, constraints);

  struct Witness {
    std::int64_t np = 0;
    std::vector<std::int64_t> x;
  };
  auto feasible_at = [&](double radius) -> std::optional<Witness> {
    std::vector<std::int64_t> only_p(cc, 0), both(cc, 0);
    for (std::size_t j = 0; j < instance.n(); ++j) {
      const bool p = sides.distance[0][j] <= radius;
      const bool q = sides.distance[1][j] <= radius;
      if (!p && !q) return std::nullopt;
      const auto h = static_cast<std::size_t>(instance.color(j));
      if (p && q) {
        ++both[h];
      } else if (p) {
        ++only_p[h];
      }
    }
    for (const Distribution& d : dists) {
      const std::int64_t np = d.per_label[0];
      std::vector<std::int64_t> lo(cc), hi(cc);
      std::int64_t lo_sum = 0;
      std::int64_t hi_sum = 0;
      bool ok = true;
      for (std::size_t h = 0; h < cc && ok; ++h) {
        auto [a, b] = detail::ColorRangeInPositive(constraints, h, counts[h], np, n - np);
        lo[h] = std::max(a, only_p[h]);
        hi[h] = std::min(b, only_p[h] + both[h]);
        ok = lo[h] <= hi[h];
        lo_sum += lo[h];
        hi_sum += hi[h];
      }
      if (!ok || np < lo_sum || np > hi_sum) continue;
      Witness w{np, lo};
      std::int64_t extra = np - lo_sum;
      for (std::size_t h = 0; h < cc; ++h) {
        const std::int64_t add = std::min(extra, hi[h] - lo[h]);
        w.x[h] += add;
        extra -= add;
      }
      return w;
    }
    return std::nullopt;
  };

  std::vector<double> radii = instance.distances().data();
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  std::optional<Witness> witness;
  if (!dists.empty() && !radii.empty()) witness = feasible_at(radii.back());
  if (!witness) {
    SolveReport r = InfeasibleReport("two_label_kcenter");
    r.wall_time_ms = detail::ElapsedMs(start);
    return r;
  }
  std::size_t lo = 0;
  std::size_t hi = radii.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (auto w = feasible_at(radii[mid])) {
      hi = mid;
      witness = std::move(w);
    } else {
      lo = mid + 1;
    }
  }
  const double radius = radii[hi];

  // Points reachable only from P go there, then x_h - only_p[h] of the
  // points reachable from both, in index order.
  SolveReport r;
  r.status = SolveStatus::kOptimal;
  r.path = "two_label_kcenter";
  r.assignment.center_to_label.assign(labels.begin(), labels.end());
  r.assignment.point_to_center.assign(instance.n(), -1);
  std::vector<std::int64_t> remaining = witness->x;
  for (std::size_t j = 0; j < instance.n(); ++j) {
    const auto h = static_cast<std::size_t>(instance.color(j));
    if (sides.distance[0][j] <= radius && sides.distance[1][j] > radius) {
      r.assignment.point_to_center[j] = sides.nearest[0][j];
      --remaining[h];
    }
  }
  for (std::size_t j = 0; j < instance.n(); ++j) {
    if (r.assignment.point_to_center[j] >= 0) continue;
    const auto h = static_cast<std::size_t>(instance.color(j));
    const bool p = sides.distance[0][j] <= radius;
    if (p && remaining[h] > 0) {
      r.assignment.point_to_center[j] = sides.nearest[0][j];
      --remaining[h];
    } else {
      r.assignment.point_to_center[j] = sides.nearest[1][j];
    }
  }
  r.objective = ObjectiveValue(instance, r.assignment);
  r.distribution = {witness->np, n - witness->np};
  r.violations = Violations(instance, r.assignment, constraints);
  r.wall_time_ms = detail::ElapsedMs(start);
  return r;
}

// Picks the solver: the greedy for two labels with exact population
// proportions (k-median, k-means), the two-label sweep for any other
// two-label instance, the flow solvers otherwise.
inline SolveReport SolveLcalAuto(const Instance& instance,
                                 std::span<const int> labels,
                                 const LabelConstraints& constraints,
                                 const LcalOptions& options = {}) {
  if (constraints.num_labels != 2) {
    return SolveLcal(instance, labels, constraints, options);
  }
  if (instance.objective() == Objective::kKCenter) {
    return SolveTwoLabelKCenter(instance, labels, constraints);
  }
  bool p = false;
  bool q = false;
  for (int L : labels) (L == 0 ? p : q) = true;
  if (p && q && IsExactPreservation(instance, constraints)) {
    return SolveTwoLabelExact(instance, labels, constraints, options);
  }
  return SolveTwoLabelSweep(instance, labels, constraints, options);
}

}  // namespace flc
