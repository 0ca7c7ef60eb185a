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
#include <cmath>
#include <cstdint>
#include <limits>
#include <functional>
#include <optional>
#include <queue>
#include <span>
#include <tuple>
#include <vector>

#include "flc/lcal.hpp"
#include "flc/lcul.hpp"
#include "flc/metrics.hpp"
#include "flc/model.hpp"
#include "flc/rng.hpp"
#include "flc/solve_report.hpp"

namespace flc {

// Nearest-center assignment with each center labeled independently:
// label L with probability alpha[L].
inline Assignment Ncra(const Instance& instance, std::span<const double> alpha,
                       std::uint64_t seed) {
  if (alpha.empty()) throw ParameterError("ncra: alpha is empty");
  double total = 0.0;
  for (double a : alpha) {
    if (a < 0.0) throw ParameterError("ncra: negative alpha");
    total += a;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ParameterError("ncra: alpha must sum to 1");
  Assignment a = NearestCenter(instance);
  CounterRng rng(seed);
  for (int& label : a.center_to_label) {
    const double u = rng.Uniform();
    double acc = 0.0;
    label = -1;
    for (std::size_t L = 0; L < alpha.size(); ++L) {
      acc += alpha[L];
      if (u < acc) {
        label = static_cast<int>(L);
        break;
      }
    }
    if (label < 0) {
      // u landed in the rounding gap above the last partial sum
      for (std::size_t L = alpha.size(); L-- > 0;) {
        if (alpha[L] > 0.0) {
          label = static_cast<int>(L);
          break;
        }
      }
    }
  }
  return a;
}

struct ColorBounds {
  std::vector<Rational> lower;  // [h]
  std::vector<Rational> upper;  // [h]
};

namespace detail {

// Min-cost assignment with every cluster's size held at its size under
// `start` and each (cluster, color) cell count within [lo, hi]. Starts from
// `start`, which must be a nearest assignment, and repairs the cell
// violations by successive shortest paths on the contracted graph whose
// nodes are the cells and the clusters. Moving a color-h point from cluster
// i to i' is an arc (i,h) -> (i',h) priced by the cheapest such point; the
// count of cell (i,h) is an arc (i,h) -> cluster i. Returns nullopt when the
// quotas admit no assignment.
class QuotaRepair {
 public:
  QuotaRepair(const Instance& instance, std::vector<int> start,
              std::vector<std::int64_t> lo, std::vector<std::int64_t> hi,
              double cost_scale)
      : instance_(instance),
        n_(instance.n()),
        k_(instance.k()),
        colors_(static_cast<std::size_t>(instance.num_colors())),
        cells_(k_ * colors_),
        nodes_(cells_ + k_),
        assign_(std::move(start)),
        lo_(std::move(lo)),
        hi_(std::move(hi)),
        version_(n_, 0),
        scaled_(n_ * k_),
        heaps_(cells_ * k_) {
    for (std::size_t j = 0; j < n_; ++j) {
      for (std::size_t i = 0; i < k_; ++i) {
        scaled_[j * k_ + i] = ScaleCost(instance.cost(j, i), cost_scale);
      }
    }
  }

  std::optional<std::vector<int>> Run() {
    std::vector<std::int64_t> count(cells_, 0);
    for (std::size_t j = 0; j < n_; ++j) {
      ++count[Cell(static_cast<std::size_t>(assign_[j]), Color(j))];
      PushMoves(j);
    }
    flow_.assign(cells_, 0);
    excess_.assign(nodes_, 0);
    for (std::size_t c = 0; c < cells_; ++c) {
      if (lo_[c] > hi_[c]) return std::nullopt;
      flow_[c] = std::clamp(count[c], lo_[c], hi_[c]);
      excess_[c] += count[c] - flow_[c];
      excess_[cells_ + c / colors_] += flow_[c] - count[c];
    }
    potential_.assign(nodes_, 0);
    while (true) {
      bool pending = false;
      for (std::int64_t e : excess_) pending = pending || e > 0;
      if (!pending) break;
      if (!AugmentOnce()) return std::nullopt;
    }
    return assign_;
  }

  std::int64_t ScaledCost(const std::vector<int>& assign) const {
    std::int64_t total = 0;
    for (std::size_t j = 0; j < n_; ++j) {
      total += scaled_[j * k_ + static_cast<std::size_t>(assign[j])];
    }
    return total;
  }

 private:
  using Entry = std::tuple<std::int64_t, std::size_t, std::uint32_t>;  // key, point, version
  using Heap = std::priority_queue<Entry, std::vector<Entry>, std::greater<>>;
  static constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

  std::size_t Color(std::size_t j) const { return static_cast<std::size_t>(instance_.color(j)); }
  std::size_t Cell(std::size_t i, std::size_t h) const { return i * colors_ + h; }
  Heap& Moves(std::size_t cell, std::size_t to) { return heaps_[cell * k_ + to]; }

  void PushMoves(std::size_t j) {
    const auto from = static_cast<std::size_t>(assign_[j]);
    const std::int64_t here = scaled_[j * k_ + from];
    const std::size_t cell = Cell(from, Color(j));
    for (std::size_t i = 0; i < k_; ++i) {
      if (i == from) continue;
      Moves(cell, i).emplace(scaled_[j * k_ + i] - here, j, version_[j]);
    }
  }

  // Cheapest point that can move out of `cell` to cluster `to`, if any.
  std::optional<Entry> TopMove(std::size_t cell, std::size_t to) {
    Heap& heap = Moves(cell, to);
    while (!heap.empty()) {
      const auto& [key, j, version] = heap.top();
      if (version == version_[j]) return heap.top();
      heap.pop();
    }
    return std::nullopt;
  }

  // One unit from some excess node to the nearest deficit node.
  bool AugmentOnce() {
    std::vector<std::int64_t> dist(nodes_, kInf);
    std::vector<bool> done(nodes_, false);
    std::vector<std::ptrdiff_t> pred(nodes_, -1);
    std::vector<std::size_t> via(nodes_, 0);  // moved point for move arcs
    for (std::size_t v = 0; v < nodes_; ++v) {
      if (excess_[v] > 0) dist[v] = 0;
    }
    auto relax = [&](std::size_t u, std::size_t v, std::int64_t cost, std::size_t point) {
      const std::int64_t d = dist[u] + cost + potential_[u] - potential_[v];
      if (d < dist[v]) {
        dist[v] = d;
        pred[v] = static_cast<std::ptrdiff_t>(u);
        via[v] = point;
      }
    };
    std::optional<std::size_t> target;
    while (true) {
      std::size_t u = nodes_;
      for (std::size_t v = 0; v < nodes_; ++v) {
        if (!done[v] && dist[v] < kInf && (u == nodes_ || dist[v] < dist[u])) u = v;
      }
      if (u == nodes_) break;
      done[u] = true;
      if (excess_[u] < 0) {
        target = u;
        break;
      }
      if (u < cells_) {
        const std::size_t i = u / colors_;
        const std::size_t h = u % colors_;
        if (flow_[u] < hi_[u]) relax(u, cells_ + i, 0, 0);
        for (std::size_t to = 0; to < k_; ++to) {
          if (to == i) continue;
          if (const auto top = TopMove(u, to)) {
            relax(u, Cell(to, h), std::get<0>(*top), std::get<1>(*top));
          }
        }
      } else {
        const std::size_t i = u - cells_;
        for (std::size_t h = 0; h < colors_; ++h) {
          const std::size_t cell = Cell(i, h);
          if (flow_[cell] > lo_[cell]) relax(u, cell, 0, 0);
        }
      }
    }
    if (!target) return false;
    const std::int64_t dt = dist[*target];
    for (std::size_t v = 0; v < nodes_; ++v) {
      potential_[v] += done[v] ? dist[v] : dt;
    }
    std::size_t v = *target;
    while (pred[v] >= 0) {
      const auto u = static_cast<std::size_t>(pred[v]);
      if (u < cells_ && v < cells_) {
        const std::size_t j = via[v];
        assign_[j] = static_cast<int>(v / colors_);
        ++version_[j];
        PushMoves(j);
      } else if (u < cells_) {
        ++flow_[u];
      } else {
        --flow_[v];
      }
      v = u;
    }
    --excess_[v];
    ++excess_[*target];
    return true;
  }

  const Instance& instance_;
  std::size_t n_;
  std::size_t k_;
  std::size_t colors_;
  std::size_t cells_;
  std::size_t nodes_;
  std::vector<int> assign_;
  std::vector<std::int64_t> lo_;
  std::vector<std::int64_t> hi_;
  std::vector<std::uint32_t> version_;
  std::vector<std::int64_t> scaled_;
  std::vector<Heap> heaps_;
  std::vector<std::int64_t> flow_;
  std::vector<std::int64_t> excess_;
  std::vector<std::int64_t> potential_;
};

}  // namespace detail

// Heuristic stand-in for a group-fair clustering baseline. Cluster sizes are
// frozen at the nearest-assignment sizes and every cluster must hold between
// ceil(l_h |C_i|) and floor(u_h |C_i|) points of color h; the cheapest such
// reassignment is found exactly. When the quotas are infeasible the nearest
// assignment is returned with kMethodInfeasible. Residual violations are
// measured per label against the same color bounds.
inline SolveReport PerClusterQuotaBaseline(const Instance& instance,
                                           std::span<const int> labels,
                                           const ColorBounds& bounds,
                                           double cost_scale = kDefaultCostScale) {
  const auto start = std::chrono::steady_clock::now();
  const auto k = static_cast<int>(instance.k());
  const auto colors = static_cast<std::size_t>(instance.num_colors());
  if (bounds.lower.size() != colors || bounds.upper.size() != colors) {
    throw StructuralError("quota baseline: need one bound per color");
  }
  if (labels.size() != instance.k()) {
    throw StructuralError("quota baseline: need one label per center");
  }
  for (std::size_t h = 0; h < colors; ++h) {
    if (bounds.lower[h] < Rational(0) || bounds.upper[h] > Rational(1) ||
        bounds.upper[h] < bounds.lower[h]) {
      throw ParameterError("quota baseline: color bounds must satisfy 0 <= l <= u <= 1");
    }
  }
  const Assignment nearest = NearestCenter(instance);
  std::vector<std::int64_t> sizes(instance.k(), 0);
  for (int c : nearest.point_to_center) ++sizes[static_cast<std::size_t>(c)];
  std::vector<std::int64_t> lo;
  std::vector<std::int64_t> hi;
  for (std::size_t i = 0; i < instance.k(); ++i) {
    for (std::size_t h = 0; h < colors; ++h) {
      lo.push_back(bounds.lower[h].CeilTimes(sizes[i]));
      hi.push_back(bounds.upper[h].FloorTimes(sizes[i]));
    }
  }

  SolveReport r;
  r.path = "per_cluster_quota_heuristic";
  detail::QuotaRepair repair(instance, nearest.point_to_center, std::move(lo),
                             std::move(hi), cost_scale);
  if (auto assign = repair.Run()) {
    r.status = SolveStatus::kHeuristic;
    r.scaled_objective = repair.ScaledCost(*assign);
    r.assignment.point_to_center = std::move(*assign);
  } else {
    r.status = SolveStatus::kMethodInfeasible;
    r.note = "per-cluster quotas infeasible; nearest assignment returned";
    r.assignment.point_to_center = nearest.point_to_center;
  }
  r.assignment.center_to_label.assign(labels.begin(), labels.end());
  r.objective = ObjectiveValue(instance, r.assignment);
  int m = 1;
  for (int L : labels) m = std::max(m, L + 1);
  LabelConstraints per_label = LabelConstraints::Unconstrained(
      m, instance.num_colors(), static_cast<std::int64_t>(instance.n()), k);
  per_label.SetColorBounds(bounds.lower, bounds.upper);
  r.distribution = detail::PointsPerLabel(r.assignment, m);
  r.violations = Violations(instance, r.assignment, per_label);
  r.wall_time_ms = detail::ElapsedMs(start);
  return r;
}

// ---------------------------------------------------------------------------
// Exhaustive oracles. Depth-first over points in index order with
// branch-and-bound on the (nonnegative) partial cost; exact.

struct BruteForceResult {
  bool feasible = false;
  Assignment assignment;
  double objective = 0.0;
  std::int64_t scaled_objective = 0;  // unused for k-center
};

inline constexpr double kBruteForceBudget = 2e7;

namespace detail {

class BruteForceSearch {
 public:
  BruteForceSearch(const Instance& instance, const LabelConstraints& constraints,
                   double cost_scale)
      : instance_(instance),
        constraints_(constraints),
        n_(instance.n()),
        k_(instance.k()),
        m_(static_cast<std::size_t>(constraints.num_labels)),
        colors_(static_cast<std::size_t>(instance.num_colors())),
        kcenter_(instance.objective() == Objective::kKCenter) {
    scaled_.resize(n_ * k_);
    for (std::size_t j = 0; j < n_; ++j) {
      for (std::size_t i = 0; i < k_; ++i) {
        scaled_[j * k_ + i] = ScaleCost(instance.cost(j, i), cost_scale);
      }
    }
  }

  // Searches all assignments under a fixed labeling, improving `best`.
  void Run(const std::vector<int>& labels, BruteForceResult& best) {
    labels_ = &labels;
    best_ = &best;
    current_.assign(n_, 0);
    label_points_.assign(m_, 0);
    label_colors_.assign(m_ * colors_, 0);
    Visit(0, 0.0, 0);
  }

 private:
  bool Better(double real, std::int64_t scaled) const {
    if (!best_->feasible) return true;
    if (kcenter_) return real < best_->objective;
    if (scaled != best_->scaled_objective) return scaled < best_->scaled_objective;
    return real < best_->objective;
  }

  bool Pruned(double real, std::int64_t scaled) const {
    if (!best_->feasible) return false;
    return kcenter_ ? real > best_->objective : scaled > best_->scaled_objective;
  }

  bool Feasible() const {
    for (std::size_t L = 0; L < m_; ++L) {
      const std::int64_t size = label_points_[L];
      if (size < constraints_.size_lower[L] || size > constraints_.size_upper[L]) {
        return false;
      }
      for (std::size_t h = 0; h < colors_; ++h) {
        const std::int64_t count = label_colors_[L * colors_ + h];
        if (count < constraints_.color_lower[L][h].CeilTimes(size) ||
            count > constraints_.color_upper[L][h].FloorTimes(size)) {
          return false;
        }
      }
    }
    return true;
  }

  void Visit(std::size_t j, double real, std::int64_t scaled) {
    if (Pruned(real, scaled)) return;
    if (j == n_) {
      if (Feasible() && Better(real, scaled)) {
        best_->feasible = true;
        best_->objective = real;
        best_->scaled_objective = scaled;
        best_->assignment.point_to_center = current_;
        best_->assignment.center_to_label = *labels_;
      }
      return;
    }
    const auto h = static_cast<std::size_t>(instance_.color(j));
    for (std::size_t i = 0; i < k_; ++i) {
      const auto L = static_cast<std::size_t>((*labels_)[i]);
      const double c = instance_.cost(j, i);
      current_[j] = static_cast<int>(i);
      ++label_points_[L];
      ++label_colors_[L * colors_ + h];
      Visit(j + 1, kcenter_ ? std::max(real, c) : real + c,
            kcenter_ ? 0 : scaled + scaled_[j * k_ + i]);
      --label_points_[L];
      --label_colors_[L * colors_ + h];
    }
  }

  const Instance& instance_;
  const LabelConstraints& constraints_;
  std::size_t n_, k_, m_, colors_;
  bool kcenter_;
  std::vector<std::int64_t> scaled_;
  const std::vector<int>* labels_ = nullptr;
  BruteForceResult* best_ = nullptr;
  std::vector<int> current_;
  std::vector<std::int64_t> label_points_;
  std::vector<std::int64_t> label_colors_;
};

}  // namespace detail

// Exact LCAL optimum by enumerating all k^n assignments.
inline BruteForceResult BruteForceLcal(const Instance& instance,
                                       std::span<const int> labels,
                                       const LabelConstraints& constraints,
                                       double cost_scale = kDefaultCostScale) {
  constraints.Validate();
  if (std::pow(static_cast<double>(instance.k()),
               static_cast<double>(instance.n())) > kBruteForceBudget) {
    throw ParameterError("brute force: k^n exceeds the enumeration budget");
  }
  if (labels.size() != instance.k()) {
    throw StructuralError("brute force: need one label per center");
  }
  for (int L : labels) {
    if (L < 0 || L >= constraints.num_labels) {
      throw StructuralError("brute force: label out of range");
    }
  }
  BruteForceResult best;
  const std::vector<int> owned(labels.begin(), labels.end());
  detail::BruteForceSearch(instance, constraints, cost_scale).Run(owned, best);
  return best;
}

// Exact LCUL optimum by enumerating all m^k labelings (filtered by the
// center-count bounds) times all k^n assignments.
inline BruteForceResult BruteForceLcul(const Instance& instance,
                                       const LabelConstraints& constraints,
                                       double cost_scale = kDefaultCostScale) {
  constraints.Validate();
  const double labelings = std::pow(static_cast<double>(constraints.num_labels),
                                    static_cast<double>(instance.k()));
  const double assignments = std::pow(static_cast<double>(instance.k()),
                                      static_cast<double>(instance.n()));
  if (labelings * assignments > kBruteForceBudget) {
    throw ParameterError("brute force: m^k * k^n exceeds the enumeration budget");
  }
  const auto k = instance.k();
  const auto m = static_cast<std::size_t>(constraints.num_labels);
  BruteForceResult best;
  detail::BruteForceSearch search(instance, constraints, cost_scale);
  std::vector<int> labels(k, 0);
  while (true) {
    std::vector<std::int64_t> counts(m, 0);
    for (int L : labels) ++counts[static_cast<std::size_t>(L)];
    bool ok = true;
    for (std::size_t L = 0; L < m; ++L) {
      if (counts[L] < constraints.center_lower[L] ||
          counts[L] > constraints.center_upper[L]) {
        ok = false;
      }
    }
    if (ok) search.Run(labels, best);
    // odometer, last center fastest => lexicographic order
    std::size_t pos = k;
    while (pos > 0) {
      --pos;
      if (static_cast<std::size_t>(++labels[pos]) < m) break;
      labels[pos] = 0;
      if (pos == 0) return best;
    }
    if (k == 0) return best;
  }
}

}  // namespace flc
