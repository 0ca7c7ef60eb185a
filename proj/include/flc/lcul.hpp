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
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "flc/lcal.hpp"
#include "flc/metrics.hpp"
#include "flc/model.hpp"
#include "flc/parallel.hpp"
#include "flc/rng.hpp"
#include "flc/solve_report.hpp"

namespace flc {

// pi[i][L]: probability that center i takes label L. Rows sum to 1.
struct FractionalLabeling {
  std::vector<std::vector<double>> pi;

  static FractionalLabeling Uniform(std::size_t centers,
                                    std::span<const double> alpha) {
    return {std::vector<std::vector<double>>(
        centers, std::vector<double>(alpha.begin(), alpha.end()))};
  }
};

namespace detail {

inline constexpr double kSnap = 1e-9;

class DependentRounder {
 public:
  DependentRounder(const FractionalLabeling& frac, std::uint64_t seed)
      : k_(frac.pi.size()),
        m_(frac.pi.empty() ? 0 : frac.pi[0].size()),
        x_(k_ * m_),
        rng_(seed) {
    for (std::size_t i = 0; i < k_; ++i) {
      if (frac.pi[i].size() != m_) {
        throw ParameterError("dependent rounding: ragged label matrix");
      }
      double sum = 0.0;
      for (std::size_t L = 0; L < m_; ++L) {
        const double v = frac.pi[i][L];
        if (!(v >= -kSnap && v <= 1.0 + kSnap)) {
          throw ParameterError("dependent rounding: probability outside [0, 1]");
        }
        x_[i * m_ + L] = Snap(v);
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-12) {
        throw ParameterError("dependent rounding: row " + std::to_string(i) +
                             " does not sum to 1");
      }
    }
  }

  std::vector<int> Run() {
    while (true) {
      const auto start = FirstFractionalVertex();
      if (!start) break;
      std::vector<std::size_t> edges = FindCycleOrMaximalPath(*start);
      Round(edges);
    }
    std::vector<int> labels(k_, -1);
    for (std::size_t i = 0; i < k_; ++i) {
      for (std::size_t L = 0; L < m_; ++L) {
        if (x_[i * m_ + L] == 1.0) labels[i] = static_cast<int>(L);
      }
      if (labels[i] < 0) throw StructuralError("dependent rounding: row lost mass");
    }
    return labels;
  }

 private:
  // Vertices: centers are [0, k), labels are [k, k + m). Edge id = i*m + L.
  static double Snap(double v) {
    if (v < kSnap) return 0.0;
    if (v > 1.0 - kSnap) return 1.0;
    return v;
  }
  bool Fractional(std::size_t e) const { return x_[e] > 0.0 && x_[e] < 1.0; }

  std::optional<std::size_t> FirstFractionalVertex() const {
    for (std::size_t e = 0; e < x_.size(); ++e) {
      if (Fractional(e)) return e / m_;
    }
    return std::nullopt;
  }

  std::size_t Other(std::size_t e, std::size_t v) const {
    const std::size_t center = e / m_;
    const std::size_t label = k_ + e % m_;
    return v == center ? label : center;
  }

  // Lowest-index fractional edge at v other than `skip`.
  std::optional<std::size_t> NextEdge(std::size_t v, std::size_t skip) const {
    if (v < k_) {
      for (std::size_t L = 0; L < m_; ++L) {
        const std::size_t e = v * m_ + L;
        if (e != skip && Fractional(e)) return e;
      }
    } else {
      const std::size_t L = v - k_;
      for (std::size_t i = 0; i < k_; ++i) {
        const std::size_t e = i * m_ + L;
        if (e != skip && Fractional(e)) return e;
      }
    }
    return std::nullopt;
  }

  // Walks fractional edges from `start`. Returns the edges of the first cycle
  // met; if the walk dead-ends, walks again from the dead end, which yields a
  // cycle or a path whose both endpoints have fractional degree 1.
  std::vector<std::size_t> FindCycleOrMaximalPath(std::size_t start) {
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    for (int attempt = 0;; ++attempt) {
      std::vector<std::size_t> vertices{start};
      std::vector<std::size_t> edges;
      std::vector<std::size_t> position(k_ + m_, kNone);
      position[start] = 0;
      std::size_t v = start;
      std::size_t arrived = kNone;
      while (true) {
        const auto e = NextEdge(v, arrived);
        if (!e) break;
        const std::size_t w = Other(*e, v);
        edges.push_back(*e);
        if (position[w] != kNone) {
          return {edges.begin() + static_cast<std::ptrdiff_t>(position[w]),
                  edges.end()};
        }
        position[w] = vertices.size();
        vertices.push_back(w);
        v = w;
        arrived = *e;
      }
      if (attempt == 1) return edges;
      start = v;
    }
  }

  void Round(const std::vector<std::size_t>& edges) {
    double alpha = std::numeric_limits<double>::infinity();
    double beta = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < edges.size(); ++t) {
      const double v = x_[edges[t]];
      if (t % 2 == 0) {
        alpha = std::min(alpha, 1.0 - v);
        beta = std::min(beta, v);
      } else {
        alpha = std::min(alpha, v);
        beta = std::min(beta, 1.0 - v);
      }
    }
    const bool raise_even = rng_.Uniform() * (alpha + beta) < beta;
    const double step = raise_even ? alpha : -beta;
    for (std::size_t t = 0; t < edges.size(); ++t) {
      double& v = x_[edges[t]];
      v = Snap(t % 2 == 0 ? v + step : v - step);
    }
  }

  std::size_t k_;
  std::size_t m_;
  std::vector<double> x_;
  CounterRng rng_;
};

}  // namespace detail

// Bipartite (center x label) dependent rounding. Each center gets label L with
// probability pi[i][L], and every label count stays within floor/ceil of its
// fractional column sum in every run.
inline std::vector<int> DependentRound(const FractionalLabeling& frac,
                                       std::uint64_t seed) {
  return detail::DependentRounder(frac, seed).Run();
}

inline std::vector<double> AlphaToDouble(const ClpSpec& clp) {
  std::vector<double> out;
  for (const Rational& a : clp.alpha) out.push_back(a.ToDouble());
  return out;
}

// Nearest-center assignment (optimal cost) with center labels drawn by
// dependent rounding of pi[i][L] = alpha_L.
inline SolveReport SolveLculRandomized(const Instance& instance,
                                       const ClpSpec& clp, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  clp.Validate();
  SolveReport r;
  r.status = SolveStatus::kRandomized;
  r.path = "lcul_dependent_rounding";
  r.seed = seed;
  r.assignment = NearestCenter(instance);
  const auto alpha = AlphaToDouble(clp);
  r.assignment.center_to_label =
      DependentRound(FractionalLabeling::Uniform(instance.k(), alpha), seed);
  r.objective = ObjectiveValue(instance, r.assignment);
  r.distribution = detail::PointsPerLabel(r.assignment, clp.num_labels());
  r.violations = Violations(instance, r.assignment, clp);
  r.wall_time_ms = detail::ElapsedMs(start);
  return r;
}

struct FptOptions {
  LcalOptions lcal;
  std::uint64_t labeling_budget = 1'000'000;
};

// All center labelings within the center-count bounds, lexicographic.
inline std::vector<std::vector<int>> EnumerateLabelings(
    std::size_t k, const LabelConstraints& constraints) {
  const auto m = static_cast<std::size_t>(constraints.num_labels);
  std::vector<std::vector<int>> out;
  std::vector<int> current(k, 0);
  std::vector<std::int64_t> counts(m, 0);
  auto rec = [&](auto&& self, std::size_t i) -> void {
    const auto left = static_cast<std::int64_t>(k - i);
    std::int64_t missing = 0;
    for (std::size_t L = 0; L < m; ++L) {
      missing += std::max<std::int64_t>(0, constraints.center_lower[L] - counts[L]);
    }
    if (missing > left) return;
    if (i == k) {
      out.push_back(current);
      return;
    }
    for (std::size_t L = 0; L < m; ++L) {
      if (counts[L] + 1 > constraints.center_upper[L]) continue;
      current[i] = static_cast<int>(L);
      ++counts[L];
      self(self, i + 1);
      --counts[L];
    }
  };
  rec(rec, 0);
  return out;
}

// Exact LCUL: every admissible labeling is an LCAL instance; keep the best by
// scaled cost (true cost for k-center), ties to the lexicographically first
// labeling.
inline SolveReport SolveLculExactFpt(const Instance& instance,
                                     const LabelConstraints& constraints,
                                     const FptOptions& options = {}) {
  const auto start = std::chrono::steady_clock::now();
  constraints.Validate();
  const double total =
      std::pow(static_cast<double>(constraints.num_labels),
               static_cast<double>(instance.k()));
  if (total > static_cast<double>(options.labeling_budget)) {
    throw ParameterError("fpt: m^k labelings exceeds the budget");
  }
  const auto labelings = EnumerateLabelings(instance.k(), constraints);
  std::vector<SolveReport> results(labelings.size());
  LcalOptions inner = options.lcal;
  inner.threads = 1;
  ParallelFor(labelings.size(), options.lcal.threads, [&](std::size_t idx) {
    results[idx] = SolveLcal(instance, labelings[idx], constraints, inner);
  });
  std::optional<std::size_t> best;
  for (std::size_t idx = 0; idx < results.size(); ++idx) {
    if (!results[idx].feasible()) continue;
    if (!best) {
      best = idx;
      continue;
    }
    const SolveReport& a = results[idx];
    const SolveReport& b = results[*best];
    const bool better = a.scaled_objective && b.scaled_objective
                            ? *a.scaled_objective < *b.scaled_objective
                            : a.objective < b.objective;
    if (better) best = idx;
  }
  if (!best) {
    SolveReport r = InfeasibleReport("fpt");
    r.wall_time_ms = detail::ElapsedMs(start);
    return r;
  }
  SolveReport r = std::move(results[*best]);
  r.path = "fpt/" + r.path;
  r.violations = Violations(instance, r.assignment, constraints);
  r.wall_time_ms = detail::ElapsedMs(start);
  return r;
}

// Only color-proportion bounds active: nearest assignment, every center gets
// the lowest label whose bounds admit the population ratios. If no label
// does, the nearest assignment is returned flagged kMethodInfeasible.
inline SolveReport SolveLculColorOnly(const Instance& instance,
                                      const LabelConstraints& constraints) {
  const auto start = std::chrono::steady_clock::now();
  constraints.Validate();
  if (constraints.num_colors != instance.num_colors()) {
    throw StructuralError("color-only: constraint colors mismatch instance");
  }
  SolveReport r;
  r.path = "lcul_color_only";
  r.assignment = NearestCenter(instance);
  int chosen = -1;
  for (int L = 0; L < constraints.num_labels && chosen < 0; ++L) {
    bool ok = true;
    for (int h = 0; h < instance.num_colors(); ++h) {
      const Rational ratio = instance.PopulationRatio(h);
      const auto l = static_cast<std::size_t>(L);
      const auto hh = static_cast<std::size_t>(h);
      if (ratio < constraints.color_lower[l][hh] ||
          ratio > constraints.color_upper[l][hh]) {
        ok = false;
      }
    }
    if (ok) chosen = L;
  }
  r.status = chosen >= 0 ? SolveStatus::kOptimal : SolveStatus::kMethodInfeasible;
  r.assignment.center_to_label.assign(instance.k(), std::max(chosen, 0));
  r.objective = ObjectiveValue(instance, r.assignment);
  r.distribution = detail::PointsPerLabel(r.assignment, constraints.num_labels);
  LabelConstraints color_part = LabelConstraints::Unconstrained(
      constraints.num_labels, constraints.num_colors,
      static_cast<std::int64_t>(instance.n()),
      static_cast<std::int64_t>(instance.k()));
  color_part.color_lower = constraints.color_lower;
  color_part.color_upper = constraints.color_upper;
  r.violations = Violations(instance, r.assignment, color_part);
  r.wall_time_ms = detail::ElapsedMs(start);
  return r;
}

// Only center-count bounds active: nearest assignment; each label first takes
// its lower bound of centers (lowest center indices first, label order), then
// the remaining centers go to labels below their upper bound in label order.
inline SolveReport SolveLculCenterCountOnly(const Instance& instance,
                                            const LabelConstraints& constraints) {
  const auto start = std::chrono::steady_clock::now();
  constraints.Validate();
  const auto k = static_cast<std::int64_t>(instance.k());
  std::int64_t lower_sum = 0;
  std::int64_t upper_sum = 0;
  for (int L = 0; L < constraints.num_labels; ++L) {
    lower_sum += constraints.center_lower[static_cast<std::size_t>(L)];
    upper_sum += constraints.center_upper[static_cast<std::size_t>(L)];
  }
  if (lower_sum > k || upper_sum < k) {
    SolveReport r = InfeasibleReport("lcul_center_count_only");
    r.wall_time_ms = detail::ElapsedMs(start);
    return r;
  }
  SolveReport r;
  r.status = SolveStatus::kOptimal;
  r.path = "lcul_center_count_only";
  r.assignment = NearestCenter(instance);
  std::vector<int>& labels = r.assignment.center_to_label;
  std::size_t next = 0;
  std::vector<std::int64_t> counts(static_cast<std::size_t>(constraints.num_labels), 0);
  for (int L = 0; L < constraints.num_labels; ++L) {
    const auto l = static_cast<std::size_t>(L);
    for (; counts[l] < constraints.center_lower[l]; ++counts[l]) {
      labels[next++] = L;
    }
  }
  for (int L = 0; L < constraints.num_labels && next < labels.size(); ++L) {
    const auto l = static_cast<std::size_t>(L);
    for (; counts[l] < constraints.center_upper[l] && next < labels.size();
         ++counts[l]) {
      labels[next++] = L;
    }
  }
  r.objective = ObjectiveValue(instance, r.assignment);
  r.distribution = detail::PointsPerLabel(r.assignment, constraints.num_labels);
  LabelConstraints center_part = LabelConstraints::Unconstrained(
      constraints.num_labels, instance.num_colors(),
      static_cast<std::int64_t>(instance.n()), k);
  center_part.center_lower = constraints.center_lower;
  center_part.center_upper = constraints.center_upper;
  r.violations = Violations(instance, r.assignment, center_part);
  r.wall_time_ms = detail::ElapsedMs(start);
  return r;
}

}  // namespace flc
