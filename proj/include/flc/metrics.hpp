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
#include <vector>

#include "flc/model.hpp"
#include "flc/solve_report.hpp"

namespace flc {

namespace detail {

// max(0, lower - count/total, count/total - upper), exactly 0 when
// lower * total <= count <= upper * total.
inline double ProportionSlack(std::int64_t count, std::int64_t total,
                              const Rational& lower, const Rational& upper) {
  if (total == 0) return 0.0;
  const Rational share(count, total);
  if (share >= lower && share <= upper) return 0.0;
  if (share < lower) return (lower - share).ToDouble();
  return (share - upper).ToDouble();
}

inline void Aggregate(ViolationReport& report) {
  report.delta_color = 0.0;
  for (const auto& row : report.color_detail) {
    for (double v : row) report.delta_color = std::max(report.delta_color, v);
  }
  report.delta_points_per_label = 0.0;
  for (double v : report.points_detail) {
    report.delta_points_per_label = std::max(report.delta_points_per_label, v);
  }
  report.delta_centers_per_label = 0.0;
  for (double v : report.centers_detail) {
    report.delta_centers_per_label =
        std::max(report.delta_centers_per_label, v);
  }
}

}  // namespace detail

// Relaxations against absolute bounds. Size slack is normalized by n, center
// slack by k. Empty labels contribute no color violation.
inline ViolationReport Violations(const Instance& instance,
                                  const Assignment& assignment,
                                  const LabelConstraints& constraints) {
  constraints.Validate();
  const auto tallies = Tallies(instance, assignment, constraints.num_labels);
  const auto n = static_cast<double>(instance.n());
  const auto k = static_cast<double>(instance.k());
  ViolationReport report;
  for (std::size_t L = 0; L < tallies.size(); ++L) {
    const LabelTally& t = tallies[L];
    std::vector<double> row(t.by_color.size(), 0.0);
    for (std::size_t h = 0; h < t.by_color.size(); ++h) {
      row[h] = detail::ProportionSlack(t.by_color[h], t.points,
                                       constraints.color_lower[L][h],
                                       constraints.color_upper[L][h]);
    }
    report.color_detail.push_back(std::move(row));
    const std::int64_t size_gap =
        std::max<std::int64_t>({0, constraints.size_lower[L] - t.points,
                                t.points - constraints.size_upper[L]});
    report.points_detail.push_back(static_cast<double>(size_gap) / n);
    const std::int64_t center_gap =
        std::max<std::int64_t>({0, constraints.center_lower[L] - t.centers,
                                t.centers - constraints.center_upper[L]});
    report.centers_detail.push_back(static_cast<double>(center_gap) / k);
  }
  detail::Aggregate(report);
  return report;
}

// Relaxations of the proportional forms: (r_h -/+ eps_a), (alpha -/+ eps_b) n
// and (alpha -/+ eps_c) k.
inline ViolationReport Violations(const Instance& instance,
                                  const Assignment& assignment,
                                  const ClpSpec& clp) {
  clp.Validate();
  if (clp.num_colors() != instance.num_colors()) {
    throw StructuralError("clp: color count does not match instance");
  }
  const auto tallies = Tallies(instance, assignment, clp.num_labels());
  const auto n = static_cast<std::int64_t>(instance.n());
  const auto k = static_cast<std::int64_t>(instance.k());
  ViolationReport report;
  for (std::size_t L = 0; L < tallies.size(); ++L) {
    const LabelTally& t = tallies[L];
    std::vector<double> row(t.by_color.size(), 0.0);
    for (std::size_t h = 0; h < t.by_color.size(); ++h) {
      row[h] = detail::ProportionSlack(
          t.by_color[h], t.points, clp.population_ratio[h] - clp.eps_a[h][L],
          clp.population_ratio[h] + clp.eps_a_prime[h][L]);
    }
    report.color_detail.push_back(std::move(row));
    report.points_detail.push_back(detail::ProportionSlack(
        t.points, n, clp.alpha[L] - clp.eps_b[L],
        clp.alpha[L] + clp.eps_b_prime[L]));
    report.centers_detail.push_back(detail::ProportionSlack(
        t.centers, k, clp.alpha[L] - clp.eps_c_prime[L],
        clp.alpha[L] + clp.eps_c[L]));
  }
  detail::Aggregate(report);
  return report;
}

// phi(x_j) = argmin_i d(x_j, s_i), ties to the lowest center index. Labels
// are left to the caller (all zero here).
inline Assignment NearestCenter(const Instance& instance) {
  Assignment a;
  a.point_to_center.resize(instance.n());
  a.center_to_label.assign(instance.k(), 0);
  const Matrix& d = instance.distances();
  for (std::size_t j = 0; j < instance.n(); ++j) {
    const auto row = d.row(j);
    std::size_t best = 0;
    for (std::size_t i = 1; i < row.size(); ++i) {
      if (row[i] < row[best]) best = i;
    }
    a.point_to_center[j] = static_cast<int>(best);
  }
  return a;
}

// Price of fairness; nullopt when the color-blind cost is zero.
inline std::optional<double> PriceOfFairness(double fair_cost,
                                             double color_blind_cost) {
  if (!(color_blind_cost > 0.0)) return std::nullopt;
  return fair_cost / color_blind_cost;
}

}  // namespace flc
