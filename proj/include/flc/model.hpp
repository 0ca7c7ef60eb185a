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
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "flc/rational.hpp"

namespace flc {

// Violated structural invariant (bad index, inconsistent shapes, ...).
class StructuralError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Out-of-range or unsupported parameter.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Objective { kKCenter, kKMedian, kKMeans };

inline std::string_view ObjectiveName(Objective objective) {
  switch (objective) {
    case Objective::kKCenter: return "kcenter";
    case Objective::kKMedian: return "kmedian";
    case Objective::kKMeans: return "kmeans";
  }
  return "unknown";
}

inline Objective ParseObjective(std::string_view name) {
  if (name == "kcenter") return Objective::kKCenter;
  if (name == "kmedian") return Objective::kKMedian;
  if (name == "kmeans") return Objective::kKMeans;
  throw ParameterError("unknown objective '" + std::string(name) + "'");
}

// Per-point contribution of a distance under `objective`: d for k-center and
// k-median, d^2 for k-means.
inline double PointCost(Objective objective, double distance) {
  return objective == Objective::kKMeans ? distance * distance : distance;
}

// Display transform of an aggregated objective (p-th root for k-means).
inline double DisplayCost(Objective objective, double aggregated) {
  return objective == Objective::kKMeans ? std::sqrt(aggregated) : aggregated;
}

// Real cost to integer, round half to even.
inline std::int64_t ScaleCost(double cost, double factor) {
  return static_cast<std::int64_t>(std::nearbyint(cost * factor));
}

inline constexpr double kDefaultCostScale = 1e6;

// Dense row-major real matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw StructuralError("matrix: data size does not match shape");
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double EuclideanDistance(std::span<const double> a,
                                std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const double diff = a[t] - b[t];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

// Colored points without centers.
struct PointSet {
  Matrix coordinates;               // n x dim
  std::vector<int> colors;          // length n, values in [0, num_colors)
  int num_colors = 0;
  std::vector<std::string> legend;  // color index -> original value (optional)

  std::size_t size() const { return colors.size(); }

  std::vector<std::int64_t> ColorCounts() const {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(num_colors), 0);
    for (int c : colors) ++counts[static_cast<std::size_t>(c)];
    return counts;
  }

  void Validate() const {
    if (colors.empty()) throw StructuralError("point set: n must be >= 1");
    if (num_colors < 1) throw StructuralError("point set: need >= 1 color");
    if (coordinates.rows() != colors.size()) {
      throw StructuralError("point set: coordinate rows != color count");
    }
    for (int c : colors) {
      if (c < 0 || c >= num_colors) {
        throw StructuralError("point set: color index out of range");
      }
    }
  }
};

// Points, colors, fixed centers and objective, with the n x k distance
// matrix computed once at construction. Immutable afterwards.
class Instance {
 public:
  Instance(PointSet points, Matrix centers, Objective objective)
      : points_(std::move(points)),
        centers_(std::move(centers)),
        objective_(objective) {
    points_.Validate();
    if (centers_.rows() < 1) throw StructuralError("instance: k must be >= 1");
    if (centers_.cols() != points_.coordinates.cols()) {
      throw StructuralError("instance: center dimension mismatch");
    }
    distances_ = BuildDistanceMatrix(points_.coordinates, centers_);
    color_counts_ = points_.ColorCounts();
  }

  static Matrix BuildDistanceMatrix(const Matrix& points,
                                    const Matrix& centers) {
    Matrix d(points.rows(), centers.rows());
    for (std::size_t j = 0; j < points.rows(); ++j) {
      for (std::size_t i = 0; i < centers.rows(); ++i) {
        d(j, i) = EuclideanDistance(points.row(j), centers.row(i));
      }
    }
    return d;
  }

  std::size_t n() const { return points_.size(); }
  std::size_t k() const { return centers_.rows(); }
  int num_colors() const { return points_.num_colors; }
  Objective objective() const { return objective_; }
  const PointSet& points() const { return points_; }
  const Matrix& centers() const { return centers_; }
  const Matrix& distances() const { return distances_; }
  int color(std::size_t j) const { return points_.colors[j]; }
  const std::vector<std::int64_t>& color_counts() const {
    return color_counts_;
  }

  double distance(std::size_t j, std::size_t i) const {
    return distances_(j, i);
  }
  // d^p contribution of assigning point j to center i.
  double cost(std::size_t j, std::size_t i) const {
    return PointCost(objective_, distances_(j, i));
  }

  // r_h = |X_h| / n.
  Rational PopulationRatio(int h) const {
    return Rational(color_counts_[static_cast<std::size_t>(h)],
                    static_cast<std::int64_t>(n()));
  }

  Instance WithObjective(Objective objective) const {
    Instance copy = *this;
    copy.objective_ = objective;
    return copy;
  }

 private:
  PointSet points_;
  Matrix centers_;
  Objective objective_;
  Matrix distances_;
  std::vector<std::int64_t> color_counts_;
};

// Bounds for optimization with m labels and C colors.
struct LabelConstraints {
  int num_labels = 0;
  int num_colors = 0;
  std::vector<std::vector<Rational>> color_lower;  // [L][h]
  std::vector<std::vector<Rational>> color_upper;  // [L][h]
  std::vector<std::int64_t> size_lower;            // [L]
  std::vector<std::int64_t> size_upper;            // [L]
  std::vector<std::int64_t> center_lower;          // [L], unassigned labels
  std::vector<std::int64_t> center_upper;          // [L], unassigned labels

  // l = 0, u = 1, sizes [0, n], centers [0, k].
  static LabelConstraints Unconstrained(int num_labels, int num_colors,
                                        std::int64_t n, std::int64_t k) {
    LabelConstraints c;
    c.num_labels = num_labels;
    c.num_colors = num_colors;
    const auto m = static_cast<std::size_t>(num_labels);
    const auto cc = static_cast<std::size_t>(num_colors);
    c.color_lower.assign(m, std::vector<Rational>(cc, Rational(0)));
    c.color_upper.assign(m, std::vector<Rational>(cc, Rational(1)));
    c.size_lower.assign(m, 0);
    c.size_upper.assign(m, n);
    c.center_lower.assign(m, 0);
    c.center_upper.assign(m, k);
    return c;
  }

  // Same proportional bounds in every label.
  void SetColorBounds(const std::vector<Rational>& lower,
                      const std::vector<Rational>& upper) {
    for (int L = 0; L < num_labels; ++L) {
      color_lower[static_cast<std::size_t>(L)] = lower;
      color_upper[static_cast<std::size_t>(L)] = upper;
    }
  }

  void Validate() const {
    if (num_labels < 1) throw ParameterError("constraints: m must be >= 1");
    const auto m = static_cast<std::size_t>(num_labels);
    const auto cc = static_cast<std::size_t>(num_colors);
    if (color_lower.size() != m || color_upper.size() != m ||
        size_lower.size() != m || size_upper.size() != m ||
        center_lower.size() != m || center_upper.size() != m) {
      throw StructuralError("constraints: per-label arrays must have size m");
    }
    for (std::size_t L = 0; L < m; ++L) {
      if (color_lower[L].size() != cc || color_upper[L].size() != cc) {
        throw StructuralError("constraints: per-color arrays must have size C");
      }
      for (std::size_t h = 0; h < cc; ++h) {
        const Rational& lo = color_lower[L][h];
        const Rational& hi = color_upper[L][h];
        if (lo < Rational(0) || hi > Rational(1) || hi < lo) {
          throw ParameterError("constraints: color bounds must satisfy 0 <= l <= u <= 1");
        }
      }
      if (size_lower[L] < 0 || size_lower[L] > size_upper[L]) {
        throw ParameterError("constraints: size bounds must satisfy 0 <= lower <= upper");
      }
      if (center_lower[L] < 0 || center_lower[L] > center_upper[L]) {
        throw ParameterError("constraints: center bounds must satisfy 0 <= lower <= upper");
      }
    }
  }
};

// Color-and-label-proportional specification. The epsilon fields follow the
// relaxation naming: color bounds r_h - eps_a, r_h + eps_a_prime; size bounds
// (alpha - eps_b) n, (alpha + eps_b_prime) n; center bounds
// (alpha - eps_c_prime) k, (alpha + eps_c) k.
struct ClpSpec {
  std::vector<Rational> alpha;                   // [L]
  std::vector<Rational> population_ratio;        // [h]
  std::vector<std::vector<Rational>> eps_a;      // [h][L]
  std::vector<std::vector<Rational>> eps_a_prime;
  std::vector<Rational> eps_b;                   // [L]
  std::vector<Rational> eps_b_prime;
  std::vector<Rational> eps_c;
  std::vector<Rational> eps_c_prime;

  int num_labels() const { return static_cast<int>(alpha.size()); }
  int num_colors() const { return static_cast<int>(population_ratio.size()); }

  // Uniform epsilons across colors and labels.
  static ClpSpec Uniform(std::vector<Rational> alpha,
                         std::vector<Rational> population_ratio, Rational a,
                         Rational a_prime, Rational b, Rational b_prime,
                         Rational c, Rational c_prime) {
    ClpSpec spec;
    const std::size_t m = alpha.size();
    const std::size_t cc = population_ratio.size();
    spec.alpha = std::move(alpha);
    spec.population_ratio = std::move(population_ratio);
    spec.eps_a.assign(cc, std::vector<Rational>(m, a));
    spec.eps_a_prime.assign(cc, std::vector<Rational>(m, a_prime));
    spec.eps_b.assign(m, b);
    spec.eps_b_prime.assign(m, b_prime);
    spec.eps_c.assign(m, c);
    spec.eps_c_prime.assign(m, c_prime);
    return spec;
  }

  void Validate() const {
    const std::size_t m = alpha.size();
    const std::size_t cc = population_ratio.size();
    if (m < 1) throw ParameterError("clp: need at least one label");
    Rational total(0);
    for (const Rational& a : alpha) {
      if (a < Rational(0) || a > Rational(1)) {
        throw ParameterError("clp: alpha must lie in [0, 1]");
      }
      total = total + a;
    }
    if (!(total == Rational(1))) throw ParameterError("clp: alpha must sum to 1");
    auto check = [&](const std::vector<Rational>& v, std::size_t size) {
      if (v.size() != size) throw StructuralError("clp: epsilon shape");
      for (const Rational& e : v) {
        if (e < Rational(0)) throw ParameterError("clp: epsilon must be >= 0");
      }
    };
    if (eps_a.size() != cc || eps_a_prime.size() != cc) {
      throw StructuralError("clp: epsilon shape");
    }
    for (std::size_t h = 0; h < cc; ++h) {
      check(eps_a[h], m);
      check(eps_a_prime[h], m);
    }
    check(eps_b, m);
    check(eps_b_prime, m);
    check(eps_c, m);
    check(eps_c_prime, m);
  }

  LabelConstraints ToLabelConstraints(std::int64_t n, std::int64_t k) const {
    Validate();
    const int m = num_labels();
    const int cc = num_colors();
    LabelConstraints out = LabelConstraints::Unconstrained(m, cc, n, k);
    const Rational zero(0);
    const Rational one(1);
    for (std::size_t L = 0; L < alpha.size(); ++L) {
      for (std::size_t h = 0; h < population_ratio.size(); ++h) {
        out.color_lower[L][h] =
            std::max(zero, population_ratio[h] - eps_a[h][L]);
        out.color_upper[L][h] =
            std::min(one, population_ratio[h] + eps_a_prime[h][L]);
      }
      out.size_lower[L] =
          std::clamp<std::int64_t>((alpha[L] - eps_b[L]).CeilTimes(n), 0, n);
      out.size_upper[L] = std::clamp<std::int64_t>(
          (alpha[L] + eps_b_prime[L]).FloorTimes(n), 0, n);
      out.center_lower[L] = std::clamp<std::int64_t>(
          (alpha[L] - eps_c_prime[L]).CeilTimes(k), 0, k);
      out.center_upper[L] =
          std::clamp<std::int64_t>((alpha[L] + eps_c[L]).FloorTimes(k), 0, k);
    }
    return out;
  }
};

struct Assignment {
  std::vector<int> point_to_center;  // length n
  std::vector<int> center_to_label;  // length k

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

inline void ValidateAssignment(const Instance& instance,
                               const Assignment& assignment) {
  if (assignment.point_to_center.size() != instance.n()) {
    throw StructuralError("assignment: expected one center per point");
  }
  const auto k = static_cast<int>(instance.k());
  for (int c : assignment.point_to_center) {
    if (c < 0 || c >= k) throw StructuralError("assignment: invalid center index");
  }
  if (assignment.center_to_label.size() != instance.k()) {
    throw StructuralError("assignment: expected one label per center");
  }
  for (int L : assignment.center_to_label) {
    if (L < 0) throw StructuralError("assignment: invalid label index");
  }
}

// Sum of d (k-median), sum of d^2 (k-means), or max d (k-center). Summation
// runs in point order.
inline double ObjectiveValue(const Instance& instance,
                             std::span<const int> point_to_center) {
  if (point_to_center.size() != instance.n()) {
    throw StructuralError("assignment: expected one center per point");
  }
  const auto k = static_cast<int>(instance.k());
  double total = 0.0;
  for (std::size_t j = 0; j < point_to_center.size(); ++j) {
    const int c = point_to_center[j];
    if (c < 0 || c >= k) throw StructuralError("assignment: invalid center index");
    const double v = instance.cost(j, static_cast<std::size_t>(c));
    if (instance.objective() == Objective::kKCenter) {
      total = std::max(total, v);
    } else {
      total += v;
    }
  }
  return total;
}

inline double ObjectiveValue(const Instance& instance,
                             const Assignment& assignment) {
  return ObjectiveValue(instance, assignment.point_to_center);
}

struct LabelTally {
  std::int64_t points = 0;
  std::vector<std::int64_t> by_color;
  std::int64_t centers = 0;
};

inline std::vector<LabelTally> Tallies(const Instance& instance,
                                       const Assignment& assignment,
                                       int num_labels) {
  ValidateAssignment(instance, assignment);
  std::vector<LabelTally> out(static_cast<std::size_t>(num_labels));
  for (auto& t : out) {
    t.by_color.assign(static_cast<std::size_t>(instance.num_colors()), 0);
  }
  for (int L : assignment.center_to_label) {
    if (L >= num_labels) throw StructuralError("assignment: label out of range");
    ++out[static_cast<std::size_t>(L)].centers;
  }
  for (std::size_t j = 0; j < instance.n(); ++j) {
    const auto center =
        static_cast<std::size_t>(assignment.point_to_center[j]);
    auto& t = out[static_cast<std::size_t>(assignment.center_to_label[center])];
    ++t.points;
    ++t.by_color[static_cast<std::size_t>(instance.color(j))];
  }
  return out;
}

}  // namespace flc
