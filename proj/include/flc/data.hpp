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
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "flc/model.hpp"
#include "flc/rng.hpp"

namespace flc {

class IngestionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Normalization { kNone, kZScore };

struct DatasetSpec {
  std::string path;
  // Column names, or zero-based column indices when there is no header.
  std::vector<std::string> coordinate_columns;
  std::string color_column;
  char delimiter = ',';
  bool has_header = true;
  std::optional<std::size_t> row_limit;
  Normalization normalization = Normalization::kNone;
};

struct LoadedDataset {
  PointSet points;
  std::size_t dropped_rows = 0;  // rows with a missing selected value
  std::vector<std::string> coordinate_names;
};

namespace detail {

inline std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

// Splits one delimited line. Double-quoted fields may contain the delimiter;
// "" inside quotes is a literal quote.
inline std::vector<std::string> SplitFields(std::string_view line, char delimiter) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delimiter) {
      out.emplace_back(Trim(field));
      field.clear();
    } else {
      field += c;
    }
  }
  out.emplace_back(Trim(field));
  return out;
}

inline bool IsMissing(std::string_view cell) {
  return cell.empty() || cell == "?" || cell == "NA" || cell == "NaN";
}

}  // namespace detail

// Reads points and colors from a delimited text file. Colors get indices in
// order of first appearance. Rows with a missing selected value are dropped
// and counted.
inline LoadedDataset LoadDataset(const DatasetSpec& spec) {
  if (spec.coordinate_columns.empty()) {
    throw IngestionError("dataset: no coordinate columns selected");
  }
  for (const auto& c : spec.coordinate_columns) {
    if (c == spec.color_column) {
      throw IngestionError("dataset: column '" + c +
                           "' is both a coordinate and the color column");
    }
  }
  std::ifstream in(spec.path);
  if (!in) throw IngestionError("dataset: cannot open '" + spec.path + "'");

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!detail::Trim(line).empty()) return true;
    }
    return false;
  };
  if (spec.has_header) {
    if (!next_line()) throw IngestionError("dataset: '" + spec.path + "' is empty");
    header = detail::SplitFields(line, spec.delimiter);
  }

  auto resolve = [&](const std::string& name) -> std::size_t {
    if (spec.has_header) {
      for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == name) return c;
      }
    }
    char* end = nullptr;
    const unsigned long idx = std::strtoul(name.c_str(), &end, 10);
    if (!name.empty() && end && *end == '\0' &&
        (!spec.has_header || idx < header.size())) {
      return idx;
    }
    throw IngestionError("dataset: missing column '" + name + "'");
  };
  std::vector<std::size_t> coord_idx;
  for (const auto& c : spec.coordinate_columns) coord_idx.push_back(resolve(c));
  const std::size_t color_idx = resolve(spec.color_column);

  LoadedDataset out;
  out.coordinate_names = spec.coordinate_columns;
  std::vector<double> values;
  std::unordered_map<std::string, int> color_index;
  bool any_row = false;
  while ((!spec.row_limit || out.points.colors.size() < *spec.row_limit) &&
         next_line()) {
    any_row = true;
    const auto fields = detail::SplitFields(line, spec.delimiter);
    auto cell = [&](std::size_t idx) -> const std::string& {
      if (idx >= fields.size()) {
        throw IngestionError("dataset: line " + std::to_string(line_no) +
                             " has no column " + std::to_string(idx));
      }
      return fields[idx];
    };
    bool missing = detail::IsMissing(cell(color_idx));
    for (std::size_t c : coord_idx) missing = missing || detail::IsMissing(cell(c));
    if (missing) {
      ++out.dropped_rows;
      continue;
    }
    for (std::size_t t = 0; t < coord_idx.size(); ++t) {
      const std::string& text = cell(coord_idx[t]);
      char* end = nullptr;
      const double v = std::strtod(text.c_str(), &end);
      if (end == text.c_str() || *end != '\0' || !std::isfinite(v)) {
        throw IngestionError("dataset: line " + std::to_string(line_no) +
                             ", column '" + spec.coordinate_columns[t] +
                             "': cannot parse '" + text + "' as a number");
      }
      values.push_back(v);
    }
    const std::string& color = cell(color_idx);
    auto [it, inserted] = color_index.try_emplace(
        color, static_cast<int>(out.points.legend.size()));
    if (inserted) out.points.legend.push_back(color);
    out.points.colors.push_back(it->second);
  }
  if (!any_row || out.points.colors.empty()) {
    throw IngestionError("dataset: '" + spec.path + "' has no usable rows");
  }
  const std::size_t n = out.points.colors.size();
  const std::size_t dim = coord_idx.size();
  out.points.num_colors = static_cast<int>(out.points.legend.size());
  out.points.coordinates = Matrix(n, dim, std::move(values));

  if (spec.normalization == Normalization::kZScore) {
    Matrix& x = out.points.coordinates;
    for (std::size_t c = 0; c < dim; ++c) {
      double mean = 0.0;
      for (std::size_t r = 0; r < n; ++r) mean += x(r, c);
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (std::size_t r = 0; r < n; ++r) var += (x(r, c) - mean) * (x(r, c) - mean);
      const double sd = std::sqrt(var / static_cast<double>(n));
      for (std::size_t r = 0; r < n; ++r) {
        x(r, c) = sd > 0.0 ? (x(r, c) - mean) / sd : x(r, c) - mean;
      }
    }
  }
  return out;
}

// Sum of squared distances from each point to its nearest center.
inline double KMeansCost(const Matrix& points, const Matrix& centers) {
  double total = 0.0;
  for (std::size_t j = 0; j < points.rows(); ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < centers.rows(); ++i) {
      const double d = EuclideanDistance(points.row(j), centers.row(i));
      best = std::min(best, d * d);
    }
    total += best;
  }
  return total;
}

// One Lloyd step: nearest-center partition (ties to the lower index), then
// every nonempty cluster's center moves to its mean.
inline void LloydStep(const Matrix& points, Matrix& centers) {
  const std::size_t k = centers.rows();
  const std::size_t dim = centers.cols();
  Matrix sums(k, dim);
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t j = 0; j < points.rows(); ++j) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) {
      const double d = EuclideanDistance(points.row(j), centers.row(i));
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    ++counts[best];
    for (std::size_t t = 0; t < dim; ++t) sums(best, t) += points(j, t);
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (counts[i] == 0) continue;
    for (std::size_t t = 0; t < dim; ++t) {
      centers(i, t) = sums(i, t) / static_cast<double>(counts[i]);
    }
  }
}

// k-means++ seeding (D^2 sampling) followed by `lloyd_iterations` Lloyd steps.
inline Matrix KMeansPlusPlusCenters(const Matrix& points, std::size_t k,
                                    std::uint64_t seed,
                                    int lloyd_iterations = 0) {
  const std::size_t n = points.rows();
  if (k < 1 || k > n) {
    throw ParameterError("k-means++: need 1 <= k <= n (k = " + std::to_string(k) +
                         ", n = " + std::to_string(n) + ")");
  }
  CounterRng rng(seed);
  std::vector<std::size_t> chosen;
  std::vector<bool> taken(n, false);
  std::vector<double> weight(n, std::numeric_limits<double>::infinity());
  auto take = [&](std::size_t idx) {
    chosen.push_back(idx);
    taken[idx] = true;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = EuclideanDistance(points.row(j), points.row(idx));
      weight[j] = std::min(weight[j], d * d);
    }
  };
  take(static_cast<std::size_t>(rng.Below(n)));
  while (chosen.size() < k) {
    double total = 0.0;
    for (double w : weight) total += w;
    std::optional<std::size_t> pick;
    if (total > 0.0) {
      const double target = rng.Uniform() * total;
      double acc = 0.0;
      std::size_t last_positive = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (weight[j] <= 0.0) continue;
        last_positive = j;
        acc += weight[j];
        if (acc > target) {
          pick = j;
          break;
        }
      }
      if (!pick) pick = last_positive;
    } else {
      // every point coincides with a chosen center
      for (std::size_t j = 0; j < n && !pick; ++j) {
        if (!taken[j]) pick = j;
      }
    }
    take(*pick);
  }
  Matrix centers(k, points.cols());
  for (std::size_t i = 0; i < k; ++i) {
    std::copy(points.row(chosen[i]).begin(), points.row(chosen[i]).end(),
              centers.row(i).begin());
  }
  for (int it = 0; it < lloyd_iterations; ++it) LloydStep(points, centers);
  return centers;
}

struct GeneratorSpec {
  std::size_t n = 1000;
  std::size_t dim = 2;
  int num_colors = 2;
  std::vector<double> color_weights{0.5, 0.5};
  std::size_t clusters = 4;
  double spread = 1.0;
  // Probability that a point's blob is tied to its color (blob = color mod
  // clusters) instead of drawn uniformly.
  double rho = 0.0;
  std::uint64_t seed = 0;
};

// Gaussian blob mixture with colors drawn by color_weights. Blob centers are
// uniform in [0, 100]^dim. When `blob_of` is given it receives each point's
// blob index.
inline PointSet Synthesize(const GeneratorSpec& spec,
                           std::vector<int>* blob_of = nullptr) {
  if (spec.n < 1 || spec.dim < 1 || spec.clusters < 1 || spec.num_colors < 1) {
    throw ParameterError("generator: n, dim, clusters and colors must be >= 1");
  }
  if (spec.color_weights.size() != static_cast<std::size_t>(spec.num_colors)) {
    throw ParameterError("generator: need one weight per color");
  }
  double total = 0.0;
  for (double w : spec.color_weights) {
    if (!(w >= 0.0)) throw ParameterError("generator: weights must be >= 0");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ParameterError("generator: color weights must sum to 1");
  }
  if (!(spec.rho >= 0.0 && spec.rho <= 1.0)) {
    throw ParameterError("generator: rho must lie in [0, 1]");
  }
  CounterRng rng(spec.seed);
  Matrix blob_centers(spec.clusters, spec.dim);
  for (std::size_t b = 0; b < spec.clusters; ++b) {
    for (std::size_t t = 0; t < spec.dim; ++t) blob_centers(b, t) = 100.0 * rng.Uniform();
  }
  PointSet out;
  out.num_colors = spec.num_colors;
  for (int h = 0; h < spec.num_colors; ++h) out.legend.push_back("c" + std::to_string(h));
  out.coordinates = Matrix(spec.n, spec.dim);
  out.colors.resize(spec.n);
  if (blob_of) blob_of->clear();
  for (std::size_t j = 0; j < spec.n; ++j) {
    const double u = rng.Uniform();
    double acc = 0.0;
    int color = spec.num_colors - 1;
    for (int h = 0; h < spec.num_colors; ++h) {
      acc += spec.color_weights[static_cast<std::size_t>(h)];
      if (u < acc) {
        color = h;
        break;
      }
    }
    while (spec.color_weights[static_cast<std::size_t>(color)] <= 0.0) --color;
    out.colors[j] = color;
    const std::size_t blob =
        rng.Uniform() < spec.rho
            ? static_cast<std::size_t>(color) % spec.clusters
            : static_cast<std::size_t>(rng.Below(spec.clusters));
    for (std::size_t t = 0; t < spec.dim; ++t) {
      out.coordinates(j, t) = blob_centers(blob, t) + spec.spread * rng.Normal();
    }
    if (blob_of) blob_of->push_back(static_cast<int>(blob));
  }
  return out;
}

}  // namespace flc
