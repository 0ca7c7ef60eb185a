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
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "flc/data.hpp"
#include "flc/eval.hpp"
#include "flc/lcal.hpp"
#include "flc/lcul.hpp"
#include "flc/metrics.hpp"
#include "flc/model.hpp"
#include "flc/report.hpp"
#include "flc/rng.hpp"

// Command implementations behind the `flc` executable. Each command builds a
// JSON report (and a CSV table where one makes sense); tools/flc.cpp only
// parses flags and writes the output.
namespace flc::app {

enum ExitCode : int { kExitOk = 0, kExitInfeasible = 1, kExitUsage = 2, kExitInternal = 3 };

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LabelRule {
  enum class Kind { kThreshold, kList, kRandom, kUnassigned };
  Kind kind = Kind::kUnassigned;
  std::string column;  // threshold: coordinate column name or index
  std::string op;      // ">=", ">", "<=", "<"
  double tau = 0.0;
  std::vector<int> labels;  // list
  std::string text;
};

struct RunConfig {
  std::string command;
  std::optional<DatasetSpec> data;
  std::optional<GeneratorSpec> generator;
  std::string centers_path;
  std::size_t k = 5;
  int num_labels = 2;
  Objective objective = Objective::kKMedian;
  int lloyd_iterations = 20;
  Rational delta = Rational(1, 10);
  std::vector<std::pair<std::int64_t, std::int64_t>> size_bounds;
  std::vector<std::pair<std::int64_t, std::int64_t>> center_bounds;
  std::vector<Rational> alpha;  // empty: command default
  Rational eps_a = Rational(1, 5);
  Rational eps_a_prime = Rational(1, 5);
  Rational eps_b = Rational(1, 10);
  Rational eps_b_prime = Rational(1, 10);
  Rational eps_c = Rational(1, 10);
  Rational eps_c_prime = Rational(1, 10);
  LabelRule label_rule;
  std::string method = "randomized";
  std::uint64_t seed = 0;
  int reps = 50;
  unsigned threads = 1;
  std::string out;
  std::string format;  // empty: command default
  std::vector<std::size_t> sizes;
  std::size_t flow_max_n = 0;
  bool emit_assignment = false;
  double cost_scale = kDefaultCostScale;
  int max_labels = 3;
};

struct CommandResult {
  int exit_code = kExitOk;
  nlohmann::json report;
  std::string csv;  // empty when the command has no table form
};

// ---------------------------------------------------------------------------
// Flag value parsing.

inline std::vector<std::string> SplitList(const std::string& text, char sep = ',') {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline Rational ParseRationalFlag(const std::string& text, const char* flag) {
  try {
    return Rational::Parse(text);
  } catch (const std::exception&) {
    throw UsageError(std::string(flag) + ": cannot parse '" + text + "' as a number");
  }
}

inline std::vector<Rational> ParseRationalList(const std::string& text,
                                               const char* flag) {
  std::vector<Rational> out;
  for (const auto& item : SplitList(text)) out.push_back(ParseRationalFlag(item, flag));
  return out;
}

// "lo:hi,lo:hi,..." one pair per label.
inline std::vector<std::pair<std::int64_t, std::int64_t>> ParseBounds(
    const std::string& text, const char* flag) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (const auto& item : SplitList(text)) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw UsageError(std::string(flag) + ": expected lo:hi, got '" + item + "'");
    }
    try {
      out.emplace_back(std::stoll(item.substr(0, colon)),
                       std::stoll(item.substr(colon + 1)));
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": expected integers in '" + item + "'");
    }
  }
  return out;
}

// "col>=tau" (also >, <=, <), "list:0,1,1", "random", "unassigned".
inline LabelRule ParseLabelRule(const std::string& text) {
  LabelRule rule;
  rule.text = text;
  if (text.empty() || text == "unassigned") {
    rule.kind = LabelRule::Kind::kUnassigned;
    return rule;
  }
  if (text == "random") {
    rule.kind = LabelRule::Kind::kRandom;
    return rule;
  }
  if (text.rfind("list:", 0) == 0) {
    rule.kind = LabelRule::Kind::kList;
    for (const auto& item : SplitList(text.substr(5))) {
      try {
        rule.labels.push_back(std::stoi(item));
      } catch (const std::exception&) {
        throw UsageError("--label-rule: bad label '" + item + "'");
      }
    }
    return rule;
  }
  for (const char* op : {">=", "<=", ">", "<"}) {
    const auto pos = text.find(op);
    if (pos == std::string::npos || pos == 0) continue;
    rule.kind = LabelRule::Kind::kThreshold;
    rule.column = text.substr(0, pos);
    rule.op = op;
    const std::string value = text.substr(pos + std::string(op).size());
    char* end = nullptr;
    rule.tau = std::strtod(value.c_str(), &end);
    if (value.empty() || *end != '\0') {
      throw UsageError("--label-rule: bad threshold '" + value + "'");
    }
    return rule;
  }
  throw UsageError("--label-rule: expected col>=tau, list:..., random or unassigned");
}

// "n=1000,dim=2,colors=2,weights=0.5/0.5,clusters=4,spread=1,rho=0,seed=7".
inline GeneratorSpec ParseGeneratorSpec(const std::string& text,
                                        std::uint64_t default_seed) {
  GeneratorSpec spec;
  spec.seed = default_seed;
  bool weights_given = false;
  for (const auto& item : SplitList(text)) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--generate: expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    try {
      if (key == "n") spec.n = std::stoull(value);
      else if (key == "dim") spec.dim = std::stoull(value);
      else if (key == "colors") spec.num_colors = std::stoi(value);
      else if (key == "clusters") spec.clusters = std::stoull(value);
      else if (key == "spread") spec.spread = std::stod(value);
      else if (key == "rho") spec.rho = std::stod(value);
      else if (key == "seed") spec.seed = std::stoull(value);
      else if (key == "weights") {
        spec.color_weights.clear();
        for (const auto& w : SplitList(value, '/')) {
          spec.color_weights.push_back(Rational::Parse(w).ToDouble());
        }
        weights_given = true;
      } else {
        throw UsageError("--generate: unknown key '" + key + "'");
      }
    } catch (const UsageError&) {
      throw;
    } catch (const std::exception&) {
      throw UsageError("--generate: bad value for '" + key + "'");
    }
  }
  if (!weights_given) {
    spec.color_weights.assign(static_cast<std::size_t>(spec.num_colors),
                              1.0 / spec.num_colors);
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Pipeline pieces.

struct LoadedPoints {
  PointSet points;
  std::vector<std::string> coordinate_names;
  std::size_t dropped_rows = 0;
};

inline LoadedPoints LoadPoints(const RunConfig& config) {
  LoadedPoints out;
  if (config.data && config.generator) {
    throw UsageError("use either --data or --generate, not both");
  }
  if (config.data) {
    LoadedDataset ds = LoadDataset(*config.data);
    if (ds.dropped_rows > 0) {
      std::cerr << "warning: dropped " << ds.dropped_rows
                << " rows with missing values\n";
    }
    out.points = std::move(ds.points);
    out.coordinate_names = std::move(ds.coordinate_names);
    out.dropped_rows = ds.dropped_rows;
  } else if (config.generator) {
    out.points = Synthesize(*config.generator);
    for (std::size_t t = 0; t < config.generator->dim; ++t) {
      out.coordinate_names.push_back("x" + std::to_string(t));
    }
  } else {
    throw UsageError("no input: pass --data or --generate");
  }
  return out;
}

// Numeric rows, no header.
inline Matrix ReadCentersFile(const std::string& path, std::size_t dim) {
  std::ifstream in(path);
  if (!in) throw IngestionError("centers: cannot open '" + path + "'");
  std::vector<double> values;
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (flc::detail::Trim(line).empty()) continue;
    const auto fields = flc::detail::SplitFields(line, ',');
    if (fields.size() != dim) {
      throw IngestionError("centers: row " + std::to_string(rows + 1) + " has " +
                           std::to_string(fields.size()) + " values, expected " +
                           std::to_string(dim));
    }
    for (const auto& f : fields) {
      char* end = nullptr;
      const double v = std::strtod(f.c_str(), &end);
      if (f.empty() || *end != '\0') {
        throw IngestionError("centers: cannot parse '" + f + "'");
      }
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw IngestionError("centers: '" + path + "' is empty");
  return Matrix(rows, dim, std::move(values));
}

inline Matrix ChooseCenters(const RunConfig& config, const PointSet& points) {
  if (!config.centers_path.empty()) {
    return ReadCentersFile(config.centers_path, points.coordinates.cols());
  }
  return KMeansPlusPlusCenters(points.coordinates, config.k, config.seed,
                               config.lloyd_iterations);
}

// Random labeling with every label used when k >= m: dependent rounding of
// uniform label probabilities.
inline std::vector<int> RandomLabels(std::size_t k, int m, std::uint64_t seed) {
  const std::vector<double> alpha(static_cast<std::size_t>(m), 1.0 / m);
  return DependentRound(FractionalLabeling::Uniform(k, alpha), seed);
}

inline std::vector<int> ApplyLabelRule(const LabelRule& rule, const Matrix& centers,
                                       const std::vector<std::string>& names,
                                       int m, std::uint64_t seed) {
  const std::size_t k = centers.rows();
  switch (rule.kind) {
    case LabelRule::Kind::kUnassigned:
      throw UsageError("this command needs --label-rule (col>=tau, list:..., random)");
    case LabelRule::Kind::kRandom:
      return RandomLabels(k, m, seed);
    case LabelRule::Kind::kList: {
      if (rule.labels.size() != k) {
        throw UsageError("--label-rule list has " + std::to_string(rule.labels.size()) +
                         " labels for " + std::to_string(k) + " centers");
      }
      for (int L : rule.labels) {
        if (L < 0 || L >= m) throw UsageError("--label-rule list: label out of range");
      }
      return rule.labels;
    }
    case LabelRule::Kind::kThreshold: {
      if (m != 2) throw UsageError("threshold label rule needs exactly two labels");
      std::optional<std::size_t> col;
      for (std::size_t t = 0; t < names.size(); ++t) {
        if (names[t] == rule.column) col = t;
      }
      if (!col) {
        char* end = nullptr;
        const unsigned long idx = std::strtoul(rule.column.c_str(), &end, 10);
        if (*end == '\0' && idx < centers.cols()) col = idx;
      }
      if (!col) throw UsageError("--label-rule: unknown column '" + rule.column + "'");
      std::vector<int> labels(k);
      for (std::size_t i = 0; i < k; ++i) {
        const double v = centers(i, *col);
        bool positive = false;
        if (rule.op == ">=") positive = v >= rule.tau;
        else if (rule.op == ">") positive = v > rule.tau;
        else if (rule.op == "<=") positive = v <= rule.tau;
        else positive = v < rule.tau;
        labels[i] = positive ? 0 : 1;
      }
      return labels;
    }
  }
  return {};
}

inline std::vector<Rational> PopulationRatios(const Instance& instance) {
  std::vector<Rational> r;
  for (int h = 0; h < instance.num_colors(); ++h) r.push_back(instance.PopulationRatio(h));
  return r;
}

// l_h = (1 - delta) r_h, u_h = min(1, (1 + delta) r_h).
inline ColorBounds DeltaRule(const Instance& instance, const Rational& delta) {
  if (delta < Rational(0) || delta > Rational(1)) {
    throw UsageError("--delta must lie in [0, 1]");
  }
  ColorBounds b;
  for (const Rational& r : PopulationRatios(instance)) {
    b.lower.push_back((Rational(1) - delta) * r);
    b.upper.push_back(std::min(Rational(1), (Rational(1) + delta) * r));
  }
  return b;
}

inline LabelConstraints LcalConstraints(const RunConfig& config,
                                        const Instance& instance) {
  LabelConstraints c = LabelConstraints::Unconstrained(
      config.num_labels, instance.num_colors(),
      static_cast<std::int64_t>(instance.n()), static_cast<std::int64_t>(instance.k()));
  const ColorBounds b = DeltaRule(instance, config.delta);
  c.SetColorBounds(b.lower, b.upper);
  auto apply = [&](const auto& pairs, auto& lower, auto& upper, const char* flag) {
    if (pairs.empty()) return;
    if (pairs.size() != static_cast<std::size_t>(config.num_labels)) {
      throw UsageError(std::string(flag) + ": need one lo:hi pair per label");
    }
    for (std::size_t L = 0; L < pairs.size(); ++L) {
      lower[L] = pairs[L].first;
      upper[L] = pairs[L].second;
    }
  };
  apply(config.size_bounds, c.size_lower, c.size_upper, "--size-bounds");
  apply(config.center_bounds, c.center_lower, c.center_upper, "--center-bounds");
  c.Validate();
  return c;
}

inline std::vector<Rational> AlphaOrDefault(const RunConfig& config) {
  if (!config.alpha.empty()) {
    if (config.alpha.size() != static_cast<std::size_t>(config.num_labels)) {
      throw UsageError("--alpha needs one value per label");
    }
    return config.alpha;
  }
  if (config.num_labels == 2) return {Rational(1, 4), Rational(3, 4)};
  return std::vector<Rational>(static_cast<std::size_t>(config.num_labels),
                               Rational(1, config.num_labels));
}

inline ClpSpec BuildClp(const RunConfig& config, const Instance& instance) {
  ClpSpec clp = ClpSpec::Uniform(AlphaOrDefault(config), PopulationRatios(instance),
                                 config.eps_a, config.eps_a_prime, config.eps_b,
                                 config.eps_b_prime, config.eps_c, config.eps_c_prime);
  clp.Validate();
  return clp;
}

inline LcalOptions Options(const RunConfig& config) {
  LcalOptions o;
  o.cost_scale = config.cost_scale;
  o.max_labels = config.max_labels;
  o.threads = config.threads;
  return o;
}

inline nlohmann::json ConfigJson(const RunConfig& c) {
  nlohmann::json j;
  j["command"] = c.command;
  if (c.data) {
    j["data"] = {{"path", c.data->path},
                 {"coords", c.data->coordinate_columns},
                 {"color_col", c.data->color_column},
                 {"delimiter", std::string(1, c.data->delimiter)},
                 {"header", c.data->has_header},
                 {"row_limit", c.data->row_limit ? nlohmann::json(*c.data->row_limit)
                                                 : nlohmann::json(nullptr)},
                 {"normalize", c.data->normalization == Normalization::kZScore
                                   ? "zscore" : "none"}};
  }
  if (c.generator) {
    j["generate"] = {{"n", c.generator->n},
                     {"dim", c.generator->dim},
                     {"colors", c.generator->num_colors},
                     {"weights", c.generator->color_weights},
                     {"clusters", c.generator->clusters},
                     {"spread", c.generator->spread},
                     {"rho", c.generator->rho},
                     {"seed", c.generator->seed}};
  }
  if (!c.centers_path.empty()) j["centers"] = c.centers_path;
  j["k"] = c.k;
  j["labels"] = c.num_labels;
  j["objective"] = std::string(ObjectiveName(c.objective));
  j["lloyd_iterations"] = c.lloyd_iterations;
  j["delta"] = c.delta.ToString();
  j["size_bounds"] = c.size_bounds;
  j["center_bounds"] = c.center_bounds;
  std::vector<std::string> alpha;
  for (const auto& a : c.alpha) alpha.push_back(a.ToString());
  j["alpha"] = alpha;
  j["eps"] = {{"A", c.eps_a.ToString()},       {"A_prime", c.eps_a_prime.ToString()},
              {"B", c.eps_b.ToString()},       {"B_prime", c.eps_b_prime.ToString()},
              {"C", c.eps_c.ToString()},       {"C_prime", c.eps_c_prime.ToString()}};
  j["label_rule"] = c.label_rule.text;
  j["method"] = c.method;
  j["seed"] = c.seed;
  j["reps"] = c.reps;
  j["sizes"] = c.sizes;
  j["cost_scale"] = c.cost_scale;
  return j;
}

inline double MsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                   start)
      .count();
}

inline nlohmann::json InstanceJson(const Instance& instance, const LoadedPoints& lp) {
  nlohmann::json centers = nlohmann::json::array();
  for (std::size_t i = 0; i < instance.k(); ++i) {
    const auto row = instance.centers().row(i);
    centers.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return {{"n", instance.n()},
          {"k", instance.k()},
          {"dim", instance.centers().cols()},
          {"num_colors", instance.num_colors()},
          {"color_legend", instance.points().legend},
          {"color_counts", instance.color_counts()},
          {"coordinate_names", lp.coordinate_names},
          {"dropped_rows", lp.dropped_rows},
          {"centers", centers}};
}

inline nlohmann::json PofJson(std::optional<double> pof) {
  return pof ? nlohmann::json(*pof) : nlohmann::json(nullptr);
}

// ---------------------------------------------------------------------------
// Commands.

inline CommandResult SolveLcalCommand(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const LoadedPoints lp = LoadPoints(config);
  const auto t_centers = std::chrono::steady_clock::now();
  Matrix centers = ChooseCenters(config, lp.points);
  const double centers_ms = MsSince(t_centers);
  const Instance instance(lp.points, std::move(centers), config.objective);
  const std::vector<int> labels = ApplyLabelRule(
      config.label_rule, instance.centers(), lp.coordinate_names, config.num_labels,
      config.seed);
  const LabelConstraints constraints = LcalConstraints(config, instance);

  const SolveReport fair = SolveLcalAuto(instance, labels, constraints, Options(config));

  Assignment nearest = NearestCenter(instance);
  nearest.center_to_label = labels;
  const double blind_cost = ObjectiveValue(instance, nearest);
  const ViolationReport nearest_violations = Violations(instance, nearest, constraints);
  const ColorBounds bounds = DeltaRule(instance, config.delta);
  const SolveReport quota =
      PerClusterQuotaBaseline(instance, labels, bounds, config.cost_scale);

  CommandResult result;
  nlohmann::json& j = result.report;
  j["schema"] = kReportSchema;
  j["command"] = "solve-lcal";
  j["config"] = ConfigJson(config);
  j["instance"] = InstanceJson(instance, lp);
  j["center_labels"] = labels;
  j["status"] = std::string(StatusName(fair.status));
  j["solver"] = ToJson(fair, instance.objective(), config.emit_assignment);
  j["color_blind"] = {{"objective", blind_cost},
                      {"root", DisplayCost(instance.objective(), blind_cost)},
                      {"violations", ToJson(nearest_violations)}};
  nlohmann::json quota_json = ToJson(quota, instance.objective(), false);
  quota_json["heuristic"] = true;
  quota_json["pof"] = quota.status == SolveStatus::kHeuristic
                         ? PofJson(PriceOfFairness(quota.objective, blind_cost))
                         : nlohmann::json(nullptr);
  j["baselines"] = {{"per_cluster_quota_heuristic", quota_json}};
  if (fair.feasible()) {
    j["pof"] = PofJson(PriceOfFairness(fair.objective, blind_cost));
    j["pof_root"] = PofJson(PriceOfFairness(DisplayCost(instance.objective(), fair.objective),
                                            DisplayCost(instance.objective(), blind_cost)));
  } else {
    j["pof"] = nullptr;
    j["pof_root"] = nullptr;
    result.exit_code = kExitInfeasible;
  }
  j["timing_ms"] = {{"centers", centers_ms},
                    {"solve", fair.wall_time_ms},
                    {"total", MsSince(start)}};

  std::ostringstream csv;
  csv << "status,path,objective,color_blind_objective,pof,delta_color,"
         "delta_points_per_label,baseline_pof,baseline_delta_color\n";
  csv << StatusName(fair.status) << ',' << fair.path << ','
      << (fair.feasible() ? FormatReal(fair.objective) : "") << ','
      << FormatReal(blind_cost) << ','
      << (j["pof"].is_number() ? FormatReal(j["pof"].get<double>()) : "") << ','
      << (fair.violations ? FormatReal(fair.violations->delta_color) : "") << ','
      << (fair.violations ? FormatReal(fair.violations->delta_points_per_label) : "")
      << ','
      << (quota_json["pof"].is_number() ? FormatReal(quota_json["pof"].get<double>()) : "")
      << ',' << (quota.violations ? FormatReal(quota.violations->delta_color) : "")
      << '\n';
  result.csv = csv.str();
  return result;
}

namespace detail {

struct RunSummary {
  std::string algorithm;
  std::vector<double> pof, delta_color, delta_points, delta_centers;
  std::vector<std::vector<std::int64_t>> points_per_label;
  std::vector<std::vector<std::int64_t>> centers_per_label;
  std::vector<std::uint64_t> seeds;
};

inline double Mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double StdDev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = Mean(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline void Record(RunSummary& s, const Instance& instance, const Assignment& a,
                   const ClpSpec& clp, double blind_cost, std::uint64_t seed) {
  const ViolationReport v = Violations(instance, a, clp);
  const auto tallies = Tallies(instance, a, clp.num_labels());
  const auto pof = PriceOfFairness(ObjectiveValue(instance, a), blind_cost);
  s.pof.push_back(pof.value_or(std::nan("")));
  s.delta_color.push_back(v.delta_color);
  s.delta_points.push_back(v.delta_points_per_label);
  s.delta_centers.push_back(v.delta_centers_per_label);
  std::vector<std::int64_t> pts;
  std::vector<std::int64_t> ctr;
  for (const auto& t : tallies) {
    pts.push_back(t.points);
    ctr.push_back(t.centers);
  }
  s.points_per_label.push_back(std::move(pts));
  s.centers_per_label.push_back(std::move(ctr));
  s.seeds.push_back(seed);
}

inline nlohmann::json SummaryJson(const RunSummary& s) {
  nlohmann::json runs = nlohmann::json::array();
  for (std::size_t r = 0; r < s.seeds.size(); ++r) {
    runs.push_back({{"replication", r},
                    {"seed", s.seeds[r]},
                    {"pof", s.pof[r]},
                    {"delta_color", s.delta_color[r]},
                    {"delta_points_per_label", s.delta_points[r]},
                    {"delta_centers_per_label", s.delta_centers[r]},
                    {"points_per_label", s.points_per_label[r]},
                    {"centers_per_label", s.centers_per_label[r]}});
  }
  std::vector<double> label0_share;
  for (const auto& p : s.points_per_label) {
    const double total = static_cast<double>(std::accumulate(p.begin(), p.end(), std::int64_t{0}));
    label0_share.push_back(total > 0 ? static_cast<double>(p[0]) / total : 0.0);
  }
  return {{"algorithm", s.algorithm},
          {"mean", {{"pof", Mean(s.pof)},
                    {"delta_color", Mean(s.delta_color)},
                    {"delta_points_per_label", Mean(s.delta_points)},
                    {"delta_centers_per_label", Mean(s.delta_centers)}}},
          {"label0_point_share_stddev", StdDev(label0_share)},
          {"runs", runs}};
}

}  // namespace detail

inline CommandResult SolveLculCommand(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const LoadedPoints lp = LoadPoints(config);
  const auto t_centers = std::chrono::steady_clock::now();
  Matrix centers = ChooseCenters(config, lp.points);
  const double centers_ms = MsSince(t_centers);
  const Instance instance(lp.points, std::move(centers), config.objective);
  const ClpSpec clp = BuildClp(config, instance);
  const double blind_cost = ObjectiveValue(instance, NearestCenter(instance));

  CommandResult result;
  nlohmann::json& j = result.report;
  j["schema"] = kReportSchema;
  j["command"] = "solve-lcul";
  j["config"] = ConfigJson(config);
  j["instance"] = InstanceJson(instance, lp);
  j["method"] = config.method;
  j["color_blind_objective"] = blind_cost;
  const auto t_solve = std::chrono::steady_clock::now();

  if (config.method == "randomized") {
    if (config.reps < 1) throw UsageError("--reps must be >= 1");
    const auto reps = static_cast<std::size_t>(config.reps);
    const auto alpha = AlphaToDouble(clp);
    ColorBounds fc_bounds;
    const LabelConstraints expanded = clp.ToLabelConstraints(
        static_cast<std::int64_t>(instance.n()), static_cast<std::int64_t>(instance.k()));
    fc_bounds.lower = expanded.color_lower[0];
    fc_bounds.upper = expanded.color_upper[0];

    std::vector<Assignment> lfc(reps), ncra(reps), fc(reps);
    std::vector<std::uint64_t> seeds(reps);
    ParallelFor(reps, config.threads, [&](std::size_t r) {
      seeds[r] = ReplicationSeed(config.seed, r);
      lfc[r] = SolveLculRandomized(instance, clp, seeds[r]).assignment;
      ncra[r] = Ncra(instance, alpha, seeds[r]);
      fc[r] = PerClusterQuotaBaseline(instance, ncra[r].center_to_label, fc_bounds,
                                      config.cost_scale)
                  .assignment;
    });
    detail::RunSummary s_lfc, s_ncra, s_fc;
    s_lfc.algorithm = "LFC";
    s_ncra.algorithm = "NCRA";
    s_fc.algorithm = "FC_per_cluster_quota_heuristic";
    for (std::size_t r = 0; r < reps; ++r) {
      detail::Record(s_lfc, instance, lfc[r], clp, blind_cost, seeds[r]);
      detail::Record(s_ncra, instance, ncra[r], clp, blind_cost, seeds[r]);
      detail::Record(s_fc, instance, fc[r], clp, blind_cost, seeds[r]);
    }
    j["status"] = "randomized";
    j["algorithms"] = {detail::SummaryJson(s_lfc), detail::SummaryJson(s_ncra),
                       detail::SummaryJson(s_fc)};
    std::ostringstream csv;
    csv << "algorithm,replication,seed,pof,delta_color,delta_points_per_label,"
           "delta_centers_per_label\n";
    for (const auto* s : {&s_lfc, &s_ncra, &s_fc}) {
      for (std::size_t r = 0; r < reps; ++r) {
        csv << s->algorithm << ',' << r << ',' << s->seeds[r] << ','
            << FormatReal(s->pof[r]) << ',' << FormatReal(s->delta_color[r]) << ','
            << FormatReal(s->delta_points[r]) << ',' << FormatReal(s->delta_centers[r])
            << '\n';
      }
    }
    result.csv = csv.str();
  } else {
    LabelConstraints constraints = clp.ToLabelConstraints(
        static_cast<std::int64_t>(instance.n()), static_cast<std::int64_t>(instance.k()));
    SolveReport r;
    if (config.method == "fpt") {
      FptOptions options;
      options.lcal = Options(config);
      r = SolveLculExactFpt(instance, constraints, options);
    } else if (config.method == "color-only") {
      r = SolveLculColorOnly(instance, constraints);
    } else if (config.method == "center-count-only") {
      r = SolveLculCenterCountOnly(instance, constraints);
    } else {
      throw UsageError("--method must be randomized, fpt, color-only or center-count-only");
    }
    j["status"] = std::string(StatusName(r.status));
    j["solver"] = ToJson(r, instance.objective(), config.emit_assignment);
    j["pof"] = r.feasible() ? PofJson(PriceOfFairness(r.objective, blind_cost))
                            : nlohmann::json(nullptr);
    if (!r.feasible()) result.exit_code = kExitInfeasible;
    std::ostringstream csv;
    csv << "status,path,objective,pof\n"
        << StatusName(r.status) << ',' << r.path << ','
        << (r.feasible() ? FormatReal(r.objective) : "") << ','
        << (j["pof"].is_number() ? FormatReal(j["pof"].get<double>()) : "") << '\n';
    result.csv = csv.str();
  }
  j["timing_ms"] = {{"centers", centers_ms},
                    {"solve", MsSince(t_solve)},
                    {"total", MsSince(start)}};
  return result;
}

inline CommandResult TradeoffCommand(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const LoadedPoints lp = LoadPoints(config);
  Matrix centers = ChooseCenters(config, lp.points);
  const Instance instance(lp.points, std::move(centers), config.objective);
  if (config.num_labels != 2) throw UsageError("tradeoff needs exactly two labels");
  const std::vector<int> labels = ApplyLabelRule(
      config.label_rule, instance.centers(), lp.coordinate_names, 2, config.seed);
  const auto curve = TradeoffCurve(instance, labels, config.cost_scale);
  double max_cost = 0.0;
  for (const auto& p : curve) max_cost = std::max(max_cost, p.cost);

  CommandResult result;
  nlohmann::json& j = result.report;
  j["schema"] = kReportSchema;
  j["command"] = "tradeoff";
  j["config"] = ConfigJson(config);
  j["instance"] = InstanceJson(instance, lp);
  j["center_labels"] = labels;
  nlohmann::json rows = nlohmann::json::array();
  std::ostringstream csv;
  csv << "positive_count,cost,cost_normalized,scaled_cost\n";
  for (const auto& p : curve) {
    const double norm = max_cost > 0 ? p.cost / max_cost : 0.0;
    rows.push_back({{"positive_count", p.positive_count},
                    {"cost", p.cost},
                    {"cost_normalized", norm},
                    {"scaled_cost", p.scaled_cost}});
    csv << p.positive_count << ',' << FormatReal(p.cost) << ',' << FormatReal(norm)
        << ',' << p.scaled_cost << '\n';
  }
  j["curve"] = rows;
  j["timing_ms"] = {{"total", MsSince(start)}};
  result.csv = csv.str();
  return result;
}

// Random subsample of `size` rows (without replacement, original order kept).
inline PointSet Subsample(const PointSet& points, std::size_t size, std::uint64_t seed) {
  if (size >= points.size()) return points;
  std::vector<std::size_t> idx(points.size());
  std::iota(idx.begin(), idx.end(), 0);
  CounterRng rng(seed);
  for (std::size_t i = 0; i < size; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.Below(idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(size);
  std::sort(idx.begin(), idx.end());
  PointSet out;
  out.num_colors = points.num_colors;
  out.legend = points.legend;
  out.coordinates = Matrix(size, points.coordinates.cols());
  for (std::size_t r = 0; r < size; ++r) {
    const auto src = points.coordinates.row(idx[r]);
    std::copy(src.begin(), src.end(), out.coordinates.row(r).begin());
    out.colors.push_back(points.colors[idx[r]]);
  }
  return out;
}

inline constexpr double kScalabilityBudgetMs = 90'000.0;

inline CommandResult BenchCommand(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::size_t> sizes = config.sizes;
  if (sizes.empty()) sizes = {10'000, 50'000, 100'000, 250'000, 500'000};
  std::optional<LoadedPoints> dataset;
  if (config.data) dataset = LoadPoints(config);

  CommandResult result;
  nlohmann::json& j = result.report;
  j["schema"] = kReportSchema;
  j["command"] = "bench";
  j["config"] = ConfigJson(config);
  nlohmann::json rows = nlohmann::json::array();
  std::ostringstream csv;
  csv << "n,k,centers_ms,lcal_two_label_ms,lcal_objective,lcul_randomized_ms,"
         "lcul_objective,lcal_flow_ms\n";
  for (std::size_t size : sizes) {
    PointSet points;
    if (dataset) {
      points = Subsample(dataset->points, size, config.seed);
    } else {
      GeneratorSpec g = config.generator.value_or(GeneratorSpec{});
      g.n = size;
      if (!config.generator) g.seed = config.seed;
      points = Synthesize(g);
    }
    const auto t_centers = std::chrono::steady_clock::now();
    Matrix centers = KMeansPlusPlusCenters(points.coordinates, config.k, config.seed,
                                           config.lloyd_iterations);
    const double centers_ms = MsSince(t_centers);
    const Instance instance(std::move(points), std::move(centers), config.objective);
    const std::vector<int> labels = RandomLabels(instance.k(), 2, config.seed);
    const LabelConstraints exact = ExactPreservationConstraints(instance, 2);

    nlohmann::json row = {{"n", instance.n()}, {"k", instance.k()},
                          {"timing_ms", {{"centers", centers_ms}}}};
    std::string lcal_ms, lcal_obj, flow_ms;
    if (instance.objective() != Objective::kKCenter) {
      const SolveReport fast = SolveTwoLabelExact(instance, labels, exact, Options(config));
      row["lcal_two_label"] = {{"status", std::string(StatusName(fast.status))},
                               {"objective", fast.objective}};
      row["timing_ms"]["lcal_two_label"] = fast.wall_time_ms;
      row["lcal_under_90s"] = fast.wall_time_ms < kScalabilityBudgetMs;
      lcal_ms = FormatReal(fast.wall_time_ms);
      lcal_obj = FormatReal(fast.objective);
      if (instance.n() <= config.flow_max_n) {
        const SolveReport flow = SolveLcal(instance, labels, exact, Options(config));
        row["lcal_flow"] = {{"status", std::string(StatusName(flow.status))},
                            {"objective", flow.objective}};
        row["timing_ms"]["lcal_flow"] = flow.wall_time_ms;
        flow_ms = FormatReal(flow.wall_time_ms);
      }
    }
    RunConfig lcul_config = config;
    lcul_config.num_labels = 2;
    const ClpSpec clp = BuildClp(lcul_config, instance);
    const SolveReport lcul = SolveLculRandomized(instance, clp, config.seed);
    row["lcul_randomized"] = {{"objective", lcul.objective}};
    row["timing_ms"]["lcul_randomized"] = lcul.wall_time_ms;
    row["lcul_under_90s"] = lcul.wall_time_ms < kScalabilityBudgetMs;
    rows.push_back(row);
    csv << instance.n() << ',' << instance.k() << ',' << FormatReal(centers_ms) << ','
        << lcal_ms << ',' << lcal_obj << ',' << FormatReal(lcul.wall_time_ms) << ','
        << FormatReal(lcul.objective) << ',' << flow_ms << '\n';
  }
  j["rows"] = rows;
  j["timing_ms"] = {{"total", MsSince(start)}};
  result.csv = csv.str();
  return result;
}

// ---------------------------------------------------------------------------
// Self-test against brute force on bundled fixtures and seeded random
// instances.

// Points 0, 1, 4, 5 on a line with centers 0.5 (positive) and 4.5 (negative).
// `alternating` colors are red, blue, red, blue; otherwise red, red, blue, blue.
inline Instance LineFixture(bool alternating, Objective objective) {
  PointSet p;
  p.coordinates = Matrix(4, 1, {0.0, 1.0, 4.0, 5.0});
  p.colors = alternating ? std::vector<int>{0, 1, 0, 1} : std::vector<int>{0, 0, 1, 1};
  p.num_colors = 2;
  p.legend = {"red", "blue"};
  return Instance(std::move(p), Matrix(2, 1, {0.5, 4.5}), objective);
}

namespace detail {

inline Instance RandomSmallInstance(CounterRng& rng, std::size_t n, std::size_t k,
                                    int colors, Objective objective) {
  PointSet p;
  p.num_colors = colors;
  p.coordinates = Matrix(n, 2);
  for (std::size_t j = 0; j < n; ++j) {
    p.coordinates(j, 0) = 10.0 * rng.Uniform();
    p.coordinates(j, 1) = 10.0 * rng.Uniform();
    p.colors.push_back(static_cast<int>(rng.Below(static_cast<std::uint64_t>(colors))));
  }
  Matrix centers(k, 2);
  for (std::size_t i = 0; i < k; ++i) {
    centers(i, 0) = 10.0 * rng.Uniform();
    centers(i, 1) = 10.0 * rng.Uniform();
  }
  return Instance(std::move(p), std::move(centers), objective);
}

}  // namespace detail

inline CommandResult OracleCommand(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  nlohmann::json checks = nlohmann::json::array();
  bool all_pass = true;
  auto check = [&](const std::string& name, double expected, double actual, double tol) {
    const bool pass = std::abs(expected - actual) <= tol * std::max(1.0, std::abs(expected));
    all_pass = all_pass && pass;
    checks.push_back({{"name", name}, {"expected", expected}, {"actual", actual},
                      {"pass", pass}});
  };
  auto check_flag = [&](const std::string& name, bool pass) {
    all_pass = all_pass && pass;
    checks.push_back({{"name", name}, {"pass", pass}});
  };
  const std::vector<int> labels{0, 1};
  const double scale = config.cost_scale;

  {
    const Instance alt = LineFixture(true, Objective::kKMedian);
    check("line-alternating nearest k-median", 2.0, ObjectiveValue(alt, NearestCenter(alt)), 1e-12);
    const Instance alt_kc = LineFixture(true, Objective::kKCenter);
    check("line-alternating nearest k-center", 0.5, ObjectiveValue(alt_kc, NearestCenter(alt_kc)), 0.0);
  }
  {
    const Instance split = LineFixture(false, Objective::kKMedian);
    LabelConstraints c = LabelConstraints::Unconstrained(2, 2, 4, 2);
    c.color_lower[0] = {Rational(1, 2), Rational(1, 2)};
    c.color_upper[0] = {Rational(1, 2), Rational(1, 2)};
    c.size_lower = {2, 2};
    c.size_upper = {2, 2};
    const BruteForceResult bf = BruteForceLcal(split, labels, c, scale);
    check_flag("line-split brute force feasible", bf.feasible);
    check("line-split brute force", 8.0, bf.objective, 1e-12);
    check("line-split flow", bf.objective, SolveLcal(split, labels, c).objective, 1e-9);
    check("line-split two-label sweep", bf.objective,
          SolveTwoLabelSweep(split, labels, c).objective, 1e-9);
    const LabelConstraints exact = ExactPreservationConstraints(split, 2);
    check("line-split two-label exact", BruteForceLcal(split, labels, exact, scale).objective,
          SolveTwoLabelExact(split, labels, exact).objective, 1e-9);
    const Instance split_kc = LineFixture(false, Objective::kKCenter);
    check("line-split k-center", BruteForceLcal(split_kc, labels, c, scale).objective,
          SolveLcalKCenter(split_kc, labels, c).objective, 0.0);
    check("line-split two-label k-center", BruteForceLcal(split_kc, labels, c, scale).objective,
          SolveTwoLabelKCenter(split_kc, labels, c).objective, 0.0);
    const auto curve = TradeoffCurve(split, labels, scale);
    for (const auto& p : curve) {
      LabelConstraints fixed = exact;
      fixed.size_lower[0] = fixed.size_upper[0] = p.positive_count;
      const BruteForceResult at = BruteForceLcal(split, labels, fixed, scale);
      check("line-split trade-off at |P| = " + std::to_string(p.positive_count),
            static_cast<double>(at.scaled_objective), static_cast<double>(p.scaled_cost),
            0.0);
    }
  }
  CounterRng rng(config.seed);
  const int random_cases = std::max(0, config.reps);
  for (int t = 0; t < random_cases; ++t) {
    const std::size_t n = 3 + rng.Below(5);
    const std::size_t k = 2 + rng.Below(2);
    const int colors = 1 + static_cast<int>(rng.Below(2));
    const auto objective = static_cast<Objective>(rng.Below(3));
    const Instance inst = detail::RandomSmallInstance(rng, n, k, colors, objective);
    // Bounds around a random assignment keep the instance feasible.
    std::vector<int> lab(k);
    for (auto& L : lab) L = static_cast<int>(rng.Below(2));
    LabelConstraints c = LabelConstraints::Unconstrained(
        2, colors, static_cast<std::int64_t>(n), static_cast<std::int64_t>(k));
    Assignment witness;
    witness.center_to_label = lab;
    for (std::size_t j = 0; j < n; ++j) {
      witness.point_to_center.push_back(static_cast<int>(rng.Below(k)));
    }
    const auto tallies = Tallies(inst, witness, 2);
    for (std::size_t L = 0; L < 2; ++L) {
      if (tallies[L].points == 0) continue;
      for (std::size_t h = 0; h < static_cast<std::size_t>(colors); ++h) {
        const Rational share(tallies[L].by_color[h], tallies[L].points);
        c.color_lower[L][h] = std::max(Rational(0), share - Rational(1, 4));
        c.color_upper[L][h] = std::min(Rational(1), share + Rational(1, 4));
      }
    }
    const std::string tag = "random #" + std::to_string(t);
    const BruteForceResult bf = BruteForceLcal(inst, lab, c, scale);
    const SolveReport solved = SolveLcal(inst, lab, c, Options(config));
    check_flag(tag + " lcal feasibility agrees", bf.feasible == solved.feasible());
    if (bf.feasible && solved.feasible()) {
      check(tag + " lcal objective", bf.objective, solved.objective, 1e-9);
    }
    const SolveReport auto_solved = SolveLcalAuto(inst, lab, c, Options(config));
    check_flag(tag + " " + auto_solved.path + " feasibility agrees",
               bf.feasible == auto_solved.feasible());
    if (bf.feasible && auto_solved.feasible()) {
      check(tag + " " + auto_solved.path + " objective", bf.objective, auto_solved.objective,
            1e-9);
    }
    const BruteForceResult bful = BruteForceLcul(inst, c, scale);
    const SolveReport fpt = SolveLculExactFpt(inst, c);
    check_flag(tag + " lcul feasibility agrees", bful.feasible == fpt.feasible());
    if (bful.feasible && fpt.feasible()) {
      check(tag + " lcul objective", bful.objective, fpt.objective, 1e-9);
    }
  }

  CommandResult result;
  nlohmann::json& j = result.report;
  j["schema"] = kReportSchema;
  j["command"] = "oracle";
  j["config"] = ConfigJson(config);
  j["checks"] = checks;
  j["all_pass"] = all_pass;
  j["timing_ms"] = {{"total", MsSince(start)}};
  std::ostringstream csv;
  csv << "name,pass\n";
  for (const auto& c : checks) {
    csv << '"' << c["name"].get<std::string>() << "\"," << (c["pass"].get<bool>() ? 1 : 0)
        << '\n';
  }
  result.csv = csv.str();
  result.exit_code = all_pass ? kExitOk : kExitInternal;
  return result;
}

inline CommandResult Dispatch(const RunConfig& config) {
  if (config.command == "solve-lcal") return SolveLcalCommand(config);
  if (config.command == "solve-lcul") return SolveLculCommand(config);
  if (config.command == "tradeoff") return TradeoffCommand(config);
  if (config.command == "bench") return BenchCommand(config);
  if (config.command == "oracle") return OracleCommand(config);
  throw UsageError("unknown command '" + config.command + "'");
}

inline std::string DefaultFormat(const std::string& command) {
  return command == "tradeoff" ? "csv" : "json";
}

inline std::string Render(const RunConfig& config, const CommandResult& result) {
  const std::string format =
      config.format.empty() ? DefaultFormat(config.command) : config.format;
  if (format == "csv") {
    if (result.csv.empty()) throw UsageError("this command has no CSV output");
    return result.csv;
  }
  if (format != "json") throw UsageError("--format must be json or csv");
  return result.report.dump(2) + "\n";
}

}  // namespace flc::app
