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

#include <cstdio>
#include <string>
#include <vector>

#include "json.hpp"

#include "flc/model.hpp"
#include "flc/solve_report.hpp"

namespace flc {

inline constexpr const char* kReportSchema = "flc-report/1";

// Reals in CSV use 17 significant digits so they round-trip exactly.
inline std::string FormatReal(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline nlohmann::json ToJson(const ViolationReport& v) {
  return {
      {"delta_color", v.delta_color},
      {"delta_points_per_label", v.delta_points_per_label},
      {"delta_centers_per_label", v.delta_centers_per_label},
      {"color_detail", v.color_detail},
      {"points_detail", v.points_detail},
      {"centers_detail", v.centers_detail},
  };
}

// Solver result without the per-point assignment (that can be large).
inline nlohmann::json ToJson(const SolveReport& r, Objective objective,
                             bool include_assignment) {
  nlohmann::json j = {
      {"status", std::string(StatusName(r.status))},
      {"path", r.path},
      {"objective",
       {{"kind", std::string(ObjectiveName(objective))},
        {"value", r.objective},
        {"root", DisplayCost(objective, r.objective)}}},
      {"distribution", r.distribution},
      {"center_labels", r.assignment.center_to_label},
      {"wall_time_ms", r.wall_time_ms},
  };
  j["scaled_objective"] = r.scaled_objective ? nlohmann::json(*r.scaled_objective)
                                             : nlohmann::json(nullptr);
  j["violations"] =
      r.violations ? ToJson(*r.violations) : nlohmann::json(nullptr);
  if (r.seed) j["seed"] = *r.seed;
  if (!r.note.empty()) j["note"] = r.note;
  if (include_assignment) j["point_to_center"] = r.assignment.point_to_center;
  return j;
}

// Problems with the required top-level keys of a report; empty when valid.
inline std::vector<std::string> ValidateReportSchema(const nlohmann::json& j) {
  std::vector<std::string> problems;
  auto need = [&](const char* key, nlohmann::json::value_t type) {
    if (!j.contains(key)) {
      problems.push_back(std::string("missing key '") + key + "'");
    } else if (j[key].type() != type &&
               !(type == nlohmann::json::value_t::number_float &&
                 j[key].is_number())) {
      problems.push_back(std::string("key '") + key + "' has the wrong type");
    }
  };
  if (!j.is_object()) return {"report is not an object"};
  need("schema", nlohmann::json::value_t::string);
  need("command", nlohmann::json::value_t::string);
  need("config", nlohmann::json::value_t::object);
  need("timing_ms", nlohmann::json::value_t::object);
  if (j.contains("schema") && j["schema"].is_string() &&
      j["schema"] != kReportSchema) {
    problems.push_back("unexpected schema version");
  }
  return problems;
}

}  // namespace flc
