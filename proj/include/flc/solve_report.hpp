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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flc/model.hpp"

namespace flc {

// Minimal additive relaxation under which an assignment satisfies each
// constraint family. Aggregates are maxima over the detail entries.
struct ViolationReport {
  double delta_color = 0.0;
  double delta_points_per_label = 0.0;
  double delta_centers_per_label = 0.0;
  std::vector<std::vector<double>> color_detail;  // [L][h]
  std::vector<double> points_detail;              // [L]
  std::vector<double> centers_detail;             // [L]
};

enum class SolveStatus {
  kOptimal,
  kInfeasible,
  kRandomized,        // constraints hold in expectation only
  kHeuristic,         // non-exact baseline
  kMethodInfeasible,  // special-case method has no answer; best effort result
};

inline std::string_view StatusName(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kRandomized: return "randomized";
    case SolveStatus::kHeuristic: return "heuristic";
    case SolveStatus::kMethodInfeasible: return "method_infeasible";
  }
  return "unknown";
}

struct SolveReport {
  SolveStatus status = SolveStatus::kInfeasible;
  std::string path;  // which solver produced the result
  Assignment assignment;
  double objective = 0.0;  // aggregated (sum or max), no root
  std::optional<std::int64_t> scaled_objective;
  std::vector<std::int64_t> distribution;  // points per label
  std::optional<ViolationReport> violations;
  std::optional<std::uint64_t> seed;
  double wall_time_ms = 0.0;
  std::string note;

  bool feasible() const { return status != SolveStatus::kInfeasible; }
};

inline SolveReport InfeasibleReport(std::string path) {
  SolveReport r;
  r.status = SolveStatus::kInfeasible;
  r.path = std::move(path);
  return r;
}

}  // namespace flc
