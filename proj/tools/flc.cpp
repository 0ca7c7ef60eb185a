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

// flc: fair labeled clustering from the command line.
//
//   flc solve-lcal --data adult.csv --coords age,education-num --color-col sex
//       --k 5 --label-rule "age>=40" --delta 0.1
//   flc solve-lcul --generate n=2000,colors=2 --k 10 --reps 50
//   flc tradeoff --generate n=5000 --k 5 --label-rule random
//   flc bench --sizes 10000,100000
//   flc oracle --reps 50

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "flc.hpp"

namespace {

struct Flags {
  std::string data;
  std::string coords;
  std::string color_col;
  char delimiter = ',';
  bool no_header = false;
  std::size_t row_limit = 0;
  bool zscore = false;
  std::string generate;
  std::string objective = "kmedian";
  std::string delta = "0.1";
  std::string alpha;
  std::string eps_a = "0.2";
  std::string eps_a_prime = "0.2";
  std::string eps_b = "0.1";
  std::string eps_b_prime = "0.1";
  std::string eps_c = "0.1";
  std::string eps_c_prime = "0.1";
  std::string size_bounds;
  std::string center_bounds;
  std::string label_rule;
  std::string sizes;
  bool reps_given = false;
};

void AddCommonOptions(CLI::App* cmd, flc::app::RunConfig& config, Flags& flags) {
  cmd->add_option("--data", flags.data, "CSV file with points");
  cmd->add_option("--coords", flags.coords, "comma-separated coordinate columns");
  cmd->add_option("--color-col", flags.color_col, "protected-group column");
  cmd->add_option("--delimiter", flags.delimiter, "field delimiter");
  cmd->add_flag("--no-header", flags.no_header, "columns are zero-based indices");
  cmd->add_option("--row-limit", flags.row_limit, "read at most this many rows");
  cmd->add_flag("--zscore", flags.zscore, "z-score normalize coordinates");
  cmd->add_option("--generate", flags.generate,
                  "synthetic data: n=,dim=,colors=,weights=a/b,clusters=,spread=,rho=,seed=");
  cmd->add_option("--centers", config.centers_path, "CSV of fixed centers (no header)");
  cmd->add_option("--k", config.k, "number of centers")->check(CLI::PositiveNumber);
  cmd->add_option("--lloyd", config.lloyd_iterations, "Lloyd iterations after seeding")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--labels", config.num_labels, "number of labels m")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--objective", flags.objective, "kcenter, kmedian or kmeans");
  cmd->add_option("--seed", config.seed, "random seed");
  cmd->add_option("--threads", config.threads, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", config.out, "write output here instead of stdout");
  cmd->add_option("--format", config.format, "json or csv");
  cmd->add_option("--cost-scale", config.cost_scale, "integer cost scaling factor");
  cmd->add_flag("--emit-assignment", config.emit_assignment,
                "include point_to_center in the report");
}

void AddLcalOptions(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--label-rule", flags.label_rule,
                  "col>=tau (also >, <=, <), list:0,1,..., random");
  cmd->add_option("--delta", flags.delta, "color-proportion slack in [0, 1]");
  cmd->add_option("--size-bounds", flags.size_bounds, "per-label lo:hi point counts");
  cmd->add_option("--center-bounds", flags.center_bounds, "per-label lo:hi center counts");
}

void AddLculOptions(CLI::App* cmd, flc::app::RunConfig& config, Flags& flags) {
  cmd->add_option("--alpha", flags.alpha, "label proportions, e.g. 1/4,3/4");
  cmd->add_option("--eps-a", flags.eps_a, "color share may fall this far below r_h");
  cmd->add_option("--eps-a-prime", flags.eps_a_prime, "color share may rise this far above r_h");
  cmd->add_option("--eps-b", flags.eps_b, "label point share slack below alpha");
  cmd->add_option("--eps-b-prime", flags.eps_b_prime, "label point share slack above alpha");
  cmd->add_option("--eps-c", flags.eps_c, "label center share slack above alpha");
  cmd->add_option("--eps-c-prime", flags.eps_c_prime, "label center share slack below alpha");
  cmd->add_option("--method", config.method,
                  "randomized, fpt, color-only or center-count-only");
}

flc::app::RunConfig Finish(flc::app::RunConfig config, const Flags& flags) {
  using flc::app::ParseRationalFlag;
  if (!flags.data.empty()) {
    flc::DatasetSpec spec;
    spec.path = flags.data;
    spec.coordinate_columns = flc::app::SplitList(flags.coords);
    spec.color_column = flags.color_col;
    spec.delimiter = flags.delimiter;
    spec.has_header = !flags.no_header;
    if (flags.row_limit > 0) spec.row_limit = flags.row_limit;
    spec.normalization =
        flags.zscore ? flc::Normalization::kZScore : flc::Normalization::kNone;
    if (spec.coordinate_columns.empty() || spec.color_column.empty()) {
      throw flc::app::UsageError("--data needs --coords and --color-col");
    }
    config.data = spec;
  }
  if (!flags.generate.empty()) {
    config.generator = flc::app::ParseGeneratorSpec(flags.generate, config.seed);
  }
  try {
    config.objective = flc::ParseObjective(flags.objective);
  } catch (const std::exception&) {
    throw flc::app::UsageError("--objective must be kcenter, kmedian or kmeans");
  }
  config.delta = ParseRationalFlag(flags.delta, "--delta");
  config.alpha = flc::app::ParseRationalList(flags.alpha, "--alpha");
  config.eps_a = ParseRationalFlag(flags.eps_a, "--eps-a");
  config.eps_a_prime = ParseRationalFlag(flags.eps_a_prime, "--eps-a-prime");
  config.eps_b = ParseRationalFlag(flags.eps_b, "--eps-b");
  config.eps_b_prime = ParseRationalFlag(flags.eps_b_prime, "--eps-b-prime");
  config.eps_c = ParseRationalFlag(flags.eps_c, "--eps-c");
  config.eps_c_prime = ParseRationalFlag(flags.eps_c_prime, "--eps-c-prime");
  config.size_bounds = flc::app::ParseBounds(flags.size_bounds, "--size-bounds");
  config.center_bounds = flc::app::ParseBounds(flags.center_bounds, "--center-bounds");
  config.label_rule = flc::app::ParseLabelRule(flags.label_rule);
  for (const auto& s : flc::app::SplitList(flags.sizes)) {
    try {
      config.sizes.push_back(std::stoull(s));
    } catch (const std::exception&) {
      throw flc::app::UsageError("--sizes: bad size '" + s + "'");
    }
  }
  if (config.command == "oracle" && !flags.reps_given) config.reps = 20;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fair labeled clustering"};
  app.require_subcommand(1);
  flc::app::RunConfig config;
  Flags flags;

  CLI::App* lcal = app.add_subcommand("solve-lcal", "clustering with assigned labels");
  AddCommonOptions(lcal, config, flags);
  AddLcalOptions(lcal, flags);

  CLI::App* lcul = app.add_subcommand("solve-lcul", "clustering with unassigned labels");
  AddCommonOptions(lcul, config, flags);
  AddLculOptions(lcul, config, flags);
  CLI::Option* lcul_reps = lcul->add_option("--reps", config.reps, "replications");

  CLI::App* tradeoff = app.add_subcommand("tradeoff", "cost against positive count");
  AddCommonOptions(tradeoff, config, flags);
  tradeoff->add_option("--label-rule", flags.label_rule, "col>=tau, list:..., random");

  CLI::App* bench = app.add_subcommand("bench", "scalability timings");
  AddCommonOptions(bench, config, flags);
  AddLculOptions(bench, config, flags);
  bench->add_option("--sizes", flags.sizes, "comma-separated sample sizes");
  bench->add_option("--flow-max-n", config.flow_max_n,
                    "also time the flow solver up to this n");

  CLI::App* oracle = app.add_subcommand("oracle", "self-check against brute force");
  oracle->add_option("--seed", config.seed, "random seed");
  CLI::Option* oracle_reps = oracle->add_option("--reps", config.reps, "random instances");
  oracle->add_option("--out", config.out, "write output here instead of stdout");
  oracle->add_option("--format", config.format, "json or csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? flc::app::kExitOk : flc::app::kExitUsage;
  }
  config.command = app.get_subcommands().front()->get_name();
  flags.reps_given = lcul_reps->count() > 0 || oracle_reps->count() > 0;

  try {
    const flc::app::RunConfig full = Finish(config, flags);
    const flc::app::CommandResult result = flc::app::Dispatch(full);
    const std::string text = flc::app::Render(full, result);
    if (full.out.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(full.out);
      if (!out) {
        std::cerr << "error: cannot write '" << full.out << "'\n";
        return flc::app::kExitUsage;
      }
      out << text;
    }
    return result.exit_code;
  } catch (const flc::app::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return flc::app::kExitUsage;
  } catch (const flc::ParameterError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return flc::app::kExitUsage;
  } catch (const flc::IngestionError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return flc::app::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return flc::app::kExitInternal;
  }
}
