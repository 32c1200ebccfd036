#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ergo/problem.hpp"

namespace ergo {

inline constexpr const char* kCommands[] = {"validate", "lambda-star", "solve",   "classify",
                                             "simulate", "leqg",        "duality", "perturb"};

struct RunConfig {
  std::string problem_name;  // catalog name, or the "name" field of an inline spec
  ProblemSpec problem;
  std::string command;
  std::optional<double> R;
  std::optional<std::size_t> n;
  double tol = 1e-6;
  /// A number, "star", "star+d", "star-d" or "plus" (second Riccati branch).
  std::optional<std::string> lambda;
  double dt = 1e-3;
  double T = 50.0;
  std::size_t paths = 2000;
  std::uint64_t seed = 42;
  double x0 = 0.0;
  bool plot = false;
  std::string out = "out";
};

/// Flags override values from --config. Throws ConfigError naming the field.
RunConfig parse_config(const std::vector<std::string>& args);

nlohmann::json config_to_json(const RunConfig& cfg);
/// Accepts the layout written by config_to_json; "problem" may be a catalog
/// name or a full spec object.
RunConfig config_from_json(const nlohmann::json& j);

/// Runs the command and writes artifacts under cfg.out. Returns the exit
/// status: 0 success, 1 numerical failure, 2 configuration error.
int execute(const RunConfig& cfg, std::ostream& log);

/// parse_config + execute with the exit-code mapping; never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ergo
