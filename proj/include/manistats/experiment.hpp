#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "manistats/bucklesim.hpp"
#include "manistats/distribution.hpp"
#include "manistats/frechet.hpp"

namespace manistats {

// CLI-facing experiment runner. Configs are JSON documents with explicit
// keys; seeds are mandatory and never auto-generated. All outputs are
// written atomically after the computation finishes, so a failing run
// leaves no partial files.

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
};

struct RunResult {
  std::vector<std::string> outputs;  // paths written, manifest last
};

extern const char* const kExperimentNames[6];

// subcommand must match the config's "experiment" value when both are given.
RunResult run_experiment(const std::string& subcommand,
                         const std::string& config_path,
                         const RunOverrides& overrides, std::ostream& log);

// Rendering for the print-table command; concatenates the rows of the given
// power CSV files.
std::string print_table(const std::vector<std::string>& files);

int exit_code_for(const Error& e);

// Exposed for tests and reuse.
Geometry parse_geometry(const nlohmann::json& j);
SolverConfig parse_solver(const nlohmann::json& j, std::uint64_t seed);
ManifoldPoint parse_point(const Geometry& g, const nlohmann::json& coords);
Distribution parse_distribution(const Geometry& g, const nlohmann::json& j,
                                const SolverConfig& solver);
BuckleParams parse_buckle_params(const nlohmann::json& j);

}  // namespace manistats
