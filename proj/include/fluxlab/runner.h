#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "fluxlab/bulkedge.h"
#include "fluxlab/symmetry.h"

namespace fluxlab {

// Raised for malformed configs (exit 2), unresolved estimators (exit 3), and
// violated invariants (exit 4).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IndeterminateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvariantViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string kind;  // spectral-flow | index | verify | bulk-edge | classify |
                     // zero-modes | gauge-check
  std::string model = "p_ip";
  nlohmann::json params = nlohmann::json::object();
  int x_min = -8, x_max = 7, y_min = -8, y_max = 7;
  std::string boundary = "open";
  std::vector<Cell> flux_cells{{-1, -1}};
  std::string gauge = "ab";
  int alpha_points = 41;
  double mu = 0.0;
  double window_delta = -1.0;  // <= 0: derived from the model gap
  double disorder_w = 0.0;
  int seeds = 1;
  std::uint64_t seed_base = 1000;
  std::string out_dir = ".";
};

// Parse and validate; unknown keys are rejected.
ExperimentConfig parse_config(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
nlohmann::json config_schema();

// Execute one experiment; returns the result document and writes result.json
// plus any curves.csv / current_map.csv into out_dir (empty out_dir: no files).
nlohmann::json run_experiment(const ExperimentConfig& config);

// Sweep a numeric model parameter ("size" and "disorder_w" are also accepted);
// one result row per value, failures recorded per row. Points run on a bounded
// worker pool; a single collector writes sweep.csv when out_dir is set.
nlohmann::json sweep_experiment(const ExperimentConfig& config,
                                const std::string& axis,
                                const std::vector<double>& values,
                                int workers = 1);

// Round to 12 significant digits, recursively over a JSON document; applied
// before serialization so repeated runs are byte-identical.
double round_sig(double v, int digits = 12);
nlohmann::json round_json(const nlohmann::json& j, int digits = 12);

int cli_main(int argc, char** argv);

}  // namespace fluxlab
