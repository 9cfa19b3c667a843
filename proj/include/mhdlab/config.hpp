#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mhdlab/dss.hpp"
#include "mhdlab/state.hpp"

namespace mhdlab {

struct OperatorRatioSettings {
  int fields = 100;
  int n = 16;
  int modes = 3;
  std::vector<double> p_list{1.5, 2.0, 4.0};
  std::vector<double> delta_list{0.0, 1.0, 2.5};
  double kernel_epsilon = 0.1;  // fraction of L
};

struct DssSettings {
  double lambda = 2.0;
  double swirl = 1.0;
  double poloidal = 0.5;
  int half_points = 32;
  double half_width = 4.0;
  std::vector<double> gammas{0.5, 1.5};
  int shell_first = 3;
  int shell_last = 8;
};

/// Full run configuration: simulation settings plus command blocks.
struct Config {
  SimConfig sim;
  double epsilon_fraction = 0.1;
  std::vector<double> gammas{1.5};
  std::vector<double> eps_list;  // fractions of L
  double lambda = 2.0;
  std::string out = "out";
  std::uint64_t seed = 0;
  double linear_amplitude = 1e-8;
  int pressure_samples = 10;
  int cancellation_triples = 50;
  /// Refined level for verify-weighted; 0 means 3N/2 and dt/2.
  int refine_n = 0;
  double refine_dt = 0.0;
  OperatorRatioSettings ratios;
  DssSettings dss;
};

/// Parses and validates a JSON config. Every violation is collected and
/// reported in one ConfigError naming the offending key.
Config parse_config(const std::string& path);
Config parse_config_text(const std::string& text);

/// Builds a forcing spec from its JSON description (used by the parser).
ForcingSpec forcing_from_json_text(const std::string& text);

}  // namespace mhdlab
