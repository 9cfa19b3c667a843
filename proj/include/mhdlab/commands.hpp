#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mhdlab {

/// Command names accepted by run().
const std::vector<std::string>& command_names();

struct RunOptions {
  std::string command;
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
};

/// Executes one command. Artifacts go under the output directory
/// (snapshots, ledgers.csv, report.json). Returns 0 iff every asserted check
/// passed; errors are reported on stderr with a nonzero status.
int run(const RunOptions& opts);

}  // namespace mhdlab
