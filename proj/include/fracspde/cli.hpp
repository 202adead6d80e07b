#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fracspde/config.hpp"

namespace fracspde {

enum ExitCode : int {
  exit_ok = 0,
  exit_acceptance = 1,
  exit_config = 2,
  exit_blow_up = 3,
};

struct RunOptions {
  std::filesystem::path out_dir = ".";
  /// Overrides the config's `seed` entry (and so enters the config hash).
  std::optional<std::uint64_t> seed;
  /// <= 0 lets OpenMP decide. Never part of the hash: output does not depend on it.
  int threads = 0;
};

const std::vector<std::string>& command_names();

/// Runs one subcommand and writes <out_dir>/<command>.csv (plus a JSON report
/// for the fitting commands). Diagnostics go to `log`; returns an ExitCode.
int run_command(const std::string& command, Config config, const RunOptions& options, std::ostream& log);

/// `flag` if given, else FRACSPDE_THREADS, else 0.
int resolve_threads(std::optional<int> flag);

/// Entry point of the fracspde executable.
int run_cli(int argc, char** argv);

}  // namespace fracspde
