#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "slipflow/config.hpp"

namespace slipflow {

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitNoConvergence = 2 };

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;  // overrides output_dir
  std::optional<std::uint64_t> seed;             // overrides seed
  int threads = 1;
};

/// Executes config.task and writes its artifacts, summary.csv and
/// config.echo into the output directory. Never throws for solver, config
/// or IO failures; those are reported through the exit code and the
/// status column of summary.csv.
int run(RunConfig config, const RunOptions& options = {});

/// Parses the file first. A config that does not parse still gets a
/// summary.csv when options.out_dir is set.
int run_file(const std::filesystem::path& config_path, const RunOptions& options = {});

/// SLIPFLOW_THREADS when set to a positive integer, otherwise 1.
int threads_from_environment();

}  // namespace slipflow
