#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nullsteer/config.hpp"

namespace nullsteer {

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_certain_detection = 3, exit_numerical = 4 };

struct RunOptions {
  bool dump_states = false;
  std::optional<double> tie_tol;
  std::optional<double> grouping_tol;
  unsigned threads = 0;  // 0: NULLSTEER_THREADS or hardware concurrency
};

struct RunResult {
  int exit_code = exit_ok;
  std::string message;
  std::vector<std::filesystem::path> files;
  std::optional<std::int64_t> detection_step;
};

/// Worker count from NULLSTEER_THREADS, else hardware concurrency.
unsigned worker_count(unsigned requested = 0);

/// Runs body(i) for i in [0, n) on a bounded pool. The first exception is
/// rethrown after all workers stop.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body);

/// Throws on failure; run_config_file maps failures to exit codes.
RunResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                         const RunOptions& options = {});

RunResult run_config_file(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
                          const RunOptions& options = {});

/// Maps any exception escaping a run to its exit code and message.
RunResult result_from_exception(std::exception_ptr error);

std::vector<std::string> figure_ids();
RunResult reproduce(const std::string& figure_id, const std::filesystem::path& out_dir,
                    const RunOptions& options = {});

std::string version();

}  // namespace nullsteer
