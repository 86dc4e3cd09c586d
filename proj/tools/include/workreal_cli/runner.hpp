#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "workreal_cli/config.hpp"

namespace workreal::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitCheckFailed = 1,
    kExitInvalidConfig = 2,
    kExitTruncation = 3,
};

struct RunResult {
    int exit_code = kExitOk;
    std::vector<std::filesystem::path> files;
    std::string message;
};

/// Runs one experiment, writing `<out>/<experiment>.csv` (plus contour files
/// for squeeze-grid) and appending a record to `<out>/<experiment>.summary.jsonl`.
/// Config and truncation failures are reported through the exit code.
RunResult run(const SweepConfig& config, std::ostream& log);

/// Thread count: explicit value, else WORKREAL_THREADS, else 0 (all cores).
std::size_t resolve_threads(std::optional<std::size_t> flag, const char* env_value);

}  // namespace workreal::cli
