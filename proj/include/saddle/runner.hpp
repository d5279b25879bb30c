#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "saddle/config.hpp"
#include "saddle/error.hpp"

namespace saddle {

struct RunOptions {
  std::filesystem::path out;  ///< overrides config.output when non-empty
  int workers = 1;
};

struct RunResult {
  std::filesystem::path out;
  std::vector<std::string> files;  ///< written, relative to out
  std::vector<std::string> summary;  ///< human readable lines for stdout
};

/// Executes one experiment and writes its artifacts. Outputs depend only on
/// the config (not on the worker count). Errors propagate as saddle::Error
/// after whatever could be written has been written.
RunResult run_experiment(const ExperimentConfig& c, const RunOptions& options);

/// {"kind", "module", "message"} as written to error.json.
std::string error_record(const Error& e);

}  // namespace saddle
