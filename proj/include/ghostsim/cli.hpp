#pragma once

#include <string>

#include "ghostsim/config.hpp"

namespace ghostsim::cli {

inline constexpr const char* kVersion = "1.0.0";

// Subcommand bodies; the config already has any command-line overrides
// applied. Each returns a process exit code: 0 success, 1 runtime failure,
// 2 configuration or usage error (the mapping lives in dispatch).
int run_simulate(const RunConfig& cfg);
int run_oracle(const RunConfig& cfg);
int run_coherent(const RunConfig& cfg, const std::string& mode);
int run_retrieve(const RunConfig& cfg, const std::string& pattern_path);
int run_speckle_stats(const RunConfig& cfg);
int run_compare(const std::string& pattern_path, const std::string& reference_path);

// Full argv-level entry point used by main() and by tests.
int dispatch(int argc, const char* const* argv);

}  // namespace ghostsim::cli
