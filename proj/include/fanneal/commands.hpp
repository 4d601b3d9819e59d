#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fanneal/scenario.hpp"

namespace fanneal {

struct RunOptions {
    std::filesystem::path out_dir = ".";
    /// Overrides Scenario::master_seed; the manifest records the effective seed.
    std::optional<std::uint64_t> seed;
    /// Worker threads for replicate loops (0 = hardware concurrency). Outputs
    /// do not depend on this value.
    unsigned threads = 1;
    /// Forces T = 0 (deterministic gradient descent) in `anneal`.
    bool zero_noise = false;
};

struct RunResult {
    /// Data files in the order written, followed by manifest.txt.
    std::vector<std::filesystem::path> files;
};

/// Data files land under a temporary name and are renamed only after the
/// whole command succeeded, so a failure never leaves partial outputs.
RunResult run_simulate_fbm(const Scenario& s, const RunOptions& opts);  // fbm_paths.csv
RunResult run_anneal(const Scenario& s, const RunOptions& opts);        // anneal_paths.csv, anneal_summary.csv
RunResult run_linearize(const Scenario& s, const RunOptions& opts);     // linear_model.csv, linear_paths.csv
RunResult run_converge(const Scenario& s, const RunOptions& opts);      // rate_report.csv, gronwall_report.csv
RunResult run_covcheck(const Scenario& s, const RunOptions& opts);      // covariance.csv

/// Dispatch by subcommand name ("simulate-fbm", "anneal", ...).
RunResult run_command(const std::string& command, const Scenario& s, const RunOptions& opts);
std::vector<std::string> command_names();

/// %.17g, the CSV number format.
std::string format_number(double x);

}  // namespace fanneal
