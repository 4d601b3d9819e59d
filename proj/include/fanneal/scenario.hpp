#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fanneal/energy.hpp"
#include "fanneal/grid.hpp"
#include "fanneal/steady.hpp"

namespace fanneal {

struct EnergySpec {
    std::string name;
    std::vector<double> params;
};

/// One run configuration, loaded from a JSON file (see scenarios/ for examples).
/// Unknown keys are rejected. Field defaults:
///   epsilon_ladder  2^-4, ..., 2^-10
///   grid            {t_end: 1, n_steps: 1024}
///   replicates      10000
///   master_seed     1
///   x_init          zeros
///   checkpoints     {0.25, 0.5, 0.75, 1} * t_end
///   expm_mode       "general"
struct Scenario {
    std::string name;
    std::optional<EnergySpec> energy;
    double temperature = 0.0;
    std::vector<double> hurst;
    std::vector<double> epsilon_ladder;
    double t_end = 1.0;
    std::size_t n_steps = 1024;
    std::size_t replicates = 10000;
    std::uint64_t master_seed = 1;
    std::vector<double> x_init;
    std::vector<double> checkpoints;
    ExpmMode expm_mode = ExpmMode::general;

    [[nodiscard]] std::size_t dim() const noexcept { return hurst.size(); }
    [[nodiscard]] TimeGrid grid() const { return TimeGrid(t_end, n_steps); }
    [[nodiscard]] std::vector<HurstParam> hurst_params() const;
    /// Throws ConfigError when no energy is configured.
    [[nodiscard]] EnergyFunction energy_function() const;
};

/// Parses and validates; every violation is a ConfigError naming the field.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::filesystem::path& path);

/// Canonical single-line JSON echo of a scenario (all defaults filled in).
std::string scenario_to_json(const Scenario& s);

}  // namespace fanneal
