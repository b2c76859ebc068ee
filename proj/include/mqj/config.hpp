#pragma once

#include "mqj/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mqj {

enum class ExperimentKind { analytic, validate, simulate, telegraph, fidelity };
std::string_view experiment_name(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment(std::string_view name);

/*!
 * Fully resolved run configuration.
 *
 * Text form is sectioned key = value:
 *
 *     [model]     g kappa gamma0 gamma1 omega_l omega_m delta n_max
 *     [run]       kind n_traj horizon_tdark seed eta t_wait out workers
 *     [telegraph] gap_factor bin_tdark channels
 *
 * Every key is optional except run.kind (which may also come from the
 * command line). Lists are comma separated. Unknown keys are rejected.
 */
struct RunConfig {
    ModelParams model;
    std::optional<ExperimentKind> kind;
    int n_traj = 100;
    double horizon_tdark = 50.0;   // trajectory horizon in units of T_dark
    std::uint64_t seed = 1;
    std::vector<double> eta{1.0};
    std::vector<double> t_wait{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};  // T_dark units
    std::string out = "out";
    unsigned workers = 0;          // 0: MQJ_WORKERS or hardware concurrency
    double gap_factor = 10.0;      // dark-gap threshold = gap_factor * T_cav / eta
    double bin_tdark = 0.38;       // telegraph bin width in T_dark
    unsigned channels = 1;         // detector channel mask, bit c = channel c

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Throws ConfigError naming the offending key.
RunConfig parse_config_text(std::string_view text);
RunConfig load_config_file(const std::string& path);
std::string serialize_config(const RunConfig& config);

/// Range and presence checks; throws ConfigError naming the key.
void validate_config(const RunConfig& config);

/// Parses `mqj <kind> [--flags]`: config file (if --config), then flags on
/// top, then validation. Throws ConfigError; `help` is set when usage text
/// was requested instead.
struct CommandLine {
    RunConfig config;
    std::optional<std::string> help;
};
CommandLine parse_command_line(int argc, const char* const* argv);

std::string channel_mask_text(unsigned mask);
unsigned parse_channel_mask(std::string_view text);

}  // namespace mqj
