#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "beamucb/bandit.hpp"
#include "beamucb/env.hpp"
#include "beamucb/oracle.hpp"

namespace beamucb {

enum class Scenario { AbruptChange, SlowDrift, SyntheticRKHS };
enum class Algorithm { RestartUnknownBudget, RestartKnownBudget, NoRestartCKB };

std::string_view to_string(Scenario s);
std::string_view to_string(Algorithm a);
Scenario parse_scenario(std::string_view name);
Algorithm parse_algorithm(std::string_view name);

// Every field has a default, so an empty config reproduces the abrupt-change
// experiment: 4-antenna ULA, 100 beams, 10 paths, changes at 100 and 300.
struct ExperimentConfig {
    Scenario scenario = Scenario::AbruptChange;
    int horizon = 500;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<Algorithm> algorithms{Algorithm::RestartUnknownBudget, Algorithm::RestartKnownBudget,
                                      Algorithm::NoRestartCKB};
    std::filesystem::path out_dir = "results";
    bool save_traces = false;

    // environment
    int antennas = 4;
    int beams = 100;
    int paths = 10;
    int interfered_ues = 2;
    double carrier_freq_hz = 60e9;
    std::vector<int> change_times{100, 300};
    SlowDrift slow;
    SyntheticModel synthetic;
    double threshold_quantile = 0.6;
    std::vector<double> thresholds;
    double noise_relative = 0.05;
    std::optional<double> noise_std_reward;
    std::optional<double> noise_std_constraint;

    // kernels (defaults: SE with l = 1 for both reward and constraint)
    KernelKind reward_kernel = KernelKind::SquaredExponential;
    KernelKind constraint_kernel = KernelKind::SquaredExponential;
    double reward_length_scale = 1.0;
    double constraint_length_scale = 1.0;

    // learner
    double lambda = 0.2;
    double delta = 0.1;
    GammaMode gamma_mode = GammaMode::Realized;
    ProjectionScope projection = ProjectionScope::MeanOnly;
    OracleMode oracle = OracleMode::Randomized;

    // Overrides of values otherwise derived from the trace / schedule.
    std::optional<double> reward_bound;
    std::optional<double> constraint_bound;
    std::optional<double> slater_margin;
    std::optional<double> dual_cap;
    std::optional<double> dual_step;
    std::optional<double> noise_param;
    std::optional<double> budget;
    std::optional<int> restart_period;

    void validate() const;

    ChannelModel channel_model() const;
};

// TOML-style subset: `[section]` headers, `key = value` lines, `#` comments.
// Lists are comma separated; seeds also accept ranges such as `1-10`.
// Unknown sections or keys are errors.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

// Applies one `section.key = value` assignment.
void apply_setting(ExperimentConfig& config, std::string_view section, std::string_view key, std::string_view value);

std::vector<std::uint64_t> parse_seed_list(std::string_view text);

// Fully resolved settings as ordered key/value pairs (for the manifest).
std::vector<std::pair<std::string, std::string>> describe(const ExperimentConfig& config);

}  // namespace beamucb
