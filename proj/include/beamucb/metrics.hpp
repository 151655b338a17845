#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "beamucb/env.hpp"

namespace beamucb {

// Per-step series for one run; index k holds time step t = k + 1.
struct RunMetrics {
    std::vector<std::size_t> arms;
    std::vector<double> oracle;
    std::vector<double> rewards_true;   // f_t(x_t)
    std::vector<double> costs_true;     // g_t(x_t)
    std::vector<double> regret_cum;     // sum_s (oracle_s - f_s(x_s))
    std::vector<double> violation_cum;  // [sum_s g_s(x_s)]_+ at every prefix
    std::vector<double> regret_avg;
    std::vector<double> violation_avg;

    std::size_t horizon() const noexcept { return arms.size(); }
};

// Uses the noise-free f and g only.
RunMetrics compute_metrics(const EnvironmentTrace& trace, std::span<const double> oracle_series,
                           std::span<const std::size_t> arms);

struct SeedSummary {
    std::size_t runs = 0;
    std::vector<double> regret_avg_mean;
    std::vector<double> regret_avg_stderr;
    std::vector<double> violation_avg_mean;
    std::vector<double> violation_avg_stderr;
};

// Mean and standard error (sample std / sqrt(n); zero for one run) across runs.
SeedSummary aggregate_seeds(std::span<const RunMetrics> runs);

}  // namespace beamucb
