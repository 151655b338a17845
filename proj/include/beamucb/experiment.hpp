#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "beamucb/bandit.hpp"
#include "beamucb/config.hpp"
#include "beamucb/env.hpp"
#include "beamucb/metrics.hpp"

namespace beamucb {

struct StepLog {
    int t = 0;
    std::size_t arm = 0;
    double f_true = 0.0;
    double g_true = 0.0;
    double r_obs = 0.0;
    double c_obs = 0.0;
    double phi = 0.0;  // dual value used for this step's acquisition
    double beta = 0.0;
    double beta_constraint = 0.0;
    bool restarted = false;
};

struct RunResult {
    std::uint64_t seed = 0;
    Algorithm algorithm = Algorithm::RestartUnknownBudget;
    BanditConfig bandit;
    std::vector<StepLog> steps;
    RunMetrics metrics;
};

struct SeedContext {
    std::uint64_t seed = 0;
    EnvironmentTrace trace;
    std::vector<double> oracle;
};

BeamCodebook make_codebook(const ExperimentConfig& config);
KernelSpec reward_kernel(const ExperimentConfig& config);
KernelSpec constraint_kernel(const ExperimentConfig& config);

// Trace for one master seed; the generator derives its own stream from it.
EnvironmentTrace make_trace(const ExperimentConfig& config, const BeamCodebook& codebook, std::uint64_t seed);

// gamma_hat_T used by the restart schedule, fixed before any data is seen:
// greedy information gain over the codebook (Realized) or the rate formula
// (TheoreticalSE), max over the reward and constraint kernels.
double schedule_gamma(const ExperimentConfig& config, const BeamCodebook& codebook);

BanditConfig resolve_bandit_config(const ExperimentConfig& config, const EnvironmentTrace& trace, Algorithm algorithm,
                                   double gamma_hat);

// Called after every step with the learner state after its updates.
using StepHook = std::function<void(const RestartGpUcb&, const Decision&, const Observation&)>;

// Observation noise comes from derive_seed(seed, Stream::kNoise), so every
// algorithm sees the same noise draws for a given seed.
RunResult simulate(const BanditConfig& bandit, const BeamCodebook& codebook, const SeedContext& context,
                   Algorithm algorithm, const StepHook& hook = {});

struct ExperimentResults {
    ExperimentConfig config;
    double gamma_hat = 0.0;
    std::vector<SeedContext> seeds;
    std::vector<RunResult> runs;  // ordered by (seed position, algorithm position)
    std::map<Algorithm, SeedSummary> summaries;

    const RunResult& run(std::size_t seed_index, std::size_t algorithm_index) const;
};

// Seeds x algorithms fan out over `workers` threads; output order does not
// depend on completion order.
ExperimentResults execute(const ExperimentConfig& config, int workers);

// Worker count from BEAMUCB_WORKERS, else hardware concurrency.
int worker_count_from_env();

// runs/seed-<s>_<algo>.csv, aggregate_<algo>.csv, manifest.txt (and traces/
// when save_traces is set).
void write_outputs(const ExperimentResults& results, const std::filesystem::path& out_dir);

// Panel files regret_avg.csv and violation_avg.csv from aggregate_*.csv.
void emit_plot_data(const std::filesystem::path& in_dir, const std::filesystem::path& out_dir);

// execute + write_outputs with exit-status mapping: 0 ok, 2 bad input,
// 3 infeasible trace, 4 numerical failure.
int run_experiment(const ExperimentConfig& config);

}  // namespace beamucb
