#include "beamucb/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "beamucb/errors.hpp"
#include "beamucb/format.hpp"
#include "beamucb/oracle.hpp"
#include "beamucb/trace_io.hpp"

namespace beamucb {

namespace fs = std::filesystem;

namespace {

KernelSpec make_kernel(KernelKind kind, double length_scale, int dim) {
    return kind == KernelKind::Linear ? KernelSpec::linear(dim) : KernelSpec::squared_exponential(length_scale, dim);
}

// Runs job(i) for i in [0, n) on up to `workers` threads; rethrows the first failure.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& job) {
    const std::size_t threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next.store(n);
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

void write_run_csv(const fs::path& path, const RunResult& run) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out << "t,arm,f_true,g_true,r_obs,c_obs,phi,beta,regret_cum,violation_cum\n";
    for (std::size_t k = 0; k < run.steps.size(); ++k) {
        const StepLog& s = run.steps[k];
        out << s.t << ',' << s.arm << ',' << format_double(s.f_true) << ',' << format_double(s.g_true) << ','
            << format_double(s.r_obs) << ',' << format_double(s.c_obs) << ',' << format_double(s.phi) << ','
            << format_double(s.beta) << ',' << format_double(run.metrics.regret_cum[k]) << ','
            << format_double(run.metrics.violation_cum[k]) << '\n';
    }
}

void write_aggregate_csv(const fs::path& path, const SeedSummary& s) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out << "t,regret_avg_mean,regret_avg_stderr,violation_avg_mean,violation_avg_stderr\n";
    for (std::size_t k = 0; k < s.regret_avg_mean.size(); ++k)
        out << k + 1 << ',' << format_double(s.regret_avg_mean[k]) << ',' << format_double(s.regret_avg_stderr[k])
            << ',' << format_double(s.violation_avg_mean[k]) << ',' << format_double(s.violation_avg_stderr[k])
            << '\n';
}

std::string run_name(std::uint64_t seed, Algorithm a) {
    return "seed-" + std::to_string(seed) + "_" + std::string(to_string(a));
}

}  // namespace

BeamCodebook make_codebook(const ExperimentConfig& config) { return build_codebook(config.antennas, config.beams); }

KernelSpec reward_kernel(const ExperimentConfig& config) {
    return make_kernel(config.reward_kernel, config.reward_length_scale, 2 * config.antennas);
}

KernelSpec constraint_kernel(const ExperimentConfig& config) {
    return make_kernel(config.constraint_kernel, config.constraint_length_scale, 2 * config.antennas);
}

EnvironmentTrace make_trace(const ExperimentConfig& config, const BeamCodebook& codebook, std::uint64_t seed) {
    if (config.scenario == Scenario::SyntheticRKHS) {
        SyntheticModel model = config.synthetic;
        model.threshold_quantile = config.threshold_quantile;
        model.noise_relative = config.noise_relative;
        return generate_synthetic_trace(model, codebook, config.horizon, seed);
    }
    return generate_trace(config.channel_model(), codebook, config.horizon, seed);
}

double schedule_gamma(const ExperimentConfig& config, const BeamCodebook& codebook) {
    const KernelSpec kernels[] = {reward_kernel(config), constraint_kernel(config)};
    double gamma = 0.0;
    for (const auto& k : kernels) {
        const double g = config.gamma_mode == GammaMode::Realized
                             ? greedy_info_gain(k, *codebook.features, config.horizon, config.lambda)
                             : theoretical_info_gain(k, config.horizon);
        gamma = std::max(gamma, g);
    }
    // At least the information of a single observation, so W stays defined at T = 1.
    return std::max(gamma, 0.5 * std::log1p(1.0 / config.lambda));
}

BanditConfig resolve_bandit_config(const ExperimentConfig& config, const EnvironmentTrace& trace, Algorithm algorithm,
                                   double gamma_hat) {
    BanditConfig b;
    b.horizon = config.horizon;
    b.reward_bound = config.reward_bound.value_or(trace.derived_B);
    b.constraint_bound = config.constraint_bound.value_or(trace.derived_G);
    b.slater_margin = config.slater_margin.value_or(trace.derived_tau);
    b.dual_cap = config.dual_cap.value_or(default_dual_cap(b.reward_bound, b.slater_margin));
    b.dual_step = config.dual_step.value_or(default_dual_step(b.dual_cap, b.constraint_bound, b.horizon));
    b.delta = config.delta;
    const double observed_noise = std::max(trace.noise_std_reward, trace.noise_std_constraint);
    b.noise_param = config.noise_param.value_or(observed_noise > 0.0 ? observed_noise : 1e-6);
    b.lambda = config.lambda;
    b.gamma_mode = config.gamma_mode;
    b.projection = config.projection;
    b.reward_kernel = reward_kernel(config);
    b.constraint_kernel = constraint_kernel(config);

    switch (algorithm) {
        case Algorithm::RestartUnknownBudget:
            b.schedule = RestartSchedule::unknown_budget();
            break;
        case Algorithm::RestartKnownBudget:
            b.schedule = RestartSchedule::known_budget(config.budget.value_or(trace.budget()));
            break;
        case Algorithm::NoRestartCKB:
            b.schedule = RestartSchedule::no_restart();
            break;
    }
    if (config.restart_period && algorithm != Algorithm::NoRestartCKB) {
        b.restart_period = *config.restart_period;
    } else if (b.schedule.kind == RestartSchedule::Kind::KnownBudget && !(b.schedule.budget > 0.0)) {
        b.restart_period = b.horizon;  // stationary trace: nothing to forget
    } else {
        b.restart_period = restart_period(b.horizon, gamma_hat, b.schedule);
    }
    b.validate();
    return b;
}

RunResult simulate(const BanditConfig& bandit, const BeamCodebook& codebook, const SeedContext& context,
                   Algorithm algorithm, const StepHook& hook) {
    const EnvironmentTrace& trace = context.trace;
    if (trace.arm_count() != codebook.size()) throw InvalidInput("simulate: trace and codebook disagree on |X|");
    if (trace.horizon < bandit.horizon) throw InvalidInput("simulate: trace shorter than horizon");
    if (context.oracle.size() < static_cast<std::size_t>(bandit.horizon))
        throw InvalidInput("simulate: oracle series shorter than horizon");

    RestartGpUcb learner(bandit, codebook.features);
    Rng noise(derive_seed(context.seed, Stream::kNoise));
    RunResult result;
    result.seed = context.seed;
    result.algorithm = algorithm;
    result.bandit = bandit;
    result.steps.reserve(static_cast<std::size_t>(bandit.horizon));
    std::vector<std::size_t> arms;
    arms.reserve(static_cast<std::size_t>(bandit.horizon));

    for (int t = 1; t <= bandit.horizon; ++t) {
        auto [decision, obs] = learner.step([&](std::size_t arm) { return observe(trace, t, arm, noise); });
        const auto a = static_cast<Eigen::Index>(decision.arm_index);
        result.steps.push_back({t, decision.arm_index, trace.f(t - 1, a), trace.g(t - 1, a), obs.reward, obs.cost,
                                decision.phi_used, decision.beta, decision.beta_constraint, decision.restarted});
        arms.push_back(decision.arm_index);
        if (hook) hook(learner, decision, obs);
    }
    result.metrics = compute_metrics(trace, std::span<const double>(context.oracle.data(), arms.size()), arms);
    return result;
}

const RunResult& ExperimentResults::run(std::size_t seed_index, std::size_t algorithm_index) const {
    return runs.at(seed_index * config.algorithms.size() + algorithm_index);
}

ExperimentResults execute(const ExperimentConfig& config, int workers) {
    config.validate();
    ExperimentResults res;
    res.config = config;
    const BeamCodebook codebook = make_codebook(config);
    res.gamma_hat = schedule_gamma(config, codebook);

    res.seeds.resize(config.seeds.size());
    parallel_for(config.seeds.size(), workers, [&](std::size_t i) {
        SeedContext ctx;
        ctx.seed = config.seeds[i];
        ctx.trace = make_trace(config, codebook, ctx.seed);
        ctx.oracle = oracle_reward_series(ctx.trace, config.oracle);
        res.seeds[i] = std::move(ctx);
    });

    const std::size_t n_alg = config.algorithms.size();
    res.runs.resize(res.seeds.size() * n_alg);
    parallel_for(res.runs.size(), workers, [&](std::size_t job) {
        const std::size_t si = job / n_alg;
        const Algorithm algo = config.algorithms[job % n_alg];
        const BanditConfig bandit = resolve_bandit_config(config, res.seeds[si].trace, algo, res.gamma_hat);
        res.runs[job] = simulate(bandit, codebook, res.seeds[si], algo);
    });

    for (std::size_t ai = 0; ai < n_alg; ++ai) {
        std::vector<RunMetrics> metrics;
        for (std::size_t si = 0; si < res.seeds.size(); ++si) metrics.push_back(res.run(si, ai).metrics);
        res.summaries[config.algorithms[ai]] = aggregate_seeds(metrics);
    }
    return res;
}

int worker_count_from_env() {
    if (const char* env = std::getenv("BEAMUCB_WORKERS")) {
        try {
            const long long n = parse_int(env);
            if (n >= 1) return static_cast<int>(n);
        } catch (const InvalidInput&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void write_outputs(const ExperimentResults& res, const fs::path& out_dir) {
    fs::create_directories(out_dir / "runs");
    for (const auto& run : res.runs) write_run_csv(out_dir / "runs" / (run_name(run.seed, run.algorithm) + ".csv"), run);
    for (const auto& [algo, summary] : res.summaries)
        write_aggregate_csv(out_dir / ("aggregate_" + std::string(to_string(algo)) + ".csv"), summary);
    if (res.config.save_traces) {
        fs::create_directories(out_dir / "traces");
        for (const auto& s : res.seeds) save_trace(out_dir / "traces" / ("seed-" + std::to_string(s.seed) + ".trace"), s.trace);
    }

    std::ofstream m(out_dir / "manifest.txt");
    if (!m) throw InvalidInput("cannot write manifest in " + out_dir.string());
    m << "# beamucb run manifest\n";
    for (const auto& [k, v] : describe(res.config)) m << k << " = " << v << '\n';
    m << "resolved.gamma_hat_T = " << format_double(res.gamma_hat) << '\n';
    m << "resolved.gamma_hat_source = "
      << (res.config.gamma_mode == GammaMode::Realized ? "greedy_information_gain_over_codebook"
                                                       : "rate_formula_log_T_pow_d_plus_1")
      << '\n';
    m << "resolved.beta_gamma = "
      << (res.config.gamma_mode == GammaMode::Realized ? "realized_info_gain_since_restart" : "rate_formula") << '\n';
    m << "resolved.budget_proxy = sum_t max_x |f_{t+1}-f_t| (sup norm over codebook)\n";
    m << "resolved.seed_streams = trace: derive_seed(seed,1,attempt); noise: derive_seed(seed,2,0)\n";
    m << "note.defaults = horizon, seed count, noise level, delta and lambda are artifact choices\n";
    for (const auto& s : res.seeds) {
        const std::string p = "seed." + std::to_string(s.seed) + ".";
        const auto& tr = s.trace;
        m << p << "trace_attempts = " << tr.attempts << '\n';
        m << p << "derived_B = " << format_double(tr.derived_B) << '\n';
        m << p << "derived_G = " << format_double(tr.derived_G) << '\n';
        m << p << "derived_tau = " << format_double(tr.derived_tau) << '\n';
        m << p << "derived_B_f = " << format_double(tr.derived_B_f) << '\n';
        m << p << "derived_B_g = " << format_double(tr.derived_B_g) << '\n';
        m << p << "noise_std_reward = " << format_double(tr.noise_std_reward) << '\n';
        m << p << "noise_std_constraint = " << format_double(tr.noise_std_constraint) << '\n';
        for (const auto& [k, v] : tr.metadata) m << p << "trace." << k << " = " << v << '\n';
    }
    for (const auto& run : res.runs) {
        const std::string p = "run." + run_name(run.seed, run.algorithm) + ".";
        const BanditConfig& b = run.bandit;
        m << p << "schedule = " << to_string(b.schedule.kind) << '\n';
        m << p << "budget = " << format_double(b.schedule.budget) << '\n';
        m << p << "W = " << b.restart_period << '\n';
        m << p << "B = " << format_double(b.reward_bound) << '\n';
        m << p << "G = " << format_double(b.constraint_bound) << '\n';
        m << p << "tau = " << format_double(b.slater_margin) << '\n';
        m << p << "rho = " << format_double(b.dual_cap) << '\n';
        m << p << "eta = " << format_double(b.dual_step) << '\n';
        m << p << "R = " << format_double(b.noise_param) << '\n';
        m << p << "final_regret = " << format_double(run.metrics.regret_cum.back()) << '\n';
        m << p << "final_violation = " << format_double(run.metrics.violation_cum.back()) << '\n';
    }
}

void emit_plot_data(const fs::path& in_dir, const fs::path& out_dir) {
    if (!fs::is_directory(in_dir)) throw InvalidInput("plot-data: no such directory: " + in_dir.string());
    struct Series {
        std::string name;
        std::vector<std::vector<std::string>> rows;
    };
    std::vector<Series> series;
    for (Algorithm a : {Algorithm::RestartUnknownBudget, Algorithm::RestartKnownBudget, Algorithm::NoRestartCKB}) {
        const fs::path p = in_dir / ("aggregate_" + std::string(to_string(a)) + ".csv");
        if (!fs::exists(p)) continue;
        std::ifstream in(p);
        std::string line;
        std::getline(in, line);
        Series s{std::string(to_string(a)), {}};
        while (std::getline(in, line)) {
            if (trim(line).empty()) continue;
            auto cells = split(trim(line), ',');
            if (cells.size() != 5) throw InvalidInput("plot-data: malformed row in " + p.string());
            s.rows.push_back(std::move(cells));
        }
        series.push_back(std::move(s));
    }
    if (series.empty()) throw InvalidInput("plot-data: no aggregate_*.csv files in " + in_dir.string());
    const std::size_t horizon = series.front().rows.size();
    for (const auto& s : series)
        if (s.rows.size() != horizon) throw InvalidInput("plot-data: aggregates differ in length");

    fs::create_directories(out_dir);
    auto panel = [&](const char* file, std::size_t mean_col) {
        std::ofstream out(out_dir / file);
        if (!out) throw InvalidInput(std::string("plot-data: cannot write ") + file);
        out << 't';
        for (const auto& s : series) out << ',' << s.name << "_mean," << s.name << "_stderr";
        out << '\n';
        for (std::size_t k = 0; k < horizon; ++k) {
            out << series.front().rows[k][0];
            for (const auto& s : series) out << ',' << s.rows[k][mean_col] << ',' << s.rows[k][mean_col + 1];
            out << '\n';
        }
    };
    panel("regret_avg.csv", 1);
    panel("violation_avg.csv", 3);
}

int run_experiment(const ExperimentConfig& config) {
    try {
        const ExperimentResults res = execute(config, worker_count_from_env());
        write_outputs(res, config.out_dir);
        return 0;
    } catch (const InfeasibleError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace beamucb
