// Acceptance suite. Prints one PASS/FAIL line per criterion; exit status is
// nonzero when any hard criterion fails. Criterion 7 is reported only.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "beamucb/config.hpp"
#include "beamucb/experiment.hpp"
#include "beamucb/gp.hpp"
#include "beamucb/oracle.hpp"
#include "beamucb/trace_io.hpp"
#include "support.hpp"

using namespace beamucb;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::vector<EnvironmentTrace> g_traces;  // every trace the suite generates, for criterion 8

void keep_traces(const ExperimentResults& res) {
    for (const auto& s : res.seeds) g_traces.push_back(s.trace);
}

std::size_t algo_index(const ExperimentConfig& c, Algorithm a) {
    return static_cast<std::size_t>(std::find(c.algorithms.begin(), c.algorithms.end(), a) - c.algorithms.begin());
}

// 1
Outcome gp_oracle() {
    const auto start = Clock::now();
    std::mt19937_64 rng(1001);
    std::uniform_int_distribution<int> n_dist(1, 200), d_dist(1, 8);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> l_dist(0.3, 2.0), lam_dist(0.01, 1.0);
    double worst = 0.0;
    for (int state = 0; state < 100; ++state) {
        const int d = d_dist(rng);
        const bool linear = state % 2 == 1;
        const auto spec = linear ? KernelSpec::linear(d) : KernelSpec::squared_exponential(l_dist(rng), d);
        const double lambda = lam_dist(rng);
        const int n = state < 10 ? 200 : n_dist(rng);
        PosteriorState post(spec, lambda);
        PointList xs;
        std::vector<double> ys;
        for (int i = 0; i < n; ++i) {
            xs.push_back(linear ? testsupport::ball_point(rng, d) : testsupport::uniform_point(rng, d));
            ys.push_back(noise(rng));
            post.update(xs.back(), ys.back());
        }
        for (int p = 0; p < 50; ++p) {
            const Vector probe = linear ? testsupport::ball_point(rng, d) : testsupport::uniform_point(rng, d);
            const auto ref = testsupport::dense_posterior(spec, xs, ys, lambda, probe);
            worst = std::max({worst, std::abs(post.mean(probe) - ref.mean), std::abs(post.variance(probe) - ref.variance)});
        }
    }
    const double secs = seconds_since(start);
    return {worst <= 1e-8 && secs < 30.0,
            "max |diff| " + fmt("%.3g", worst) + " (tol 1e-8), " + fmt("%.2f", secs) + " s (limit 30)"};
}

// 2
Outcome lp_oracle() {
    const auto start = Clock::now();
    std::mt19937_64 rng(1002);
    std::uniform_int_distribution<int> n_dist(1, 20);
    std::normal_distribution<double> nd(0.0, 1.0);
    double worst = 0.0;
    bool below_single = false;
    const int grid = 10000;  // step 1e-4
    for (int row = 0; row < 1000; ++row) {
        const int n = n_dist(rng);
        std::vector<double> f(n), g(n);
        for (int i = 0; i < n; ++i) {
            f[i] = nd(rng);
            g[i] = nd(rng);
        }
        const int safe = static_cast<int>(rng() % static_cast<unsigned>(n));
        g[safe] = -std::abs(g[safe]);
        const auto policy = solve_optimal_policy(f, g);

        double brute = -1e300;
        for (int i = 0; i < n; ++i)
            if (g[i] <= 0.0) {
                brute = std::max(brute, f[i]);
                if (policy.value < f[i] - 1e-12) below_single = true;
            }
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                for (int s = 0; s <= grid; ++s) {
                    const double p = static_cast<double>(s) / grid;
                    if (p * g[i] + (1.0 - p) * g[j] <= 0.0) brute = std::max(brute, p * f[i] + (1.0 - p) * f[j]);
                }
        worst = std::max(worst, std::abs(policy.value - brute));
    }
    const double secs = seconds_since(start);
    return {worst <= 1e-3 && !below_single && secs < 60.0,
            "max |oracle - grid| " + fmt("%.3g", worst) + " (tol 1e-3), below a feasible arm: " +
                (below_single ? "yes" : "no") + ", " + fmt("%.2f", secs) + " s (limit 60)"};
}

// 3
Outcome invariants() {
    ExperimentConfig c;
    c.horizon = 500;
    c.beams = 100;
    c.seeds.resize(20);
    std::iota(c.seeds.begin(), c.seeds.end(), 101);
    const auto codebook = make_codebook(c);
    const double gamma = schedule_gamma(c, codebook);
    long long checks = 0;
    std::string failure;
    auto fail = [&](const std::string& what) {
        if (failure.empty()) failure = what;
    };

    for (auto seed : c.seeds) {
        SeedContext ctx{seed, make_trace(c, codebook, seed), {}};
        ctx.oracle = oracle_reward_series(ctx.trace, c.oracle);
        g_traces.push_back(ctx.trace);
        for (auto algo : c.algorithms) {
            const BanditConfig b = resolve_bandit_config(c, ctx.trace, algo, gamma);
            const RestartGpUcb cold(b, codebook.features);
            const Decision cold_decision = cold.acquisition();
            auto hook = [&](const RestartGpUcb& learner, const Decision& d, const Observation&) {
                const int t = d.t;
                if (!(learner.phi() >= 0.0 && learner.phi() <= b.dual_cap)) fail("phi out of [0, rho]");
                if (d.restarted != is_restart_step(t, b.restart_period)) fail("restart flag mismatch");
                if (d.restarted) {
                    if (learner.restart_anchor() != t) fail("restart anchor");
                    if (learner.reward_posterior().size() != 1 || learner.constraint_posterior().size() != 1)
                        fail("posterior not reset");
                    if (d.f_hat != cold_decision.f_hat || d.g_hat != cold_decision.g_hat) fail("restart acquisition");
                }
                if (learner.reward_posterior().size() != static_cast<std::size_t>(t - learner.restart_anchor() + 1))
                    fail("posterior size");
                for (Eigen::Index i = 0; i < d.f_hat.size(); ++i) {
                    if (!(d.f_hat[i] >= d.reward_mean_projected[i])) fail("f_hat below projected mean");
                    if (!(d.g_hat[i] <= d.constraint_mean_projected[i])) fail("g_hat above projected mean");
                }
                ++checks;
            };
            const RunResult first = simulate(b, codebook, ctx, algo, hook);
            const RunResult again = simulate(b, codebook, ctx, algo);
            for (std::size_t k = 0; k < first.steps.size(); ++k) {
                const auto& x = first.steps[k];
                const auto& y = again.steps[k];
                if (x.arm != y.arm || x.r_obs != y.r_obs || x.c_obs != y.c_obs || x.phi != y.phi || x.beta != y.beta)
                    fail("rerun differs");
            }
        }
    }
    return {failure.empty(), std::to_string(checks) + " steps checked over 20 seeds x 3 algorithms" +
                                 (failure.empty() ? "" : "; first failure: " + failure)};
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

ExperimentConfig seeded(Scenario s, int horizon, int n_seeds) {
    ExperimentConfig c;
    c.scenario = s;
    c.horizon = horizon;
    c.seeds.resize(static_cast<std::size_t>(n_seeds));
    std::iota(c.seeds.begin(), c.seeds.end(), 1);
    return c;
}

// 4
Outcome regret_slope(int workers) {
    const auto start = Clock::now();
    std::vector<double> lx, ly;
    std::string series;
    for (int horizon : {250, 500, 1000, 2000}) {
        auto c = seeded(Scenario::SlowDrift, horizon, 10);
        c.algorithms = {Algorithm::RestartUnknownBudget};
        const auto res = execute(c, workers);
        keep_traces(res);
        double mean = 0.0;
        for (const auto& r : res.runs) mean += r.metrics.regret_cum.back();
        mean /= static_cast<double>(res.runs.size());
        lx.push_back(std::log(horizon));
        ly.push_back(std::log(mean));
        series += " R(" + std::to_string(horizon) + ")=" + fmt("%.2f", mean);
    }
    const double s = slope(lx, ly);
    const double secs = seconds_since(start);
    return {s <= 0.92 && secs < 600.0,
            "slope " + fmt("%.3f", s) + " (limit 0.92);" + series + "; " + fmt("%.1f", secs) + " s"};
}

// Abrupt and slow runs shared by criteria 5-7.
struct ScenarioRuns {
    ExperimentResults abrupt;
    ExperimentResults slow;
};

double peak_from(const std::vector<double>& v, std::size_t first) {
    double p = 0.0;
    for (std::size_t k = first; k < v.size(); ++k) p = std::max(p, v[k]);
    return p;
}

// 5
Outcome violation_decay(const ScenarioRuns& runs) {
    bool ok = true;
    std::string detail;
    for (const auto* res : {&runs.abrupt, &runs.slow}) {
        const auto& c = res->config;
        const auto& s = res->summaries.at(Algorithm::RestartUnknownBudget);
        const auto& v = s.violation_avg_mean;
        // Abrupt: peak after the first change. Slow: the channel changes every
        // slot, so the whole run counts.
        const std::size_t first =
            c.scenario == Scenario::AbruptChange ? static_cast<std::size_t>(c.change_times.front() - 1) : 0;
        const double peak = peak_from(v, first);
        const double final_v = v.back();
        const bool pass = peak > 0.0 ? final_v < 0.5 * peak : final_v == 0.0;
        ok = ok && pass;
        detail += std::string(to_string(c.scenario)) + ": final " + fmt("%.4f", final_v) + " vs peak " +
                  fmt("%.4f", peak) + " (ratio " + fmt("%.2f", peak > 0 ? final_v / peak : 0.0) + ", limit 0.50); ";
    }
    return {ok, detail};
}

// 6
Outcome restart_benefit(const ScenarioRuns& runs) {
    const auto& res = runs.abrupt;
    const auto& restart = res.summaries.at(Algorithm::RestartUnknownBudget).regret_avg_mean;
    const auto& plain = res.summaries.at(Algorithm::NoRestartCKB).regret_avg_mean;
    const double r_t = restart.back(), n_t = plain.back();
    const double n99 = plain[98], n150 = plain[149];
    const bool pass = r_t < n_t && n150 > n99;
    return {pass, "regret_avg(T): restart " + fmt("%.4f", r_t) + " vs no-restart " + fmt("%.4f", n_t) +
                      "; no-restart t=99 " + fmt("%.4f", n99) + " -> t=150 " + fmt("%.4f", n150)};
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// 7 (soft)
Outcome known_budget(const ScenarioRuns& runs) {
    const auto& res = runs.slow;
    const auto& c = res.config;
    const std::size_t ku = algo_index(c, Algorithm::RestartUnknownBudget);
    const std::size_t kk = algo_index(c, Algorithm::RestartKnownBudget);
    std::vector<double> unknown, known;
    for (std::size_t s = 0; s < res.seeds.size(); ++s) {
        unknown.push_back(res.run(s, ku).metrics.regret_cum.back());
        known.push_back(res.run(s, kk).metrics.regret_cum.back());
    }
    const double mk = median(known), mu = median(unknown);
    return {mk <= mu, "median final regret: known " + fmt("%.2f", mk) + " vs unknown " + fmt("%.2f", mu) + " over " +
                          std::to_string(res.seeds.size()) + " seeds"};
}

// 8
Outcome environment_validity() {
    std::size_t bad = 0, roundtrip_bad = 0;
    std::string first;
    for (const auto& tr : g_traces) {
        const auto check = check_trace(tr);
        if (!check.ok()) {
            ++bad;
            if (first.empty()) first = check.detail;
        }
        std::stringstream ss;
        write_trace(ss, tr);
        const auto back = read_trace(ss);
        std::stringstream again;
        write_trace(again, back);
        if (back.f != tr.f || back.g != tr.g || back.derived_B != tr.derived_B || back.derived_G != tr.derived_G ||
            back.derived_tau != tr.derived_tau || back.derived_B_f != tr.derived_B_f ||
            back.derived_B_g != tr.derived_B_g || back.noise_std_reward != tr.noise_std_reward ||
            back.noise_std_constraint != tr.noise_std_constraint || again.str() != ss.str())
            ++roundtrip_bad;
    }
    return {bad == 0 && roundtrip_bad == 0 && !g_traces.empty(),
            std::to_string(g_traces.size()) + " traces; failing checks " + std::to_string(bad) +
                ", round-trip mismatches " + std::to_string(roundtrip_bad) + (first.empty() ? "" : "; " + first)};
}

void report(int id, const char* name, const Outcome& o, bool soft, bool& all_hard) {
    std::printf("%s criterion %d (%s)%s: %s\n", o.pass ? "PASS" : "FAIL", id, name, soft ? " [soft]" : "",
                o.detail.c_str());
    std::fflush(stdout);
    if (!soft && !o.pass) all_hard = false;
}

}  // namespace

int main() {
    const int workers = worker_count_from_env();
    bool all_hard = true;

    report(1, "GP posterior vs dense solve", gp_oracle(), false, all_hard);
    report(2, "LP oracle vs two-arm grid", lp_oracle(), false, all_hard);
    report(3, "algorithm invariants", invariants(), false, all_hard);
    report(4, "regret sublinearity, slow drift", regret_slope(workers), false, all_hard);

    ScenarioRuns runs{execute(seeded(Scenario::AbruptChange, 500, 10), workers),
                      execute(seeded(Scenario::SlowDrift, 500, 20), workers)};
    keep_traces(runs.abrupt);
    keep_traces(runs.slow);
    report(5, "vanishing time-average violation", violation_decay(runs), false, all_hard);
    report(6, "restart benefit, abrupt change", restart_benefit(runs), false, all_hard);
    report(7, "known-budget advantage", known_budget(runs), true, all_hard);
    report(8, "environment validity", environment_validity(), false, all_hard);

    std::printf("%s\n", all_hard ? "ACCEPTANCE: all hard criteria passed" : "ACCEPTANCE: some hard criteria failed");
    return all_hard ? 0 : 1;
}
