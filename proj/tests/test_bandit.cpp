#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>

#include "beamucb/bandit.hpp"
#include "beamucb/errors.hpp"
#include "support.hpp"

using namespace beamucb;
using testsupport::dense_posterior;

namespace {

BanditConfig small_config(int horizon, int period, int dim) {
    BanditConfig c;
    c.horizon = horizon;
    c.reward_bound = 1.0;
    c.constraint_bound = 1.0;
    c.slater_margin = 0.5;
    c.dual_cap = 8.0;
    c.dual_step = 0.5;
    c.delta = 0.1;
    c.noise_param = 0.1;
    c.lambda = 0.2;
    c.restart_period = period;
    c.reward_kernel = KernelSpec::squared_exponential(1.0, dim);
    c.constraint_kernel = KernelSpec::squared_exponential(1.0, dim);
    return c;
}

std::shared_ptr<PointList> random_arms(std::mt19937_64& rng, int n, int dim) {
    auto arms = std::make_shared<PointList>();
    for (int i = 0; i < n; ++i) arms->push_back(testsupport::uniform_point(rng, dim, -1.0, 1.0));
    return arms;
}

// Straight-line re-implementation of one round using dense posteriors.
struct Reference {
    BanditConfig cfg;
    PointList arms;
    PointList xs;
    std::vector<double> rs, cs;
    double phi = 0.0;
    int t = 0;

    std::size_t choose(double& g_hat_chosen) const {
        const double ig_r = xs.empty() ? 0.0 : empirical_info_gain(cfg.reward_kernel, xs, cfg.lambda);
        const double ig_c = xs.empty() ? 0.0 : empirical_info_gain(cfg.constraint_kernel, xs, cfg.lambda);
        const double b = cfg.reward_bound + cfg.noise_param / std::sqrt(cfg.lambda) *
                                                std::sqrt(2 * std::log(1 / cfg.delta) + 2 * ig_r);
        const double bc = cfg.constraint_bound + cfg.noise_param / std::sqrt(cfg.lambda) *
                                                     std::sqrt(2 * std::log(1 / cfg.delta) + 2 * ig_c);
        std::size_t best = 0;
        double best_z = -1e300;
        for (std::size_t i = 0; i < arms.size(); ++i) {
            const auto pr = dense_posterior(cfg.reward_kernel, xs, rs, cfg.lambda, arms[i]);
            const auto pc = dense_posterior(cfg.constraint_kernel, xs, cs, cfg.lambda, arms[i]);
            const double fh = std::clamp(pr.mean, -cfg.reward_bound, cfg.reward_bound) +
                              b * std::sqrt(std::max(pr.variance, 0.0));
            const double gh = std::clamp(pc.mean, -cfg.constraint_bound, cfg.constraint_bound) -
                              bc * std::sqrt(std::max(pc.variance, 0.0));
            const double z = fh - phi * gh;
            if (z > best_z) {
                best_z = z;
                best = i;
                g_hat_chosen = gh;
            }
        }
        return best;
    }

    std::size_t step(const std::vector<double>& f, const std::vector<double>& g) {
        ++t;
        if (cfg.restart_period == 1 || t % cfg.restart_period == 1) {
            xs.clear();
            rs.clear();
            cs.clear();
        }
        double gh = 0.0;
        const std::size_t a = choose(gh);
        xs.push_back(arms[a]);
        rs.push_back(f[a]);
        cs.push_back(g[a]);
        phi = std::clamp(phi + cfg.dual_step * gh, 0.0, cfg.dual_cap);
        return a;
    }
};

}  // namespace

TEST_CASE("restart period examples") {
    CHECK(restart_period(500, 1.0, RestartSchedule::unknown_budget()) == 22);
    CHECK(restart_period(500, 1.0, RestartSchedule::known_budget(4.0)) == 11);
    CHECK(restart_period(500, 7.0, RestartSchedule::no_restart()) == 500);
    CHECK(restart_period(17, 1.0, RestartSchedule::no_restart()) == 17);
    CHECK(restart_period(4, 1e6, RestartSchedule::unknown_budget()) == 4);
    CHECK(restart_period(100, 1.0, RestartSchedule::known_budget(1e6)) == 1);
    CHECK_THROWS_AS(restart_period(0, 1.0, RestartSchedule::unknown_budget()), InvalidInput);
    CHECK_THROWS_AS(restart_period(10, 0.0, RestartSchedule::unknown_budget()), InvalidInput);
    CHECK_THROWS_AS(restart_period(10, 1.0, RestartSchedule::known_budget(0.0)), InvalidInput);
}

TEST_CASE("beta examples") {
    CHECK(beta(1.0, 0.1, 1.0, std::exp(-2.0), 0.0) == doctest::Approx(1.2).epsilon(1e-12));
    const double near_one = beta(1.0, 0.1, 1.0, 0.999, 0.0);
    CHECK(near_one == doctest::Approx(1.0 + 0.1 * std::sqrt(2.0 * std::log(1.0 / 0.999))).epsilon(1e-12));
    CHECK(beta(1.0, 0.1, 0.2, 0.1, 5.0) > beta(1.0, 0.1, 0.2, 0.1, 0.0));
    CHECK_THROWS_AS(beta(0.0, 0.1, 1.0, 0.1, 0.0), InvalidInput);
    CHECK_THROWS_AS(beta(1.0, 0.1, 1.0, 1.0, 0.0), InvalidInput);
    CHECK_THROWS_AS(beta(1.0, 0.1, 1.0, 0.1, -1.0), InvalidInput);
}

TEST_CASE("dual update examples") {
    std::mt19937_64 rng(31);
    auto cfg = small_config(10, 10, 2);
    cfg.dual_step = 0.1;
    RestartGpUcb bandit(cfg, random_arms(rng, 3, 2));
    CHECK(bandit.dual_update(-1.0) == 0.0);
    bandit.set_phi(0.5);
    CHECK(bandit.dual_update(2.0) == doctest::Approx(0.7).epsilon(1e-15));
    bandit.set_phi(cfg.dual_cap);
    CHECK(bandit.dual_update(cfg.constraint_bound) == cfg.dual_cap);
}

TEST_CASE("config validation") {
    auto cfg = small_config(10, 5, 2);
    cfg.dual_cap = 7.9;  // below 4B/tau = 8
    CHECK_THROWS_AS(cfg.validate(), InvalidInput);
    cfg = small_config(10, 11, 2);
    CHECK_THROWS_AS(cfg.validate(), InvalidInput);
    cfg = small_config(10, 5, 2);
    cfg.delta = 1.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidInput);
    CHECK(default_dual_cap(1.0, 0.25) == 16.0);
    CHECK(default_dual_step(16.0, 2.0, 64) == 1.0);
}

TEST_CASE("cold start picks arm 0 and phi = 0 ignores the constraint") {
    std::mt19937_64 rng(32);
    auto arms = random_arms(rng, 6, 2);
    RestartGpUcb bandit(small_config(20, 20, 2), arms);
    auto d = bandit.acquisition();
    CHECK(d.arm_index == 0);
    for (Eigen::Index i = 0; i < 6; ++i) {
        CHECK(d.f_hat[i] == doctest::Approx(d.beta));
        CHECK(d.g_hat[i] == doctest::Approx(-d.beta_constraint));
    }
    std::normal_distribution<double> n(0.0, 1.0);
    for (int s = 0; s < 5; ++s) bandit.step([&](std::size_t) { return Observation{n(rng), n(rng)}; });
    bandit.set_phi(0.0);
    d = bandit.acquisition();
    CHECK(d.arm_index == argmax_lowest(d.f_hat));
}

TEST_CASE("argmax tie-break and shift invariance") {
    Vector v(4);
    v << 1.0, 3.0, 3.0, 2.0;
    CHECK(argmax_lowest(v) == 1);
    CHECK(argmax_lowest((v.array() + 10.0).matrix()) == 1);
    CHECK(argmax_lowest(Vector::Zero(5)) == 0);
    CHECK_THROWS_AS(argmax_lowest(Vector()), InvalidInput);
}

TEST_CASE("restart indexing") {
    CHECK(is_restart_step(1, 5));
    CHECK(!is_restart_step(5, 5));
    CHECK(is_restart_step(6, 5));
    CHECK(is_restart_step(7, 1));
    CHECK(is_restart_step(1, 1));

    std::mt19937_64 rng(33);
    RestartGpUcb bandit(small_config(12, 1, 2), random_arms(rng, 4, 2));
    for (int s = 0; s < 12; ++s) {
        auto res = bandit.step([](std::size_t a) { return Observation{0.1 * a, -0.2}; });
        CHECK(res.decision.restarted);
        CHECK(bandit.reward_posterior().size() == 1);
        CHECK(bandit.restart_anchor() == s + 1);
    }
}

TEST_CASE("three-step hand trace on two arms, zero noise") {
    // Arms far apart, so the posteriors barely interact.
    auto arms = std::make_shared<PointList>(PointList{Vector::Constant(1, 0.0), Vector::Constant(1, 3.0)});
    auto cfg = small_config(3, 3, 1);
    const std::vector<double> f{0.2, 0.9}, g{-0.5, 0.4};
    RestartGpUcb bandit(cfg, arms);
    Reference ref{cfg, *arms, {}, {}, {}, 0.0, 0};
    std::vector<std::size_t> seq;
    for (int s = 0; s < 3; ++s) {
        auto res = bandit.step([&](std::size_t a) { return Observation{f[a], g[a]}; });
        seq.push_back(res.decision.arm_index);
        CHECK(res.decision.arm_index == ref.step(f, g));
        CHECK(bandit.phi() == doctest::Approx(ref.phi).epsilon(1e-10));
    }
    // Cold start takes arm 0; arm 1 still carries the full prior bonus next.
    CHECK(seq[0] == 0);
    CHECK(seq[1] == 1);
}

TEST_CASE("acquisition matches a dense recomputation after one observation") {
    std::mt19937_64 rng(34);
    auto arms = random_arms(rng, 3, 2);
    auto cfg = small_config(5, 5, 2);
    RestartGpUcb bandit(cfg, arms);
    bandit.step([](std::size_t) { return Observation{0.7, 0.3}; });
    bandit.set_phi(1.5);
    const auto d = bandit.acquisition();
    const double b = beta(1.0, 0.1, 0.2, 0.1, 0.5 * std::log(1.0 + 1.0 / 0.2));
    for (std::size_t i = 0; i < 3; ++i) {
        const auto pr = dense_posterior(cfg.reward_kernel, {(*arms)[0]}, {0.7}, 0.2, (*arms)[i]);
        const auto pc = dense_posterior(cfg.constraint_kernel, {(*arms)[0]}, {0.3}, 0.2, (*arms)[i]);
        const double fh = pr.mean + b * std::sqrt(pr.variance);
        const double gh = pc.mean - b * std::sqrt(pc.variance);
        const auto k = static_cast<Eigen::Index>(i);
        CHECK(std::abs(d.f_hat[k] - fh) <= 1e-10);
        CHECK(std::abs(d.g_hat[k] - gh) <= 1e-10);
        CHECK(std::abs(d.acquisition_values[k] - (fh - 1.5 * gh)) <= 1e-10);
    }
}

TEST_CASE("failed observation leaves state untouched") {
    std::mt19937_64 rng(35);
    RestartGpUcb bandit(small_config(10, 3, 2), random_arms(rng, 5, 2));
    bandit.step([](std::size_t) { return Observation{0.5, 0.2}; });
    bandit.step([](std::size_t) { return Observation{0.1, -0.2}; });
    bandit.step([](std::size_t) { return Observation{0.3, 0.2}; });
    const double phi = bandit.phi();
    const auto means = bandit.reward_posterior().candidate_means();
    // Step 4 is a restart step; the throwing callback must not trigger the reset.
    CHECK(bandit.restart_due());
    CHECK_THROWS_AS(bandit.step([](std::size_t) -> Observation { throw std::runtime_error("link down"); }),
                    std::runtime_error);
    CHECK_THROWS_AS(bandit.step([](std::size_t) { return Observation{std::nan(""), 0.0}; }), InvalidInput);
    CHECK(bandit.steps_taken() == 3);
    CHECK(bandit.phi() == phi);
    CHECK(bandit.reward_posterior().size() == 3);
    CHECK(bandit.reward_posterior().candidate_means() == means);
}

TEST_CASE("property: matches the reference loop, bounds, optimism") {
    std::mt19937_64 rng(36);
    std::uniform_int_distribution<int> arm_dist(2, 8), period_dist(1, 9);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        const int k = arm_dist(rng);
        auto arms = random_arms(rng, k, 2);
        auto cfg = small_config(20, std::min(20, period_dist(rng)), 2);
        cfg.dual_step = 2.0;
        cfg.projection = trial % 2 ? ProjectionScope::FullEstimate : ProjectionScope::MeanOnly;
        std::vector<double> f(k), g(k);
        for (int i = 0; i < k; ++i) {
            f[i] = 0.5 * n(rng);
            g[i] = 0.5 * n(rng);
        }
        RestartGpUcb bandit(cfg, arms);
        Reference ref{cfg, *arms, {}, {}, {}, 0.0, 0};
        for (int s = 1; s <= cfg.horizon; ++s) {
            const auto pre = bandit.acquisition();
            for (Eigen::Index i = 0; i < k; ++i) {
                CHECK(pre.f_hat[i] >= pre.reward_mean_projected[i]);
                CHECK(pre.g_hat[i] <= pre.constraint_mean_projected[i]);
            }
            auto res = bandit.step([&](std::size_t a) { return Observation{f[a], g[a]}; });
            CHECK(res.decision.restarted == is_restart_step(s, cfg.restart_period));
            if (res.decision.restarted) CHECK(bandit.restart_anchor() == s);
            CHECK(bandit.reward_posterior().size() == static_cast<std::size_t>(s - bandit.restart_anchor() + 1));
            CHECK(bandit.phi() >= 0.0);
            CHECK(bandit.phi() <= cfg.dual_cap);
            if (cfg.projection == ProjectionScope::MeanOnly) {
                REQUIRE(res.decision.arm_index == ref.step(f, g));
                CHECK(std::abs(bandit.phi() - ref.phi) <= 1e-8);
            }
        }
    }
}
