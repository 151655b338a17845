#include "beamucb/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "beamucb/errors.hpp"

namespace beamucb {

std::string_view to_string(GammaMode mode) {
    return mode == GammaMode::Realized ? "realized" : "theoretical_se";
}

std::string_view to_string(ProjectionScope scope) {
    return scope == ProjectionScope::MeanOnly ? "mean_only" : "full_estimate";
}

std::string_view to_string(RestartSchedule::Kind kind) {
    switch (kind) {
        case RestartSchedule::Kind::UnknownBudget: return "unknown_budget";
        case RestartSchedule::Kind::KnownBudget: return "known_budget";
        case RestartSchedule::Kind::NoRestart: return "no_restart";
    }
    return "?";
}

int restart_period(int horizon, double gamma_hat, const RestartSchedule& schedule) {
    if (horizon < 1) throw InvalidInput("restart_period: horizon must be >= 1");
    if (schedule.kind == RestartSchedule::Kind::NoRestart) return horizon;
    if (!(gamma_hat > 0.0) || !std::isfinite(gamma_hat))
        throw InvalidInput("restart_period: gamma_hat must be positive");
    double w = std::pow(gamma_hat, 0.25) * std::sqrt(static_cast<double>(horizon));
    if (schedule.kind == RestartSchedule::Kind::KnownBudget) {
        if (!(schedule.budget > 0.0) || !std::isfinite(schedule.budget))
            throw InvalidInput("restart_period: variation budget must be positive");
        w /= std::sqrt(schedule.budget);
    }
    const double clamped = std::clamp(std::round(w), 1.0, static_cast<double>(horizon));
    return static_cast<int>(clamped);
}

double beta(double bound, double noise_param, double lambda, double delta, double info_gain) {
    if (!(bound > 0.0)) throw InvalidInput("beta: bound must be positive");
    if (!(noise_param > 0.0)) throw InvalidInput("beta: noise parameter must be positive");
    if (!(lambda > 0.0)) throw InvalidInput("beta: lambda must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("beta: delta must lie in (0, 1)");
    if (!(info_gain >= 0.0) || !std::isfinite(info_gain)) throw InvalidInput("beta: info gain must be >= 0");
    return bound + noise_param / std::sqrt(lambda) * std::sqrt(2.0 * std::log(1.0 / delta) + 2.0 * info_gain);
}

double project(double value, double lo, double hi) { return std::clamp(value, lo, hi); }

std::size_t argmax_lowest(const Vector& values) {
    if (values.size() == 0) throw InvalidInput("argmax over empty vector");
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
    return static_cast<std::size_t>(best);
}

void BanditConfig::validate() const {
    if (horizon < 1) throw InvalidInput("bandit: horizon must be >= 1");
    if (!(reward_bound > 0.0)) throw InvalidInput("bandit: reward bound B must be positive");
    if (!(constraint_bound > 0.0)) throw InvalidInput("bandit: constraint bound G must be positive");
    if (!(slater_margin > 0.0)) throw InvalidInput("bandit: Slater margin tau must be positive");
    // Small relative slack so rho computed as exactly 4B/tau always passes.
    if (!(dual_cap >= 4.0 * reward_bound / slater_margin * (1.0 - 1e-12)))
        throw InvalidInput("bandit: dual cap rho must be >= 4B/tau");
    if (!(dual_step > 0.0)) throw InvalidInput("bandit: dual step eta must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("bandit: delta must lie in (0, 1)");
    if (!(noise_param > 0.0)) throw InvalidInput("bandit: noise parameter R must be positive");
    if (!(lambda > 0.0)) throw InvalidInput("bandit: lambda must be positive");
    if (restart_period < 1 || restart_period > horizon)
        throw InvalidInput("bandit: restart period W must lie in [1, T]");
}

double default_dual_cap(double reward_bound, double slater_margin) {
    if (!(slater_margin > 0.0)) throw InvalidInput("dual cap: Slater margin must be positive");
    return 4.0 * reward_bound / slater_margin;
}

double default_dual_step(double dual_cap, double constraint_bound, int horizon) {
    if (!(constraint_bound > 0.0) || horizon < 1) throw InvalidInput("dual step: invalid G or T");
    return dual_cap / (constraint_bound * std::sqrt(static_cast<double>(horizon)));
}

bool is_restart_step(int t, int period) {
    if (period <= 1) return true;
    return t % period == 1;
}

RestartGpUcb::RestartGpUcb(BanditConfig config, std::shared_ptr<const PointList> arms)
    : config_(std::move(config)),
      arms_(std::move(arms)),
      reward_post_(config_.reward_kernel, config_.lambda, arms_),
      constraint_post_(config_.constraint_kernel, config_.lambda, arms_) {
    config_.validate();
    if (!arms_ || arms_->empty()) throw InvalidInput("bandit: empty arm set");
}

void RestartGpUcb::set_phi(double phi) { phi_ = project(phi, 0.0, config_.dual_cap); }

bool RestartGpUcb::restart_due() const { return is_restart_step(t_ + 1, config_.restart_period); }

double RestartGpUcb::gamma_for(const PosteriorState& post) const {
    if (config_.gamma_mode == GammaMode::Realized) return post.info_gain();
    return theoretical_info_gain(post.spec(), static_cast<double>(post.size()));
}

Decision RestartGpUcb::acquire(const PosteriorState& reward, const PosteriorState& constraint) const {
    const double b = config_.reward_bound;
    const double g = config_.constraint_bound;
    Decision d;
    d.t = t_ + 1;
    d.phi_used = phi_;
    d.beta = beta(b, config_.noise_param, config_.lambda, config_.delta, gamma_for(reward));
    d.beta_constraint = beta(g, config_.noise_param, config_.lambda, config_.delta, gamma_for(constraint));

    const Vector mu = reward.candidate_means();
    const Vector sd = reward.candidate_variances().cwiseSqrt();
    const Vector mu_c = constraint.candidate_means();
    const Vector sd_c = constraint.candidate_variances().cwiseSqrt();
    const auto m = mu.size();

    d.reward_mean_projected = mu.unaryExpr([b](double v) { return project(v, -b, b); });
    d.constraint_mean_projected = mu_c.unaryExpr([g](double v) { return project(v, -g, g); });
    if (config_.projection == ProjectionScope::MeanOnly) {
        d.f_hat = d.reward_mean_projected + d.beta * sd;
        d.g_hat = d.constraint_mean_projected - d.beta_constraint * sd_c;
    } else {
        d.f_hat.resize(m);
        d.g_hat.resize(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            d.f_hat[i] = project(mu[i] + d.beta * sd[i], -b, b);
            d.g_hat[i] = project(mu_c[i] - d.beta_constraint * sd_c[i], -g, g);
        }
    }
    d.acquisition_values = d.f_hat - phi_ * d.g_hat;
    d.arm_index = argmax_lowest(d.acquisition_values);
    return d;
}

Decision RestartGpUcb::acquisition() const { return acquire(reward_post_, constraint_post_); }

double RestartGpUcb::dual_update(double g_hat_at_chosen) const {
    return project(phi_ + config_.dual_step * g_hat_at_chosen, 0.0, config_.dual_cap);
}

RestartGpUcb::StepResult RestartGpUcb::step(const ObserveFn& observe) {
    if (t_ >= config_.horizon) throw InvalidInput("bandit: horizon exhausted");
    const int t = t_ + 1;
    const bool restart = restart_due();

    Decision d;
    if (restart) {
        const PosteriorState fresh_reward(config_.reward_kernel, config_.lambda, arms_);
        const PosteriorState fresh_constraint(config_.constraint_kernel, config_.lambda, arms_);
        d = acquire(fresh_reward, fresh_constraint);
    } else {
        d = acquire(reward_post_, constraint_post_);
    }
    d.restarted = restart;

    const Observation obs = observe(d.arm_index);
    if (!std::isfinite(obs.reward) || !std::isfinite(obs.cost))
        throw InvalidInput("bandit: non-finite observation at t=" + std::to_string(t));

    if (restart) {
        reward_post_.reset();
        constraint_post_.reset();
        t0_ = t;
    }
    reward_post_.update_candidate(d.arm_index, obs.reward);
    constraint_post_.update_candidate(d.arm_index, obs.cost);
    phi_ = dual_update(d.g_hat[static_cast<Eigen::Index>(d.arm_index)]);
    t_ = t;
    return {std::move(d), obs};
}

}  // namespace beamucb
