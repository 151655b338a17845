#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string_view>

#include "beamucb/gp.hpp"
#include "beamucb/kernels.hpp"

namespace beamucb {

// How the information gain entering beta is obtained.
//   Realized:      running 0.5 log det(I + K/lambda) of the data since restart.
//   TheoreticalSE: rate formula (log n)^(d+1) (d log n for a linear kernel).
enum class GammaMode { Realized, TheoreticalSE };

// Whether the [-B, B] / [-G, G] projection applies to the posterior mean
// only or to the whole optimistic estimate.
enum class ProjectionScope { MeanOnly, FullEstimate };

struct RestartSchedule {
    enum class Kind { UnknownBudget, KnownBudget, NoRestart };
    Kind kind = Kind::UnknownBudget;
    double budget = 0.0;  // combined variation budget, KnownBudget only

    static RestartSchedule unknown_budget() { return {Kind::UnknownBudget, 0.0}; }
    static RestartSchedule known_budget(double b) { return {Kind::KnownBudget, b}; }
    static RestartSchedule no_restart() { return {Kind::NoRestart, 0.0}; }
};

std::string_view to_string(GammaMode mode);
std::string_view to_string(ProjectionScope scope);
std::string_view to_string(RestartSchedule::Kind kind);

// W = round(gamma^(1/4) T^(1/2)), divided by sqrt(budget) for KnownBudget,
// clamped to [1, T]; NoRestart gives T.
int restart_period(int horizon, double gamma_hat, const RestartSchedule& schedule);

// bound + R / sqrt(lambda) * sqrt(2 log(1/delta) + 2 gamma)
double beta(double bound, double noise_param, double lambda, double delta, double info_gain);

double project(double value, double lo, double hi);

// Lowest index among the maxima.
std::size_t argmax_lowest(const Vector& values);

struct BanditConfig {
    int horizon = 1;
    double reward_bound = 1.0;      // B
    double constraint_bound = 1.0;  // G
    double slater_margin = 1.0;     // tau
    double dual_cap = 4.0;          // rho >= 4B/tau
    double dual_step = 1.0;         // eta
    double delta = 0.1;
    double noise_param = 0.1;  // R
    double lambda = 0.2;
    int restart_period = 1;  // W
    GammaMode gamma_mode = GammaMode::Realized;
    RestartSchedule schedule = RestartSchedule::unknown_budget();
    ProjectionScope projection = ProjectionScope::MeanOnly;
    KernelSpec reward_kernel = KernelSpec::squared_exponential(1.0, 1);
    KernelSpec constraint_kernel = KernelSpec::squared_exponential(1.0, 1);

    void validate() const;
};

// rho = 4B / tau and eta = rho / (G sqrt(T)).
double default_dual_cap(double reward_bound, double slater_margin);
double default_dual_step(double dual_cap, double constraint_bound, int horizon);

struct Decision {
    int t = 0;  // 1-based step this decision was made for
    std::size_t arm_index = 0;
    bool restarted = false;
    Vector acquisition_values;
    Vector f_hat;
    Vector g_hat;
    Vector reward_mean_projected;      // Proj_[-B,B] mu
    Vector constraint_mean_projected;  // Proj_[-G,G] mu~
    double beta = 0.0;
    double beta_constraint = 0.0;
    double phi_used = 0.0;
};

struct Observation {
    double reward = 0.0;
    double cost = 0.0;
};

using ObserveFn = std::function<Observation(std::size_t arm)>;

// Restart GP-UCB with constraints over a finite arm set. With
// restart_period = horizon it is the no-restart CKB-UCB baseline.
class RestartGpUcb {
public:
    RestartGpUcb(BanditConfig config, std::shared_ptr<const PointList> arms);

    struct StepResult {
        Decision decision;
        Observation observation;
    };

    // One full round: restart check, acquisition, observation, posterior and
    // dual updates. If `observe` throws, the learner is left untouched.
    StepResult step(const ObserveFn& observe);

    // Acquisition for the current posteriors and dual, without the restart
    // check or any mutation.
    Decision acquisition() const;

    // clip(phi + eta * g_hat, 0, rho)
    double dual_update(double g_hat_at_chosen) const;

    // True if the next step (t + 1) starts a new block.
    bool restart_due() const;

    const BanditConfig& config() const noexcept { return config_; }
    const PosteriorState& reward_posterior() const noexcept { return reward_post_; }
    const PosteriorState& constraint_posterior() const noexcept { return constraint_post_; }
    double phi() const noexcept { return phi_; }
    int steps_taken() const noexcept { return t_; }
    int restart_anchor() const noexcept { return t0_; }
    std::size_t arm_count() const noexcept { return arms_->size(); }

    // Overrides the dual variable (clamped to [0, rho]); for experiments and tests.
    void set_phi(double phi);

private:
    double gamma_for(const PosteriorState& post) const;
    Decision acquire(const PosteriorState& reward, const PosteriorState& constraint) const;

    BanditConfig config_;
    std::shared_ptr<const PointList> arms_;
    PosteriorState reward_post_;
    PosteriorState constraint_post_;
    double phi_ = 0.0;
    int t_ = 0;   // completed steps
    int t0_ = 0;  // step of the last restart
};

bool is_restart_step(int t, int period);

}  // namespace beamucb
