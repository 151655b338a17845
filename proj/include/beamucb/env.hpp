#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "beamucb/bandit.hpp"
#include "beamucb/kernels.hpp"
#include "beamucb/rng.hpp"

namespace beamucb {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Half-wavelength ULA response, a[m] = exp(i pi m sin(theta)) / sqrt(M).
CVector steering_vector(int antennas, double theta);

// [Re(x); Im(x)] in R^(2M); preserves Euclidean distances.
Vector feature_map(const CVector& x);

struct BeamCodebook {
    int antennas = 0;
    std::vector<double> angles;
    std::vector<CVector> vectors;
    std::shared_ptr<const PointList> features;

    std::size_t size() const noexcept { return vectors.size(); }
};

// n_beams steering vectors at angles uniformly spaced over [-pi/2, pi/2].
BeamCodebook build_codebook(int antennas, int n_beams);

// |h^H x| with pilot s = 1.
double rss(const CVector& channel, const CVector& x);

// max_j (|h_j^H x| - xi_j)
double constraint_value(const std::vector<CVector>& channels, const CVector& x, const std::vector<double>& thresholds);

struct AbruptDrift {
    std::vector<int> change_times{100, 300};
};

// Angles take N(0, innovation_std^2) steps. Path gains are the initial draw
// plus a Gauss-Markov deviation
//   d_{t+1} = c d_t + sqrt(1 - c^2) * (gain_drift_scale * innovation_std) * CN(0, 1/L),
// so innovation_std = 0 freezes the channel entirely.
struct SlowDrift {
    double ar_coefficient = 0.99;
    double innovation_std = 0.01;
    double gain_drift_scale = 10.0;
};

struct ChannelModel {
    int paths = 10;
    double carrier_freq_hz = 60e9;  // metadata only; spacing is in half wavelengths
    int ue_count = 3;               // target UE plus the interfered set
    std::variant<AbruptDrift, SlowDrift> drift = AbruptDrift{};
    std::vector<double> thresholds;  // per interfered UE; empty means quantile at t = 1
    double threshold_quantile = 0.6;
    double noise_relative = 0.05;  // noise std as a fraction of derived B
    std::optional<double> noise_std_reward;
    std::optional<double> noise_std_constraint;

    void validate() const;
};

// Reward and constraint built as nonnegative kernel expansions whose
// coefficients sweep back and forth between two random endpoints so the
// total RKHS-norm variation equals variation_budget.
struct SyntheticModel {
    int centers = 8;
    double length_scale = 1.0;
    double variation_budget = 2.0;
    double threshold_quantile = 0.6;
    double noise_relative = 0.05;

    void validate() const;
};

struct EnvironmentTrace {
    int horizon = 0;
    RowMatrix f;  // T x |X|, noise-free RSS
    RowMatrix g;  // T x |X|, constraint values
    double noise_std_reward = 0.0;
    double noise_std_constraint = 0.0;
    double derived_B = 0.0;    // max |f|
    double derived_G = 0.0;    // max |g|
    double derived_tau = 0.0;  // min_t (-min_x g_t(x))
    double derived_B_f = 0.0;  // sum_t max_x |f_{t+1} - f_t|
    double derived_B_g = 0.0;
    std::uint64_t seed = 0;
    int attempts = 1;
    std::optional<std::vector<int>> change_times;  // set for abrupt traces
    std::vector<std::pair<std::string, std::string>> metadata;

    std::size_t arm_count() const noexcept { return static_cast<std::size_t>(f.cols()); }
    double budget() const noexcept { return derived_B_f > derived_B_g ? derived_B_f : derived_B_g; }
};

// Pure function of its arguments. Retries with a fresh sub-seed (up to 20
// attempts) when the Slater check fails, then throws InfeasibleError.
EnvironmentTrace generate_trace(const ChannelModel& model, const BeamCodebook& codebook, int horizon,
                                std::uint64_t seed);

EnvironmentTrace generate_synthetic_trace(const SyntheticModel& model, const BeamCodebook& codebook,
                                          int horizon, std::uint64_t seed);

// Fills the derived constants from f and g. Throws InfeasibleError naming the
// first step with no strictly feasible arm.
void derive_constants(EnvironmentTrace& trace);

// r = f_t(arm) + n, c = g_t(arm) + eps; always consumes two normal draws.
Observation observe(const EnvironmentTrace& trace, int t, std::size_t arm, Rng& rng);

struct TraceCheck {
    bool rss_nonnegative = true;
    bool slater_feasible = true;
    bool piecewise_constant = true;
    bool constants_consistent = true;
    std::string detail;

    bool ok() const noexcept { return rss_nonnegative && slater_feasible && piecewise_constant && constants_consistent; }
};

TraceCheck check_trace(const EnvironmentTrace& trace);

// Linear-interpolation quantile (q in [0, 1]).
double quantile(std::vector<double> values, double q);

}  // namespace beamucb
