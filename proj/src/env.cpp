#include "beamucb/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "beamucb/errors.hpp"
#include "beamucb/format.hpp"

namespace beamucb {

namespace {

constexpr int kMaxAttempts = 20;

struct UePaths {
    std::vector<double> angles;
    std::vector<Complex> base_gains;
    std::vector<Complex> deviation;

    CVector channel(int antennas) const {
        CVector h = CVector::Zero(antennas);
        for (std::size_t l = 0; l < angles.size(); ++l) h += (base_gains[l] + deviation[l]) * steering_vector(antennas, angles[l]);
        return h;
    }
};

Complex complex_normal(Rng& rng, double variance) {
    std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

UePaths draw_paths(Rng& rng, int paths) {
    std::uniform_real_distribution<double> angle(-std::numbers::pi / 2.0, std::numbers::pi / 2.0);
    UePaths ue;
    for (int l = 0; l < paths; ++l) {
        ue.angles.push_back(angle(rng));
        ue.base_gains.push_back(complex_normal(rng, 1.0 / paths));
        ue.deviation.emplace_back(0.0, 0.0);
    }
    return ue;
}

std::string join_ints(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(v[i]);
    }
    return out;
}

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += format_double(v[i]);
    }
    return out;
}

void fill_noise(EnvironmentTrace& trace, double relative, const std::optional<double>& reward,
                const std::optional<double>& constraint) {
    trace.noise_std_reward = reward.value_or(relative * trace.derived_B);
    trace.noise_std_constraint = constraint.value_or(relative * trace.derived_B);
}

// One attempt of the channel trace; throws InfeasibleError on Slater failure.
EnvironmentTrace channel_attempt(const ChannelModel& model, const BeamCodebook& codebook, int horizon, Rng& rng) {
    const int m = codebook.antennas;
    const auto arms = static_cast<Eigen::Index>(codebook.size());
    const int interfered = model.ue_count - 1;

    std::vector<UePaths> ues;
    for (int u = 0; u < model.ue_count; ++u) ues.push_back(draw_paths(rng, model.paths));

    std::vector<double> thresholds = model.thresholds;
    if (thresholds.empty()) {
        for (int j = 0; j < interfered; ++j) {
            const CVector h = ues[static_cast<std::size_t>(j + 1)].channel(m);
            std::vector<double> rss_row;
            for (const auto& x : codebook.vectors) rss_row.push_back(rss(h, x));
            thresholds.push_back(quantile(rss_row, model.threshold_quantile));
        }
    }

    EnvironmentTrace trace;
    trace.horizon = horizon;
    trace.f.resize(horizon, arms);
    trace.g.resize(horizon, arms);

    const auto* abrupt = std::get_if<AbruptDrift>(&model.drift);
    const auto* slow = std::get_if<SlowDrift>(&model.drift);
    std::normal_distribution<double> unit(0.0, 1.0);

    for (int t = 1; t <= horizon; ++t) {
        if (t > 1) {
            if (abrupt) {
                if (std::find(abrupt->change_times.begin(), abrupt->change_times.end(), t) != abrupt->change_times.end())
                    for (auto& ue : ues) ue = draw_paths(rng, model.paths);
            } else if (slow) {
                const double c = slow->ar_coefficient;
                const double gain_std = slow->gain_drift_scale * slow->innovation_std;
                for (auto& ue : ues) {
                    for (std::size_t l = 0; l < ue.angles.size(); ++l) {
                        ue.angles[l] += slow->innovation_std * unit(rng);
                        const Complex w = complex_normal(rng, 1.0 / model.paths);
                        ue.deviation[l] = c * ue.deviation[l] + std::sqrt(1.0 - c * c) * gain_std * w;
                    }
                }
            }
        }
        const CVector target = ues[0].channel(m);
        std::vector<CVector> others;
        for (int j = 0; j < interfered; ++j) others.push_back(ues[static_cast<std::size_t>(j + 1)].channel(m));
        for (Eigen::Index a = 0; a < arms; ++a) {
            const CVector& x = codebook.vectors[static_cast<std::size_t>(a)];
            trace.f(t - 1, a) = rss(target, x);
            trace.g(t - 1, a) = constraint_value(others, x, thresholds);
        }
    }

    derive_constants(trace);

    trace.metadata = {
        {"scenario", abrupt ? "abrupt" : "slow"},
        {"antennas", std::to_string(codebook.antennas)},
        {"beams", std::to_string(codebook.size())},
        {"paths", std::to_string(model.paths)},
        {"carrier_freq_hz", format_double(model.carrier_freq_hz)},
        {"ue_count", std::to_string(model.ue_count)},
        {"thresholds", join_doubles(thresholds)},
        {"threshold_quantile", format_double(model.threshold_quantile)},
        {"path_gains", "complex_gaussian_rayleigh"},
    };
    if (abrupt) {
        trace.metadata.emplace_back("change_times", join_ints(abrupt->change_times));
        std::vector<int> effective;
        for (int c : abrupt->change_times)
            if (c >= 2 && c <= horizon) effective.push_back(c);
        std::sort(effective.begin(), effective.end());
        trace.change_times = effective;
    } else {
        trace.metadata.emplace_back("ar_coefficient", format_double(slow->ar_coefficient));
        trace.metadata.emplace_back("innovation_std", format_double(slow->innovation_std));
        trace.metadata.emplace_back("gain_drift_scale", format_double(slow->gain_drift_scale));
    }
    trace.metadata.emplace_back("budget_proxy", "sup_norm_over_codebook");
    fill_noise(trace, model.noise_relative, model.noise_std_reward, model.noise_std_constraint);
    return trace;
}

// RKHS norm of sum_i a_i k(., z_i).
double expansion_norm(const Matrix& kzz, const Vector& a) { return std::sqrt(std::max(a.dot(kzz * a), 0.0)); }

Vector positive_coefficients(Rng& rng, int n, const Matrix& kzz) {
    std::normal_distribution<double> unit(0.0, 1.0);
    Vector a(n);
    for (int i = 0; i < n; ++i) a[i] = std::abs(unit(rng));
    return a / expansion_norm(kzz, a);
}

// Triangle wave in [0, 1] after travelling `length` in total, evaluated at T points.
std::vector<double> sweep(int horizon, double length) {
    std::vector<double> s(static_cast<std::size_t>(horizon), 0.0);
    for (int t = 0; t < horizon; ++t) {
        const double u = horizon > 1 ? length * t / (horizon - 1) : 0.0;
        double r = std::fmod(u, 2.0);
        if (r > 1.0) r = 2.0 - r;
        s[static_cast<std::size_t>(t)] = r;
    }
    return s;
}

EnvironmentTrace synthetic_attempt(const SyntheticModel& model, const BeamCodebook& codebook, int horizon, Rng& rng) {
    const PointList& features = *codebook.features;
    const auto arms = static_cast<Eigen::Index>(features.size());
    const KernelSpec kernel = KernelSpec::squared_exponential(model.length_scale, static_cast<int>(features.front().size()));

    auto pick_centers = [&] {
        std::vector<std::size_t> idx(features.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        idx.resize(static_cast<std::size_t>(std::min<Eigen::Index>(model.centers, arms)));
        PointList z;
        for (auto i : idx) z.push_back(features[i]);
        return z;
    };

    struct Family {
        PointList centers;
        Vector start, end;
        std::vector<double> path;
    };
    auto make_family = [&] {
        Family fam;
        fam.centers = pick_centers();
        const Matrix kzz = gram(kernel, fam.centers).entries;
        const int n = static_cast<int>(fam.centers.size());
        fam.start = positive_coefficients(rng, n, kzz);
        fam.end = positive_coefficients(rng, n, kzz);
        const double span = expansion_norm(kzz, fam.end - fam.start);
        fam.path = sweep(horizon, span > 0.0 ? model.variation_budget / span : 0.0);
        return fam;
    };
    const Family reward = make_family();
    const Family constraint = make_family();

    auto evaluate = [&](const Family& fam, double s, Eigen::Index arm) {
        const Vector a = (1.0 - s) * fam.start + s * fam.end;
        double v = 0.0;
        for (std::size_t i = 0; i < fam.centers.size(); ++i)
            v += a[static_cast<Eigen::Index>(i)] * kernel(fam.centers[i], features[static_cast<std::size_t>(arm)]);
        return v;
    };

    std::vector<double> first_row;
    for (Eigen::Index a = 0; a < arms; ++a) first_row.push_back(evaluate(constraint, constraint.path[0], a));
    const double xi = quantile(first_row, model.threshold_quantile);

    EnvironmentTrace trace;
    trace.horizon = horizon;
    trace.f.resize(horizon, arms);
    trace.g.resize(horizon, arms);
    for (int t = 0; t < horizon; ++t) {
        for (Eigen::Index a = 0; a < arms; ++a) {
            trace.f(t, a) = evaluate(reward, reward.path[static_cast<std::size_t>(t)], a);
            trace.g(t, a) = evaluate(constraint, constraint.path[static_cast<std::size_t>(t)], a) - xi;
        }
    }
    derive_constants(trace);
    trace.metadata = {
        {"scenario", "synthetic"},
        {"antennas", std::to_string(codebook.antennas)},
        {"beams", std::to_string(codebook.size())},
        {"centers", std::to_string(model.centers)},
        {"length_scale", format_double(model.length_scale)},
        {"variation_budget", format_double(model.variation_budget)},
        {"threshold", format_double(xi)},
        {"budget_proxy", "sup_norm_over_codebook"},
    };
    fill_noise(trace, model.noise_relative, std::nullopt, std::nullopt);
    return trace;
}

template <typename Attempt>
EnvironmentTrace with_retries(std::uint64_t seed, Attempt&& attempt) {
    std::string last_error;
    for (int k = 0; k < kMaxAttempts; ++k) {
        Rng rng(derive_seed(seed, Stream::kTrace, static_cast<std::uint64_t>(k)));
        try {
            EnvironmentTrace trace = attempt(rng);
            trace.seed = seed;
            trace.attempts = k + 1;
            return trace;
        } catch (const InfeasibleError& e) {
            last_error = e.what();
        }
    }
    throw InfeasibleError("trace generation failed after " + std::to_string(kMaxAttempts) +
                          " attempts; last: " + last_error);
}

}  // namespace

CVector steering_vector(int antennas, double theta) {
    if (antennas < 1) throw InvalidInput("steering vector: antenna count must be >= 1");
    CVector a(antennas);
    const double scale = 1.0 / std::sqrt(static_cast<double>(antennas));
    const double phase = std::numbers::pi * std::sin(theta);
    for (int m = 0; m < antennas; ++m) a[m] = std::polar(scale, phase * m);
    return a;
}

Vector feature_map(const CVector& x) {
    Vector out(2 * x.size());
    out.head(x.size()) = x.real();
    out.tail(x.size()) = x.imag();
    return out;
}

BeamCodebook build_codebook(int antennas, int n_beams) {
    if (antennas < 1) throw InvalidInput("codebook: antenna count must be >= 1");
    if (n_beams < 2) throw InvalidInput("codebook: need at least 2 beams");
    BeamCodebook cb;
    cb.antennas = antennas;
    auto features = std::make_shared<PointList>();
    for (int i = 0; i < n_beams; ++i) {
        const double theta = -std::numbers::pi / 2.0 + std::numbers::pi * i / (n_beams - 1);
        cb.angles.push_back(theta);
        cb.vectors.push_back(steering_vector(antennas, theta));
        features->push_back(feature_map(cb.vectors.back()));
    }
    cb.features = std::move(features);
    return cb;
}

double rss(const CVector& channel, const CVector& x) {
    if (channel.size() != x.size()) throw InvalidInput("rss: dimension mismatch");
    return std::abs(channel.dot(x));
}

double constraint_value(const std::vector<CVector>& channels, const CVector& x, const std::vector<double>& thresholds) {
    if (channels.empty()) throw InvalidInput("constraint: empty interfered set");
    if (channels.size() != thresholds.size()) throw InvalidInput("constraint: channel/threshold count mismatch");
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < channels.size(); ++j) worst = std::max(worst, rss(channels[j], x) - thresholds[j]);
    return worst;
}

void ChannelModel::validate() const {
    if (paths < 1) throw InvalidInput("channel: path count must be >= 1");
    if (ue_count < 2) throw InvalidInput("channel: need the target UE and at least one interfered UE");
    if (!thresholds.empty() && static_cast<int>(thresholds.size()) != ue_count - 1)
        throw InvalidInput("channel: one threshold per interfered UE required");
    if (!(threshold_quantile >= 0.0 && threshold_quantile <= 1.0))
        throw InvalidInput("channel: threshold quantile must lie in [0, 1]");
    if (!(noise_relative >= 0.0)) throw InvalidInput("channel: noise level must be >= 0");
    if (noise_std_reward && !(*noise_std_reward >= 0.0)) throw InvalidInput("channel: reward noise must be >= 0");
    if (noise_std_constraint && !(*noise_std_constraint >= 0.0))
        throw InvalidInput("channel: constraint noise must be >= 0");
    if (const auto* slow = std::get_if<SlowDrift>(&drift)) {
        if (!(slow->ar_coefficient > 0.0 && slow->ar_coefficient < 1.0))
            throw InvalidInput("channel: AR coefficient must lie in (0, 1)");
        if (!(slow->innovation_std >= 0.0) || !(slow->gain_drift_scale >= 0.0))
            throw InvalidInput("channel: drift magnitudes must be >= 0");
    } else {
        for (int c : std::get<AbruptDrift>(drift).change_times)
            if (c < 1) throw InvalidInput("channel: change times are 1-based");
    }
}

void SyntheticModel::validate() const {
    if (centers < 1) throw InvalidInput("synthetic: need at least one center");
    if (!(length_scale > 0.0)) throw InvalidInput("synthetic: length scale must be positive");
    if (!(variation_budget >= 0.0)) throw InvalidInput("synthetic: variation budget must be >= 0");
    if (!(threshold_quantile >= 0.0 && threshold_quantile <= 1.0))
        throw InvalidInput("synthetic: threshold quantile must lie in [0, 1]");
    if (!(noise_relative >= 0.0)) throw InvalidInput("synthetic: noise level must be >= 0");
}

EnvironmentTrace generate_trace(const ChannelModel& model, const BeamCodebook& codebook, int horizon,
                                std::uint64_t seed) {
    model.validate();
    if (horizon < 1) throw InvalidInput("trace: horizon must be >= 1");
    if (codebook.size() == 0) throw InvalidInput("trace: empty codebook");
    return with_retries(seed, [&](Rng& rng) { return channel_attempt(model, codebook, horizon, rng); });
}

EnvironmentTrace generate_synthetic_trace(const SyntheticModel& model, const BeamCodebook& codebook, int horizon,
                                          std::uint64_t seed) {
    model.validate();
    if (horizon < 1) throw InvalidInput("trace: horizon must be >= 1");
    if (codebook.size() == 0) throw InvalidInput("trace: empty codebook");
    return with_retries(seed, [&](Rng& rng) { return synthetic_attempt(model, codebook, horizon, rng); });
}

void derive_constants(EnvironmentTrace& trace) {
    if (trace.f.rows() != trace.horizon || trace.g.rows() != trace.horizon || trace.f.cols() != trace.g.cols() ||
        trace.f.cols() == 0)
        throw InvalidInput("trace: f and g must both be T x |X|");
    trace.derived_B = trace.f.cwiseAbs().maxCoeff();
    trace.derived_G = trace.g.cwiseAbs().maxCoeff();
    double tau = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trace.horizon; ++t) {
        const double best = trace.g.row(t).minCoeff();
        if (!(best < 0.0))
            throw InfeasibleError("Slater condition violated at t=" + std::to_string(t + 1) +
                                  ": no arm with g_t(x) < 0 (min " + format_double(best) + ")");
        tau = std::min(tau, -best);
    }
    trace.derived_tau = tau;
    trace.derived_B_f = 0.0;
    trace.derived_B_g = 0.0;
    for (int t = 0; t + 1 < trace.horizon; ++t) {
        trace.derived_B_f += (trace.f.row(t + 1) - trace.f.row(t)).cwiseAbs().maxCoeff();
        trace.derived_B_g += (trace.g.row(t + 1) - trace.g.row(t)).cwiseAbs().maxCoeff();
    }
}

Observation observe(const EnvironmentTrace& trace, int t, std::size_t arm, Rng& rng) {
    if (t < 1 || t > trace.horizon) throw InvalidInput("observe: t out of range: " + std::to_string(t));
    if (arm >= trace.arm_count()) throw InvalidInput("observe: arm out of range: " + std::to_string(arm));
    std::normal_distribution<double> unit(0.0, 1.0);
    const double n = unit(rng);
    const double e = unit(rng);
    const auto a = static_cast<Eigen::Index>(arm);
    return {trace.f(t - 1, a) + trace.noise_std_reward * n, trace.g(t - 1, a) + trace.noise_std_constraint * e};
}

TraceCheck check_trace(const EnvironmentTrace& trace) {
    TraceCheck check;
    std::ostringstream detail;
    if (trace.f.size() > 0 && trace.f.minCoeff() < 0.0) {
        check.rss_nonnegative = false;
        detail << "negative RSS entry; ";
    }
    if (!(trace.derived_tau > 0.0)) {
        check.slater_feasible = false;
        detail << "derived tau not positive; ";
    }
    for (int t = 0; t < trace.horizon && check.slater_feasible; ++t) {
        if (trace.g.row(t).minCoeff() > -trace.derived_tau) {
            check.slater_feasible = false;
            detail << "no arm with g <= -tau at t=" << t + 1 << "; ";
        }
    }
    if (trace.change_times) {
        const auto& ct = *trace.change_times;
        for (int t = 1; t + 1 <= trace.horizon; ++t) {
            const int next = t + 1;
            if (std::find(ct.begin(), ct.end(), next) != ct.end()) continue;
            if (trace.f.row(t) != trace.f.row(t - 1) || trace.g.row(t) != trace.g.row(t - 1)) {
                check.piecewise_constant = false;
                detail << "row change at t=" << next << " outside change times; ";
                break;
            }
        }
    }
    if (trace.f.size() > 0 && (trace.derived_B < trace.f.cwiseAbs().maxCoeff() ||
                               trace.derived_G < trace.g.cwiseAbs().maxCoeff())) {
        check.constants_consistent = false;
        detail << "derived bounds below sup norm; ";
    }
    check.detail = detail.str();
    return check;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw InvalidInput("quantile of empty set");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

}  // namespace beamucb
