#include "beamucb/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "beamucb/errors.hpp"

namespace beamucb {

RunMetrics compute_metrics(const EnvironmentTrace& trace, std::span<const double> oracle_series,
                           std::span<const std::size_t> arms) {
    const std::size_t horizon = arms.size();
    if (oracle_series.size() != horizon) throw InvalidInput("metrics: oracle series and arm sequence differ in length");
    if (horizon > static_cast<std::size_t>(trace.horizon)) throw InvalidInput("metrics: arm sequence longer than trace");

    RunMetrics m;
    m.arms.assign(arms.begin(), arms.end());
    m.oracle.assign(oracle_series.begin(), oracle_series.end());
    double regret = 0.0;
    double cost_sum = 0.0;
    for (std::size_t k = 0; k < horizon; ++k) {
        if (arms[k] >= trace.arm_count()) throw InvalidInput("metrics: arm index out of range");
        const auto t = static_cast<Eigen::Index>(k);
        const auto a = static_cast<Eigen::Index>(arms[k]);
        const double f = trace.f(t, a);
        const double g = trace.g(t, a);
        regret += oracle_series[k] - f;
        cost_sum += g;
        const double steps = static_cast<double>(k + 1);
        m.rewards_true.push_back(f);
        m.costs_true.push_back(g);
        m.regret_cum.push_back(regret);
        m.violation_cum.push_back(std::max(cost_sum, 0.0));
        m.regret_avg.push_back(regret / steps);
        m.violation_avg.push_back(m.violation_cum.back() / steps);
    }
    return m;
}

SeedSummary aggregate_seeds(std::span<const RunMetrics> runs) {
    if (runs.empty()) throw InvalidInput("aggregate: no runs");
    const std::size_t horizon = runs.front().horizon();
    for (const auto& r : runs)
        if (r.horizon() != horizon) throw InvalidInput("aggregate: runs differ in horizon");

    const double n = static_cast<double>(runs.size());
    SeedSummary s;
    s.runs = runs.size();
    auto reduce = [&](auto member, std::vector<double>& mean, std::vector<double>& stderr_out) {
        mean.assign(horizon, 0.0);
        stderr_out.assign(horizon, 0.0);
        for (std::size_t k = 0; k < horizon; ++k) {
            double sum = 0.0;
            for (const auto& r : runs) sum += (r.*member)[k];
            const double mu = sum / n;
            mean[k] = mu;
            if (runs.size() > 1) {
                double ss = 0.0;
                for (const auto& r : runs) {
                    const double d = (r.*member)[k] - mu;
                    ss += d * d;
                }
                stderr_out[k] = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
            }
        }
    };
    reduce(&RunMetrics::regret_avg, s.regret_avg_mean, s.regret_avg_stderr);
    reduce(&RunMetrics::violation_avg, s.violation_avg_mean, s.violation_avg_stderr);
    return s;
}

}  // namespace beamucb
