#include "beamucb/oracle.hpp"

#include <string>

#include "beamucb/errors.hpp"

namespace beamucb {

OraclePolicy best_feasible_arm(std::span<const double> f, std::span<const double> g) {
    if (f.size() != g.size() || f.empty()) throw InvalidInput("oracle: f and g must be non-empty and equal length");
    bool found = false;
    OraclePolicy best;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (g[i] > 0.0) continue;
        if (!found || f[i] > best.value) {
            best = {{i}, {1.0}, f[i], g[i]};
            found = true;
        }
    }
    if (!found) throw InfeasibleError("oracle: no arm satisfies g <= 0");
    return best;
}

OraclePolicy solve_optimal_policy(std::span<const double> f, std::span<const double> g) {
    OraclePolicy best = best_feasible_arm(f, g);
    const std::size_t n = f.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            // One arm strictly infeasible, the other feasible.
            std::size_t hot = i, cold = j;
            if (g[i] > 0.0 && g[j] <= 0.0) {
                hot = i;
                cold = j;
            } else if (g[j] > 0.0 && g[i] <= 0.0) {
                hot = j;
                cold = i;
            } else {
                continue;
            }
            if (!(f[hot] > f[cold])) continue;  // mixing cannot beat the feasible arm alone
            const double p_hot = -g[cold] / (g[hot] - g[cold]);
            const double p_cold = 1.0 - p_hot;
            const double value = p_hot * f[hot] + p_cold * f[cold];
            if (value > best.value) {
                best.support = {i, j};
                best.weights = hot == i ? std::vector<double>{p_hot, p_cold} : std::vector<double>{p_cold, p_hot};
                best.value = value;
                best.cost = p_hot * g[hot] + p_cold * g[cold];
            }
        }
    }
    return best;
}

std::string_view to_string(OracleMode mode) {
    return mode == OracleMode::Randomized ? "randomized" : "deterministic";
}

std::vector<double> oracle_reward_series(const EnvironmentTrace& trace, OracleMode mode) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(trace.horizon));
    const auto n = static_cast<std::size_t>(trace.f.cols());
    for (int t = 0; t < trace.horizon; ++t) {
        const std::span<const double> f(trace.f.row(t).data(), n);
        const std::span<const double> g(trace.g.row(t).data(), n);
        try {
            out.push_back(mode == OracleMode::Randomized ? solve_optimal_policy(f, g).value
                                                         : best_feasible_arm(f, g).value);
        } catch (const InfeasibleError& e) {
            throw InfeasibleError(std::string(e.what()) + " at t=" + std::to_string(t + 1));
        }
    }
    return out;
}

}  // namespace beamucb
