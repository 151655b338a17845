#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "beamucb/env.hpp"

namespace beamucb {

// Randomized policy over at most two arms.
struct OraclePolicy {
    std::vector<std::size_t> support;
    std::vector<double> weights;
    double value = 0.0;  // E f
    double cost = 0.0;   // E g
};

// max_p sum p_i f_i  s.t.  sum p_i g_i <= 0, p in the simplex.
//
// With a single linear constraint every vertex of the feasible polytope has
// at most two nonzero weights, so the optimum is a feasible single arm or a
// binding mixture of one arm with g > 0 and one with g <= 0. All of these are
// enumerated. Ties keep the first candidate found: single arms by index, then
// pairs in lexicographic order.
OraclePolicy solve_optimal_policy(std::span<const double> f, std::span<const double> g);

// Best deterministic feasible arm (g <= 0), lowest index on ties.
OraclePolicy best_feasible_arm(std::span<const double> f, std::span<const double> g);

enum class OracleMode { Randomized, DeterministicBestFeasible };

std::string_view to_string(OracleMode mode);

std::vector<double> oracle_reward_series(const EnvironmentTrace& trace, OracleMode mode = OracleMode::Randomized);

}  // namespace beamucb
