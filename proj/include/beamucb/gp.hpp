#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "beamucb/kernels.hpp"

namespace beamucb {

// Zero-mean GP posterior over one unknown function, conditioned on the
// observations since the last reset.
//
// The factor L of (K + lambda I) grows by one row per observation; queries
// use two triangular solves against it. When constructed with a candidate
// set (the codebook features), L^{-1} k_t(c) is kept for every candidate so
// mean/variance over the whole set cost O(|candidates| * t) instead of
// O(|candidates| * t^2).
//
// Queries are const and may run concurrently; updates need exclusive access.
class PosteriorState {
public:
    PosteriorState(KernelSpec spec, double lambda);
    PosteriorState(KernelSpec spec, double lambda, std::shared_ptr<const PointList> candidates);

    // Appends (x, y). Falls back to a full refactorization if the rank-one
    // append loses positive definiteness to round-off.
    void update(const Vector& x, double y);

    // Same as update((*candidates())[index], y), reusing the cached
    // projection of that candidate instead of a triangular solve.
    void update_candidate(std::size_t index, double y);

    // Back to the prior; the candidate set is kept.
    void reset();

    // Rebuilds the factor, projections and info gain from the stored data.
    void refactorize();

    double mean(const Vector& x) const;
    double variance(const Vector& x) const;

    double candidate_mean(std::size_t index) const;
    double candidate_variance(std::size_t index) const;
    Vector candidate_means() const;
    Vector candidate_variances() const;

    const KernelSpec& spec() const noexcept { return spec_; }
    double lambda() const noexcept { return lambda_; }
    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    const PointList& points() const noexcept { return points_; }
    const std::vector<double>& targets() const noexcept { return targets_; }
    const std::shared_ptr<const PointList>& candidates() const noexcept { return candidates_; }

    // Lower-triangular factor of K_t + lambda I (size t x t).
    Matrix cholesky() const;

    // 0.5 * log det(I + K_t / lambda), accumulated one observation at a time.
    double info_gain() const noexcept { return info_gain_; }

private:
    Eigen::Index n() const noexcept { return static_cast<Eigen::Index>(points_.size()); }
    Vector cross_kernel(const Vector& x) const;
    void ensure_capacity(Eigen::Index needed);
    void append(const Vector& x, const Vector& row, double y);
    void refactorize_with(const Vector& x, double y);

    KernelSpec spec_;
    double lambda_;
    std::shared_ptr<const PointList> candidates_;
    Vector candidate_prior_;

    PointList points_;
    std::vector<double> targets_;
    Matrix chol_;       // capacity x capacity; leading n x n block is live
    Vector whitened_;   // L^{-1} y
    Matrix cand_proj_;  // |candidates| x capacity; row c holds L^{-1} k_t(c)
    double info_gain_ = 0.0;
};

// Greedy (max-variance) estimate of the maximum information gain of
// `budget` observations drawn from `candidates`. Within a factor (1 - 1/e)
// of the true maximum by submodularity.
double greedy_info_gain(const KernelSpec& spec, const PointList& candidates, int budget, double lambda);

}  // namespace beamucb
