#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "beamucb/kernels.hpp"

namespace testsupport {

using beamucb::Matrix;
using beamucb::PointList;
using beamucb::Vector;

inline Vector uniform_point(std::mt19937_64& rng, int dim, double lo = 0.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = u(rng);
    return v;
}

// Uniform in the unit ball (for linear kernels).
inline Vector ball_point(std::mt19937_64& rng, int dim) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = n(rng);
    return v / v.norm() * std::pow(u(rng), 1.0 / dim);
}

// Kernel written out from its definition, independent of the library.
inline double ref_kernel(const beamucb::KernelSpec& spec, const Vector& x, const Vector& y) {
    if (spec.kind() == beamucb::KernelKind::Linear) {
        double s = 0.0;
        for (int i = 0; i < x.size(); ++i) s += x[i] * y[i];
        return s;
    }
    double s2 = 0.0;
    for (int i = 0; i < x.size(); ++i) s2 += (x[i] - y[i]) * (x[i] - y[i]);
    const double l = spec.length_scale();
    return std::exp(-s2 / (2.0 * l * l));
}

struct DensePosterior {
    double mean;
    double variance;
};

// From-scratch posterior: full (K + lambda I) factorization via LU.
inline DensePosterior dense_posterior(const beamucb::KernelSpec& spec, const PointList& xs,
                                      const std::vector<double>& ys, double lambda, const Vector& probe) {
    const int n = static_cast<int>(xs.size());
    if (n == 0) return {0.0, ref_kernel(spec, probe, probe)};
    Matrix k(n, n);
    Vector kt(n), y(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) k(i, j) = ref_kernel(spec, xs[i], xs[j]);
        k(i, i) += lambda;
        kt[i] = ref_kernel(spec, xs[i], probe);
        y[i] = ys[i];
    }
    Eigen::FullPivLU<Matrix> lu(k);
    const Vector alpha = lu.solve(y);
    const Vector v = lu.solve(kt);
    return {kt.dot(alpha), ref_kernel(spec, probe, probe) - kt.dot(v)};
}

}  // namespace testsupport
