#include "beamucb/kernels.hpp"

#include <cmath>
#include <string>

#include "beamucb/errors.hpp"

namespace beamucb {

KernelSpec::KernelSpec(KernelKind kind, double length_scale, int input_dim)
    : kind_(kind), length_scale_(length_scale), input_dim_(input_dim) {
    if (input_dim < 1) throw InvalidInput("kernel input dimension must be >= 1");
    if (kind == KernelKind::SquaredExponential && !(length_scale > 0.0))
        throw InvalidInput("SE length scale must be positive");
}

KernelSpec KernelSpec::squared_exponential(double length_scale, int input_dim) {
    return KernelSpec(KernelKind::SquaredExponential, length_scale, input_dim);
}

KernelSpec KernelSpec::linear(int input_dim) {
    return KernelSpec(KernelKind::Linear, 1.0, input_dim);
}

double KernelSpec::operator()(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) const {
    if (x.size() != input_dim_ || y.size() != input_dim_)
        throw InvalidInput("kernel input dimension mismatch: expected " + std::to_string(input_dim_));
    switch (kind_) {
        case KernelKind::SquaredExponential: {
            // Elementwise sum keeps k(x, y) and k(y, x) bit-identical.
            double s2 = 0.0;
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                const double d = x[i] - y[i];
                s2 += d * d;
            }
            return std::exp(-s2 / (2.0 * length_scale_ * length_scale_));
        }
        case KernelKind::Linear: {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < x.size(); ++i) acc += x[i] * y[i];
            return acc;
        }
    }
    return 0.0;
}

double eval_kernel(const KernelSpec& spec, const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& y) {
    return spec(x, y);
}

GramMatrix gram(const KernelSpec& spec, const PointList& points) {
    if (points.empty()) throw InvalidInput("gram: empty point list");
    const auto n = static_cast<Eigen::Index>(points.size());
    GramMatrix out{Matrix(n, n), points};
    for (Eigen::Index i = 0; i < n; ++i) {
        out.entries(i, i) = spec(points[i], points[i]);
        for (Eigen::Index j = 0; j < i; ++j) {
            const double v = spec(points[i], points[j]);
            out.entries(i, j) = v;
            out.entries(j, i) = v;
        }
    }
    return out;
}

double empirical_info_gain(const KernelSpec& spec, const PointList& points, double lambda) {
    if (!(lambda > 0.0)) throw InvalidInput("info gain: lambda must be positive");
    if (points.empty()) return 0.0;
    Matrix a = gram(spec, points).entries / lambda;
    a.diagonal().array() += 1.0;
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success) throw InvalidInput("info gain: I + K/lambda not positive definite");
    const Matrix& l = llt.matrixLLT();
    double half_logdet = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i) half_logdet += std::log(l(i, i));
    return half_logdet;
}

double theoretical_info_gain(const KernelSpec& spec, double n) {
    if (n <= 1.0) return 0.0;
    const double d = spec.input_dim();
    const double logn = std::log(n);
    if (spec.kind() == KernelKind::Linear) return d * logn;
    return std::pow(logn, d + 1.0);
}

}  // namespace beamucb
