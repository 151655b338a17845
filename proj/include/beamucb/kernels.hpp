#pragma once

#include <vector>

#include <Eigen/Dense>

namespace beamucb {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using PointList = std::vector<Vector>;

enum class KernelKind { SquaredExponential, Linear };

// Covariance function over real inputs of a fixed dimension. k(x, x) <= 1
// holds for both kinds: exactly 1 for SE, and for Linear as long as inputs
// live in the unit ball.
class KernelSpec {
public:
    static KernelSpec squared_exponential(double length_scale, int input_dim);
    static KernelSpec linear(int input_dim);

    KernelKind kind() const noexcept { return kind_; }
    double length_scale() const noexcept { return length_scale_; }
    int input_dim() const noexcept { return input_dim_; }

    double operator()(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) const;

private:
    KernelSpec(KernelKind kind, double length_scale, int input_dim);

    KernelKind kind_;
    double length_scale_;
    int input_dim_;
};

double eval_kernel(const KernelSpec& spec, const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& y);

struct GramMatrix {
    Matrix entries;
    PointList points;
};

GramMatrix gram(const KernelSpec& spec, const PointList& points);

// Realized information gain 0.5 * log det(I + K / lambda) of the given points.
double empirical_info_gain(const KernelSpec& spec, const PointList& points, double lambda);

// Rate-only information gain: (log n)^(d+1) for SE, d * log n for Linear
// (unit constants). Zero for n <= 1.
double theoretical_info_gain(const KernelSpec& spec, double n);

}  // namespace beamucb
