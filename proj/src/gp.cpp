#include "beamucb/gp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "beamucb/errors.hpp"

namespace beamucb {

PosteriorState::PosteriorState(KernelSpec spec, double lambda)
    : PosteriorState(spec, lambda, nullptr) {}

PosteriorState::PosteriorState(KernelSpec spec, double lambda, std::shared_ptr<const PointList> candidates)
    : spec_(spec), lambda_(lambda), candidates_(std::move(candidates)) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidInput("posterior: lambda must be positive");
    if (candidates_) {
        candidate_prior_.resize(static_cast<Eigen::Index>(candidates_->size()));
        for (std::size_t i = 0; i < candidates_->size(); ++i) {
            const Vector& c = (*candidates_)[i];
            candidate_prior_[static_cast<Eigen::Index>(i)] = spec_(c, c);
        }
        cand_proj_.resize(candidate_prior_.size(), 0);
    }
}

void PosteriorState::reset() {
    points_.clear();
    targets_.clear();
    info_gain_ = 0.0;
    // Capacity is retained; only the leading block is ever read.
}

Vector PosteriorState::cross_kernel(const Vector& x) const {
    if (x.size() != spec_.input_dim())
        throw InvalidInput("posterior: input dimension mismatch, expected " + std::to_string(spec_.input_dim()));
    Vector k(n());
    for (Eigen::Index i = 0; i < n(); ++i) k[i] = spec_(points_[static_cast<std::size_t>(i)], x);
    return k;
}

void PosteriorState::ensure_capacity(Eigen::Index needed) {
    if (chol_.rows() >= needed) return;
    const Eigen::Index cap = std::max<Eigen::Index>(needed, std::max<Eigen::Index>(16, 2 * chol_.rows()));
    chol_.conservativeResize(cap, cap);
    whitened_.conservativeResize(cap);
    if (candidates_) cand_proj_.conservativeResize(cand_proj_.rows(), cap);
}

void PosteriorState::update(const Vector& x, double y) {
    if (!std::isfinite(y)) throw InvalidInput("posterior: non-finite observation");
    const Vector k = cross_kernel(x);
    const Eigen::Index t = n();
    Vector row(t);
    if (t > 0) row = chol_.topLeftCorner(t, t).triangularView<Eigen::Lower>().solve(k);
    append(x, row, y);
}

void PosteriorState::update_candidate(std::size_t index, double y) {
    if (!candidates_ || index >= candidates_->size()) throw InvalidInput("posterior: candidate index out of range");
    if (!std::isfinite(y)) throw InvalidInput("posterior: non-finite observation");
    const Eigen::Index t = n();
    const Vector row = cand_proj_.row(static_cast<Eigen::Index>(index)).head(t).transpose();
    append((*candidates_)[index], row, y);
}

void PosteriorState::append(const Vector& x, const Vector& row, double y) {
    const Eigen::Index t = n();
    const double prior = spec_(x, x);
    const double d2 = prior + lambda_ - row.squaredNorm();
    if (!(d2 > 0.0) || !std::isfinite(d2)) {
        refactorize_with(x, y);
        return;
    }
    const double diag = std::sqrt(d2);
    const double w = (y - (t > 0 ? row.dot(whitened_.head(t)) : 0.0)) / diag;

    Vector cand_col;
    if (candidates_) {
        const auto m = static_cast<Eigen::Index>(candidates_->size());
        cand_col.resize(m);
        for (Eigen::Index c = 0; c < m; ++c) cand_col[c] = spec_((*candidates_)[static_cast<std::size_t>(c)], x);
        if (t > 0) cand_col.noalias() -= cand_proj_.leftCols(t) * row;
        cand_col /= diag;
    }

    ensure_capacity(t + 1);
    points_.push_back(x);
    targets_.push_back(y);
    if (t > 0) chol_.row(t).head(t) = row.transpose();
    chol_(t, t) = diag;
    whitened_[t] = w;
    if (candidates_) cand_proj_.col(t) = cand_col;
    info_gain_ += 0.5 * std::log(d2 / lambda_);
}

void PosteriorState::refactorize_with(const Vector& x, double y) {
    PosteriorState next = *this;
    next.points_.push_back(x);
    next.targets_.push_back(y);
    next.refactorize();
    *this = std::move(next);
}

void PosteriorState::refactorize() {
    const Eigen::Index t = n();
    chol_.resize(std::max<Eigen::Index>(t, 16), std::max<Eigen::Index>(t, 16));
    whitened_.resize(chol_.rows());
    if (candidates_) cand_proj_.resize(cand_proj_.rows(), chol_.cols());
    info_gain_ = 0.0;
    if (t == 0) return;

    Matrix a = gram(spec_, points_).entries;
    a.diagonal().array() += lambda_;
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success)
        throw NumericalError("posterior: Cholesky of K + lambda I failed after refactorization");
    const Matrix l = llt.matrixL();
    chol_.topLeftCorner(t, t) = l;
    const Eigen::Map<const Vector> y(targets_.data(), t);
    whitened_.head(t) = l.triangularView<Eigen::Lower>().solve(y);
    for (Eigen::Index i = 0; i < t; ++i) info_gain_ += std::log(l(i, i)) - 0.5 * std::log(lambda_);

    if (candidates_) {
        const auto m = static_cast<Eigen::Index>(candidates_->size());
        Matrix kc(t, m);
        for (Eigen::Index c = 0; c < m; ++c)
            for (Eigen::Index i = 0; i < t; ++i)
                kc(i, c) = spec_(points_[static_cast<std::size_t>(i)], (*candidates_)[static_cast<std::size_t>(c)]);
        cand_proj_.leftCols(t) = l.triangularView<Eigen::Lower>().solve(kc).transpose();
    }
}

double PosteriorState::mean(const Vector& x) const {
    const Vector k = cross_kernel(x);
    const Eigen::Index t = n();
    if (t == 0) return 0.0;
    const Vector v = chol_.topLeftCorner(t, t).triangularView<Eigen::Lower>().solve(k);
    return v.dot(whitened_.head(t));
}

double PosteriorState::variance(const Vector& x) const {
    const Vector k = cross_kernel(x);
    const double prior = spec_(x, x);
    const Eigen::Index t = n();
    if (t == 0) return std::max(prior, 0.0);
    const Vector v = chol_.topLeftCorner(t, t).triangularView<Eigen::Lower>().solve(k);
    return std::max(prior - v.squaredNorm(), 0.0);
}

double PosteriorState::candidate_mean(std::size_t index) const {
    if (!candidates_ || index >= candidates_->size()) throw InvalidInput("posterior: candidate index out of range");
    const Eigen::Index t = n();
    if (t == 0) return 0.0;
    return cand_proj_.row(static_cast<Eigen::Index>(index)).head(t).dot(whitened_.head(t));
}

double PosteriorState::candidate_variance(std::size_t index) const {
    if (!candidates_ || index >= candidates_->size()) throw InvalidInput("posterior: candidate index out of range");
    const auto i = static_cast<Eigen::Index>(index);
    const Eigen::Index t = n();
    const double prior = candidate_prior_[i];
    if (t == 0) return std::max(prior, 0.0);
    return std::max(prior - cand_proj_.row(i).head(t).squaredNorm(), 0.0);
}

Vector PosteriorState::candidate_means() const {
    if (!candidates_) throw InvalidInput("posterior: no candidate set");
    const Eigen::Index t = n();
    if (t == 0) return Vector::Zero(candidate_prior_.size());
    return cand_proj_.leftCols(t) * whitened_.head(t);
}

Vector PosteriorState::candidate_variances() const {
    if (!candidates_) throw InvalidInput("posterior: no candidate set");
    const Eigen::Index t = n();
    Vector var = candidate_prior_;
    if (t > 0) var -= cand_proj_.leftCols(t).rowwise().squaredNorm();
    return var.cwiseMax(0.0);
}

Matrix PosteriorState::cholesky() const {
    const Eigen::Index t = n();
    Matrix l = Matrix::Zero(t, t);
    l.triangularView<Eigen::Lower>() = chol_.topLeftCorner(t, t).triangularView<Eigen::Lower>();
    return l;
}

double greedy_info_gain(const KernelSpec& spec, const PointList& candidates, int budget, double lambda) {
    if (candidates.empty()) throw InvalidInput("greedy info gain: empty candidate set");
    if (budget < 0) throw InvalidInput("greedy info gain: negative budget");
    PosteriorState post(spec, lambda, std::make_shared<const PointList>(candidates));
    for (int step = 0; step < budget; ++step) {
        const Vector var = post.candidate_variances();
        Eigen::Index best = 0;
        var.maxCoeff(&best);
        post.update_candidate(static_cast<std::size_t>(best), 0.0);
    }
    return post.info_gain();
}

}  // namespace beamucb
