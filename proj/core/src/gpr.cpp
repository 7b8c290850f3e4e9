#include "resest/gpr.hpp"

#include "resest/chi2.hpp"
#include "resest/errors.hpp"

#include <cmath>
#include <string>

namespace resest {
namespace {

void validate(const Matrix& z, const Matrix& y, const KernelParams& params) {
    if (z.cols() < 1) {
        throw EmptyInput("GPR training set is empty");
    }
    if (y.cols() != z.cols()) {
        throw ShapeError("GPR targets have " + std::to_string(y.cols()) + " samples, inputs have " +
                         std::to_string(z.cols()));
    }
    if (y.rows() < 1 || params.noise_std.size() != y.rows()) {
        throw ShapeError("GPR noise_std must have one entry per output channel");
    }
    if (!(params.amplitude > 0.0) || !(params.lengthscale > 0.0) || !std::isfinite(params.amplitude) ||
        !std::isfinite(params.lengthscale)) {
        throw DomainError("kernel amplitude and lengthscale must be positive and finite");
    }
    if (!params.noise_std.allFinite() || (params.noise_std.array() < 0.0).any()) {
        throw DomainError("GPR noise_std must be finite and nonnegative");
    }
    if (!z.allFinite() || !y.allFinite()) {
        throw DomainError("GPR training data contains non-finite entries");
    }
}

bool try_cholesky(const Matrix& a, Matrix& lower) {
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success) {
        return false;
    }
    lower = llt.matrixL();
    return (lower.diagonal().array() > 0.0).all();
}

}  // namespace

double kernel_se(const Vector& z1, const Vector& z2, const KernelParams& params) {
    return params.amplitude * std::exp(-(z1 - z2).squaredNorm() / (2.0 * params.lengthscale));
}

Matrix kernel_matrix(const Matrix& z, const KernelParams& params) {
    const auto n = z.cols();
    Matrix k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = params.amplitude;
        for (Eigen::Index j = 0; j < i; ++j) {
            k(i, j) = k(j, i) = kernel_se(z.col(i), z.col(j), params);
        }
    }
    return k;
}

GprModel GprModel::train(Matrix z, Matrix y, KernelParams params, const TrainOptions& opts) {
    validate(z, y, params);
    GprModel model;
    model.k_ = kernel_matrix(z, params);
    const auto n = z.cols();
    const auto m = y.rows();
    model.mean_ = opts.center_targets ? Vector(y.rowwise().mean()) : Vector::Zero(m);
    model.alpha_.resize(n, m);
    model.factor_of_.assign(static_cast<std::size_t>(m), -1);

    std::vector<double> sigmas;
    for (Eigen::Index j = 0; j < m; ++j) {
        const double s = params.noise_std(j);
        std::size_t slot = 0;
        while (slot < sigmas.size() && sigmas[slot] != s) {
            ++slot;
        }
        if (slot == sigmas.size()) {
            Matrix a = model.k_;
            a.diagonal().array() += s * s;
            Matrix lower;
            if (!try_cholesky(a, lower)) {
                if (!opts.jitter_on_failure) {
                    throw NumericalError("K + sigma^2 I is not numerically positive definite for channel " +
                                         std::to_string(j) + "; enable jitter or raise noise_std");
                }
                a.diagonal().array() += 1e-10 * params.amplitude;
                if (!try_cholesky(a, lower)) {
                    throw NumericalError("K + sigma^2 I is not positive definite even with jitter");
                }
            }
            sigmas.push_back(s);
            model.factors_.push_back(std::move(lower));
        }
        model.factor_of_[static_cast<std::size_t>(j)] = static_cast<int>(slot);
        const Matrix& lower = model.factors_[slot];
        Vector rhs = y.row(j).transpose().array() - model.mean_(j);
        lower.triangularView<Eigen::Lower>().solveInPlace(rhs);
        lower.transpose().triangularView<Eigen::Upper>().solveInPlace(rhs);
        model.alpha_.col(j) = rhs;
    }
    model.z_ = std::move(z);
    model.y_ = std::move(y);
    model.params_ = std::move(params);
    return model;
}

GprPosterior GprModel::posterior(const Vector& z) const {
    if (z.size() != z_.rows()) {
        throw ShapeError("GPR query has " + std::to_string(z.size()) + " inputs, model expects " +
                         std::to_string(z_.rows()));
    }
    const auto n = z_.cols();
    Vector kz(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        kz(i) = kernel_se(z, z_.col(i), params_);
    }
    GprPosterior post;
    post.mu = mean_ + alpha_.transpose() * kz;

    // One triangular solve per distinct noise level.
    std::vector<double> reduction(factors_.size());
    for (std::size_t f = 0; f < factors_.size(); ++f) {
        reduction[f] = factors_[f].triangularView<Eigen::Lower>().solve(kz).squaredNorm();
    }
    post.sigma.resize(y_.rows());
    for (Eigen::Index j = 0; j < y_.rows(); ++j) {
        const double r = reduction[static_cast<std::size_t>(factor_of_[static_cast<std::size_t>(j)])];
        post.sigma(j) = std::max(0.0, params_.amplitude - r);
    }
    return post;
}

EllipsoidConstraint likelihood_ellipsoid(const GprPosterior& posterior, double tau) {
    if (!(tau > 0.0 && tau < 1.0)) {
        throw DomainError("likelihood level tau must lie in (0, 1)");
    }
    if (posterior.mu.size() != posterior.sigma.size() || posterior.mu.size() == 0) {
        throw ShapeError("posterior mean and variance sizes differ");
    }
    if (!(posterior.sigma.array() > 0.0).all()) {
        throw NumericalError("posterior variance vanished; the ellipsoid is degenerate");
    }
    EllipsoidConstraint e;
    e.center = posterior.mu;
    e.inv_weights = posterior.sigma.cwiseInverse();
    e.radius_sq = chi2_quantile(static_cast<int>(posterior.mu.size()), tau);
    return e;
}

}  // namespace resest
