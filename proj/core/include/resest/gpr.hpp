#pragma once

#include "resest/types.hpp"

#include <vector>

namespace resest {

/// Squared-exponential kernel hyperparameters plus per-channel noise levels.
struct KernelParams {
    double amplitude = 1.0;    // A
    double lengthscale = 1.0;  // l, k = A exp(-|z - z'|^2 / (2 l))
    Vector noise_std;          // sigma_j, one per output channel
};

struct TrainOptions {
    /// Retry a failed factorization once with 1e-10 * A added to the diagonal.
    bool jitter_on_failure = false;
    /// Use each channel's training mean as a constant prior mean instead of 0.
    bool center_targets = false;
};

double kernel_se(const Vector& z1, const Vector& z2, const KernelParams& params);

/// k(Z, Z) for the columns of Z.
Matrix kernel_matrix(const Matrix& z, const KernelParams& params);

struct GprPosterior {
    Vector mu;     // mu_j(z)
    Vector sigma;  // Sigma_j(z), variances
};

/// { v : sum_j inv_weights_j (v_j - center_j)^2 <= radius_sq }.
struct EllipsoidConstraint {
    Vector center;
    Vector inv_weights;
    double radius_sq = 0.0;
};

/// Independent per-channel Gaussian processes sharing one kernel matrix.
class GprModel {
public:
    /// Z is p x N (one column per sample), Y is m x N.
    static GprModel train(Matrix z, Matrix y, KernelParams params, const TrainOptions& opts = {});

    GprPosterior posterior(const Vector& z) const;

    const Matrix& kernel() const noexcept { return k_; }
    const KernelParams& params() const noexcept { return params_; }
    int channels() const noexcept { return static_cast<int>(y_.rows()); }
    int inputs() const noexcept { return static_cast<int>(z_.rows()); }
    int samples() const noexcept { return static_cast<int>(z_.cols()); }

private:
    GprModel() = default;

    Matrix z_;
    Matrix y_;
    KernelParams params_;
    Matrix k_;
    Vector mean_;
    Matrix alpha_;  // N x m, (K + sigma_j^2 I)^{-1} (Y_j - mean_j)
    std::vector<Matrix> factors_;  // lower Cholesky factors, one per distinct sigma
    std::vector<int> factor_of_;   // channel -> index into factors_
};

/// Ellipsoid at level tau: center mu(z), weights 1/Sigma_j(z), radius chi2_m(tau).
EllipsoidConstraint likelihood_ellipsoid(const GprPosterior& posterior, double tau);

}  // namespace resest
