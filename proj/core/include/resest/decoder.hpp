#pragma once

#include "resest/conic.hpp"
#include "resest/gpr.hpp"
#include "resest/measurement_model.hpp"
#include "resest/types.hpp"
#include "resest/weighted_l1.hpp"

#include <optional>
#include <vector>

namespace resest {

/// w_j = 1 / (|r_j| + damping).
Vector reweight(const Vector& r, double damping);

struct Decoded {
    Vector x;
    Vector e;
};

/// Smallest-support e with Q2^T (y - e) = 0, supports of size 0..k_max.
/// Throws NoFeasibleSupport when none fits.
Decoded l0_bruteforce_decode(const MeasurementModel& model, const Vector& y, int k_max);

/// e minimizing |e|_1 over the same affine set, x = R1^{-1} Q1^T (y - e).
Decoded l1_decode(const MeasurementModel& model, const Vector& y, const ConicOptions& opts = {});

struct DecoderConfig {
    double tau = 0.95;
    /// Re-weighting offset; unset means 1e-4 * |y|_inf.
    std::optional<double> damping;
    int max_reweight_iters = 10;
    double convergence_tol = 1e-6;
    /// Add the noise ellipsoid |eps|^2_{Sigma_eps^{-1}} <= chi2_m(tau).
    bool noise_constraint = true;
    /// Widen the prior to Sigma_j(z) + sigma_j^2, the spread of a noisy reading
    /// rather than of the latent mean.
    bool predictive_prior = false;
    ConicOptions solver;
};

struct EstimateReport {
    Vector x_hat;
    Vector eps_hat;
    Vector e_hat;  // y - H x_hat - eps_hat
    IndexSet support;
    int iterations = 0;
    /// sum_j log(|r_j| + damping) after each solve; the re-weighting scheme
    /// minimizes this penalty, so the trace does not increase.
    std::vector<double> objective_trace;
    SolveStatus status = SolveStatus::Optimal;
    double damping = 0.0;
};

/// Entries with |e_j| > 1e-6 max(1, |y|_inf).
IndexSet attack_support(const Vector& e_hat, const Vector& y);

/// Re-weighted l1 loop with an optional prior ellipsoid on Hx + eps.
/// Throws InfeasibleProblem when a solve certifies infeasibility.
EstimateReport reweighted_l1(const MeasurementModel& model, const Vector& y,
                             const std::optional<EllipsoidConstraint>& prior, const DecoderConfig& cfg);

/// Re-weighted l1 with the GPR likelihood ellipsoid at auxiliary point z.
EstimateReport resilient_estimate(const MeasurementModel& model, const GprModel& prior, const Vector& z,
                                  const Vector& y, const DecoderConfig& cfg);

}  // namespace resest
