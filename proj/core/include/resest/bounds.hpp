#pragma once

#include "resest/gpr.hpp"
#include "resest/types.hpp"

namespace resest {

/// Clamp x to [-delta, delta]; delta = 0 gives 0.
double sat(double x, double delta);

/// Keeps the k largest-magnitude entries of e (ties broken by lower index).
Vector best_k_term(const Vector& e, int k);

/// |e - e[k]|_1, the l1 mass outside the k largest entries.
double best_k_term_error(const Vector& e, int k);

/// 2 sat_delta((1 + gamma)/(1 - gamma) |e - e[k]|_1).
double bound_main(double gamma, double delta, const Vector& e, int k);

/// RIP error bound in terms of delta_2k < 1/sqrt(2).
double bound_rip(double delta2k, int k, const Vector& e);

/// (m / sqrt 2) (4(1 + gamma) / (m (1 - gamma)))^{1/q} |e - e[k]|_1; q may be infinite.
double bound_nsp(double gamma, double q, int m, const Vector& e, int k);

/// (m - k) delta / sqrt(m): the largest |eps - eps[k]|_1 over |eps|_2 <= delta.
double bound_kth_term(double delta, int m, int k);

/// State error bound with delta(tau) = sqrt(Sigma_bar) * sqrt(chi2_m(tau)).
double bound_state(double gamma, double tau, int m, int k, double sigma_bar, double Sigma_bar,
                   double sigma_h_min, const Vector& e_hat);

/// Same bound with delta(tau) supplied directly.
double bound_state_from_delta(double gamma, double delta_tau, int m, int k, double sigma_bar,
                              double sigma_h_min, const Vector& e_hat);

/// Largest l1 distance from the center of the ellipsoid to any of its points:
/// sqrt(radius_sq * sum_j 1 / inv_weights_j).
double ellipsoid_l1_radius(const EllipsoidConstraint& c);

}  // namespace resest
