#pragma once

namespace resest {

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double regularized_gamma_p(double a, double x);

/// CDF of the chi-squared distribution with `dof` degrees of freedom.
double chi2_cdf(int dof, double x);

/// Inverse of chi2_cdf by bisection; throws DomainError unless 0 < tau < 1.
double chi2_quantile(int dof, double tau);

}  // namespace resest
