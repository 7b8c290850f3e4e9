#include "resest/bounds.hpp"

#include "resest/chi2.hpp"
#include "resest/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace resest {
namespace {

void check_gamma(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw DomainError("gamma must lie in (0, 1)");
    }
}

void check_k(int k, Eigen::Index size) {
    if (k < 0 || k > size) {
        throw DomainError("k must lie in [0, m]");
    }
}

}  // namespace

double sat(double x, double delta) {
    if (!(delta >= 0.0)) {
        throw DomainError("saturation level must be nonnegative");
    }
    return std::clamp(x, -delta, delta);
}

Vector best_k_term(const Vector& e, int k) {
    check_k(k, e.size());
    std::vector<int> order(static_cast<std::size_t>(e.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return std::abs(e(a)) > std::abs(e(b)); });
    Vector out = Vector::Zero(e.size());
    for (int i = 0; i < k; ++i) {
        const int j = order[static_cast<std::size_t>(i)];
        out(j) = e(j);
    }
    return out;
}

double best_k_term_error(const Vector& e, int k) { return (e - best_k_term(e, k)).lpNorm<1>(); }

double bound_main(double gamma, double delta, const Vector& e, int k) {
    check_gamma(gamma);
    if (!(delta > 0.0)) {
        throw DomainError("prior-set radius delta must be positive");
    }
    return 2.0 * sat((1.0 + gamma) / (1.0 - gamma) * best_k_term_error(e, k), delta);
}

double bound_rip(double delta2k, int k, const Vector& e) {
    const double limit = 1.0 / std::sqrt(2.0);
    if (!(delta2k >= 0.0) || delta2k >= limit) {
        throw DomainError("RIP bound needs 0 <= delta_2k < 1/sqrt(2)");
    }
    if (k < 1) {
        throw DomainError("RIP bound needs k >= 1");
    }
    const double d = delta2k;
    const double factor = (d + std::sqrt(d * (limit - d))) / (std::sqrt(2.0) * (limit - d)) + 1.0;
    return 2.0 / std::sqrt(static_cast<double>(k)) * factor * best_k_term_error(e, k);
}

double bound_nsp(double gamma, double q, int m, const Vector& e, int k) {
    check_gamma(gamma);
    if (!(q > 1.0)) {
        throw DomainError("NSP bound needs q > 1");
    }
    if (m < 1) {
        throw DomainError("NSP bound needs m >= 1");
    }
    const double md = static_cast<double>(m);
    const double power = std::isinf(q) ? 1.0 : std::pow(4.0 * (1.0 + gamma) / (md * (1.0 - gamma)), 1.0 / q);
    return md / std::sqrt(2.0) * power * best_k_term_error(e, k);
}

double bound_kth_term(double delta, int m, int k) {
    if (k < 0 || k >= m) {
        throw DomainError("kth-term bound needs 0 <= k < m");
    }
    if (!(delta >= 0.0)) {
        throw DomainError("kth-term bound needs delta >= 0");
    }
    return static_cast<double>(m - k) / std::sqrt(static_cast<double>(m)) * delta;
}

double bound_state_from_delta(double gamma, double delta_tau, int m, int k, double sigma_bar,
                              double sigma_h_min, const Vector& e_hat) {
    check_gamma(gamma);
    if (!(sigma_h_min > 0.0)) {
        throw DomainError("smallest singular value of H must be positive");
    }
    if (!(sigma_bar >= 0.0) || !(delta_tau >= 0.0)) {
        throw DomainError("noise scales must be nonnegative");
    }
    if (k < 0 || k >= m || e_hat.size() != m) {
        throw DomainError("state bound needs 0 <= k < m and an m-vector e_hat");
    }
    const double c1 = 2.0 / sigma_h_min;
    const double c2 = (1.0 + gamma) / (1.0 - gamma);
    const double c3 = c2 * static_cast<double>(m - k) / std::sqrt(static_cast<double>(m)) * sigma_bar;
    return c1 * sat(c2 * best_k_term_error(e_hat, k) + c3 * delta_tau, delta_tau) +
           c1 * sat(c3 * delta_tau, delta_tau);
}

double bound_state(double gamma, double tau, int m, int k, double sigma_bar, double Sigma_bar,
                   double sigma_h_min, const Vector& e_hat) {
    if (!(Sigma_bar >= 0.0)) {
        throw DomainError("Sigma_bar must be nonnegative");
    }
    const double delta_tau = std::sqrt(Sigma_bar) * std::sqrt(chi2_quantile(m, tau));
    return bound_state_from_delta(gamma, delta_tau, m, k, sigma_bar, sigma_h_min, e_hat);
}

double ellipsoid_l1_radius(const EllipsoidConstraint& c) {
    if (!(c.radius_sq >= 0.0) || !(c.inv_weights.array() > 0.0).all()) {
        throw DomainError("ellipsoid needs a nonnegative radius and positive weights");
    }
    return std::sqrt(c.radius_sq * c.inv_weights.cwiseInverse().sum());
}

}  // namespace resest
