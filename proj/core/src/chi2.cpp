#include "resest/chi2.hpp"

#include "resest/errors.hpp"

#include <cmath>
#include <limits>

namespace resest {
namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxTerms = 10000;

// Power series, good for x < a + 1.
double gamma_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < kMaxTerms; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) {
            break;
        }
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x) (modified Lentz), good for x >= a + 1.
double gamma_continued_fraction(double a, double x) {
    constexpr double tiny = std::numeric_limits<double>::min() / kEps;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxTerms; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) {
            d = tiny;
        }
        c = b + an / c;
        if (std::abs(c) < tiny) {
            c = tiny;
        }
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) {
            break;
        }
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0)) {
        throw DomainError("regularized_gamma_p needs a > 0 and x >= 0");
    }
    if (x == 0.0) {
        return 0.0;
    }
    if (std::isinf(x)) {
        return 1.0;
    }
    if (x < a + 1.0) {
        return gamma_series(a, x);
    }
    return 1.0 - gamma_continued_fraction(a, x);
}

double chi2_cdf(int dof, double x) {
    if (dof < 1) {
        throw DomainError("chi-squared needs at least one degree of freedom");
    }
    if (x <= 0.0) {
        return 0.0;
    }
    return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

double chi2_quantile(int dof, double tau) {
    if (dof < 1) {
        throw DomainError("chi-squared needs at least one degree of freedom");
    }
    if (!(tau > 0.0 && tau < 1.0)) {
        throw DomainError("chi-squared quantile needs 0 < tau < 1");
    }
    double lo = 0.0;
    double hi = std::max(1.0, static_cast<double>(dof));
    while (chi2_cdf(dof, hi) < tau) {
        lo = hi;
        hi *= 2.0;
    }
    for (int iter = 0; iter < 400 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi;
         ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (chi2_cdf(dof, mid) < tau) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace resest
