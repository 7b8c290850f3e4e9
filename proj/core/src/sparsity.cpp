#include "resest/sparsity.hpp"

#include "resest/errors.hpp"
#include "resest/measurement_model.hpp"
#include "resest/rng.hpp"
#include "resest/subsets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace resest {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool violates(double ratio, double gamma) { return ratio >= gamma * (1.0 - kStrictTolerance); }

void check_nsp_args(int k, double gamma, int q) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw DomainError("NSP gamma must be positive and finite");
    }
    if (q != 1 && q != 2) {
        throw DomainError("nsp_check supports q = 1 or q = 2");
    }
    if (k < 0) {
        throw DomainError("sparsity level k must be nonnegative");
    }
}

// Folds one candidate nullspace element into the certificate.
void consider(NspCertificate& cert, const Vector& v) {
    const NspRatio r = nsp_ratio(v, cert.k, cert.q);
    if (r.ratio > cert.worst_ratio || !cert.witness) {
        cert.worst_ratio = std::max(cert.worst_ratio, r.ratio);
        if (violates(r.ratio, cert.gamma) && (!cert.witness || r.ratio >= cert.worst_ratio)) {
            cert.witness = v;
            cert.witness_support = r.support;
        }
    }
}

NspCertificate vertex_enumeration(const Matrix& basis, NspCertificate cert) {
    const int m = static_cast<int>(basis.rows());
    const int d = static_cast<int>(basis.cols());
    cert.method = NspMethod::ExactVertex;
    for_each_combination(m, d - 1, [&](const IndexSet& rows) {
        const Matrix sub = select_rows(basis, rows);
        Eigen::JacobiSVD<Matrix> svd(sub, Eigen::ComputeFullV);
        const Vector& s = svd.singularValues();
        if (s.size() < d - 1 || s(d - 2) <= 1e-10 * std::max(1.0, s(0))) {
            return true;  // rank-deficient row block; its vertices appear elsewhere
        }
        consider(cert, basis * svd.matrixV().col(d - 1));
        return true;
    });
    return cert;
}

NspCertificate q2_eigen_check(const Matrix& basis, NspCertificate cert) {
    const int m = static_cast<int>(basis.rows());
    const int t = std::min(cert.k, m);
    cert.method = NspMethod::ExactQ2Eig;
    for_each_combination(m, t, [&](const IndexSet& support) {
        const Matrix on = select_rows(basis, support);
        const Matrix off = select_rows(basis, complement(support, m));
        const Matrix a = on.transpose() * on;
        const Matrix b = off.transpose() * off;
        Eigen::SelfAdjointEigenSolver<Matrix> off_eig(b);
        if (off.rows() == 0 || off_eig.eigenvalues()(0) <= 1e-12 * std::max(1.0, b.trace())) {
            // N_Tc loses rank: some nullspace element vanishes off T.
            const Vector v = basis * off_eig.eigenvectors().col(0);
            cert.worst_ratio = kInf;
            cert.witness = v;
            cert.witness_support = support;
            return false;
        }
        Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(a, b);
        const auto last = ges.eigenvalues().size() - 1;
        const double ratio = std::sqrt(std::max(0.0, ges.eigenvalues()(last)));
        if (ratio > cert.worst_ratio) {
            cert.worst_ratio = ratio;
            if (violates(ratio, cert.gamma)) {
                cert.witness = basis * ges.eigenvectors().col(last);
                cert.witness_support = support;
            }
        }
        return true;
    });
    return cert;
}

NspCertificate sampled(const Matrix& basis, NspCertificate cert, const NspOptions& opts) {
    cert.method = NspMethod::SampledFalsifier;
    for (Eigen::Index j = 0; j < basis.cols() && !cert.witness; ++j) {
        consider(cert, basis.col(j));
    }
    Rng rng(opts.seed);
    for (int i = 0; i < opts.samples && !cert.witness; ++i) {
        consider(cert, basis * rng.normal_vector(basis.cols()));
    }
    return cert;
}

NspCertificate finish(NspCertificate cert) {
    cert.holds = !cert.witness.has_value();
    if (cert.holds) {
        cert.witness_support.clear();
    }
    return cert;
}

void check_orthonormal(const Matrix& q1, int k) {
    if (q1.cols() < 1 || q1.rows() <= q1.cols()) {
        throw DomainError("Q1 must be tall with at least one column");
    }
    const Matrix gram = q1.transpose() * q1;
    const double err = (gram - Matrix::Identity(q1.cols(), q1.cols())).cwiseAbs().maxCoeff();
    if (!(err <= 1e-8)) {
        throw DomainError("Q1 does not have orthonormal columns");
    }
    if (k < 1 || 2 * static_cast<Eigen::Index>(k) >= q1.rows()) {
        throw DomainError("sufficient conditions need 1 <= k < m/2");
    }
}

double induced_norm(const Matrix& b, int q) {
    if (q == 2) {
        Eigen::JacobiSVD<Matrix> svd(b);
        return svd.singularValues()(0);
    }
    const double col_sum = b.cwiseAbs().colwise().sum().maxCoeff();
    const double row_sum = b.cwiseAbs().rowwise().sum().maxCoeff();
    const double inv_q = 1.0 / static_cast<double>(q);
    return std::pow(col_sum, inv_q) * std::pow(row_sum, 1.0 - inv_q);
}

}  // namespace

std::string_view to_string(NspMethod method) {
    switch (method) {
        case NspMethod::ExactDim1: return "exact-dim1";
        case NspMethod::ExactVertex: return "exact-vertex";
        case NspMethod::ExactQ2Eig: return "exact-q2-eig";
        case NspMethod::SufficientThm: return "sufficient-thm";
        case NspMethod::SufficientCorollary: return "sufficient-corollary";
        case NspMethod::SampledFalsifier: return "sampled-falsifier";
    }
    return "unknown";
}

NspRatio nsp_ratio(const Vector& v, int k, double q) {
    const auto m = static_cast<int>(v.size());
    IndexSet order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return std::abs(v(a)) > std::abs(v(b)); });
    const int t = std::clamp(k, 0, m);
    double on = 0.0;
    double off = 0.0;
    for (int i = 0; i < m; ++i) {
        const double p = std::pow(std::abs(v(order[static_cast<std::size_t>(i)])), q);
        (i < t ? on : off) += p;
    }
    NspRatio out;
    out.support.assign(order.begin(), order.begin() + t);
    std::sort(out.support.begin(), out.support.end());
    if (off == 0.0) {
        out.ratio = on > 0.0 ? kInf : 0.0;
    } else {
        out.ratio = std::pow(on / off, 1.0 / q);
    }
    return out;
}

RipEstimate rip_exact(const Matrix& a, int k) {
    if (k < 0 || k > a.cols()) {
        throw DomainError("rip_exact needs 0 <= k <= cols(A)");
    }
    require_enumerable(binomial(static_cast<int>(a.cols()), k), "rip_exact");
    RipEstimate est;
    est.k = k;
    if (k == 0) {
        return est;
    }
    est.delta = -1.0;
    for_each_combination(static_cast<int>(a.cols()), k, [&](const IndexSet& cols) {
        Eigen::JacobiSVD<Matrix> svd(select_cols(a, cols));
        const Vector& s = svd.singularValues();
        const double smax = s(0);
        const double smin = k > a.rows() ? 0.0 : s(s.size() - 1);
        const double delta = std::max(smax * smax - 1.0, 1.0 - smin * smin);
        if (delta > est.delta) {
            est.delta = delta;
            est.argmax_support = cols;
        }
        return true;
    });
    return est;
}

NspCertificate nsp_check(const Matrix& a, int k, double gamma, int q, const NspOptions& opts) {
    check_nsp_args(k, gamma, q);
    const Matrix basis = nullspace_basis(a);
    const int m = static_cast<int>(a.cols());
    const int d = static_cast<int>(basis.cols());

    NspCertificate cert;
    cert.k = k;
    cert.gamma = gamma;
    cert.q = q;

    if (d == 0) {
        cert.method = q == 2 ? NspMethod::ExactQ2Eig : NspMethod::ExactVertex;
        return finish(cert);
    }
    if (d == 1) {
        cert.method = NspMethod::ExactDim1;
        consider(cert, basis.col(0));
        return finish(cert);
    }
    if (q == 1) {
        if (binomial(m, d - 1) <= kEnumerationLimit) {
            return finish(vertex_enumeration(basis, cert));
        }
        return finish(sampled(basis, cert, opts));
    }
    if (binomial(m, std::min(k, m)) <= kEnumerationLimit) {
        return finish(q2_eigen_check(basis, cert));
    }
    return finish(sampled(basis, cert, opts));
}

NspCertificate nsp_sampled_falsifier(const Matrix& a, int k, double gamma, int q,
                                     const NspOptions& opts) {
    check_nsp_args(k, gamma, q);
    NspCertificate cert;
    cert.k = k;
    cert.gamma = gamma;
    cert.q = q;
    const Matrix basis = nullspace_basis(a);
    if (basis.cols() == 0) {
        cert.method = NspMethod::SampledFalsifier;
        return finish(cert);
    }
    return finish(sampled(basis, cert, opts));
}

bool nsp_sufficient_thm(const Matrix& q1, int k, int q) {
    if (q < 2) {
        throw DomainError("nsp_sufficient_thm needs q >= 2");
    }
    check_orthonormal(q1, k);
    const int m = static_cast<int>(q1.rows());
    require_enumerable(binomial(m, k), "nsp_sufficient_thm");
    const double threshold = 0.5 * std::pow(static_cast<double>(k), 1.0 / q - 1.0);
    bool ok = true;
    for_each_combination(m, k, [&](const IndexSet& rows) {
        ok = induced_norm(select_rows(q1, rows), q) < threshold;
        return ok;
    });
    return ok;
}

bool nsp_sufficient_corollary(const Matrix& q1, int k) {
    check_orthonormal(q1, k);
    Vector v = q1.cwiseAbs().rowwise().maxCoeff();
    std::sort(v.data(), v.data() + v.size(), std::greater<>());
    const double top = v.head(k).sum();
    return top < 1.0 / (2.0 * std::sqrt(static_cast<double>(q1.cols())));
}

int max_correctable_errors(double gamma, double q, int m) {
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw DomainError("max_correctable_errors needs gamma in (0, 1)");
    }
    if (!(q >= 1.0) || m < 1) {
        throw DomainError("max_correctable_errors needs q >= 1 and m >= 1");
    }
    const double gq = std::pow(gamma, q);
    const double bound = gq * static_cast<double>(m) / (1.0 + gq);
    const double nearest = std::round(bound);
    double k = std::floor(bound);
    if (std::abs(bound - nearest) <= 1e-12 * std::max(1.0, bound)) {
        k = nearest - 1.0;
    }
    return std::max(0, static_cast<int>(k));
}

double min_admissible_gamma(int k, int m, double q) {
    if (k <= 0 || k >= m) {
        throw DomainError("min_admissible_gamma needs 0 < k < m");
    }
    if (!(q >= 1.0)) {
        throw DomainError("min_admissible_gamma needs q >= 1");
    }
    return std::pow(static_cast<double>(k) / static_cast<double>(m - k), 1.0 / q);
}

std::optional<Vector> find_sparse_feasible(const Matrix& q2t, const Vector& y, int max_support) {
    const int m = static_cast<int>(q2t.cols());
    if (y.size() != m) {
        throw ShapeError("measurement length does not match Q2^T");
    }
    const Vector target = q2t * y;
    const double tol = 1e-9 * std::max(1.0, y.norm());
    if (target.norm() <= tol) {
        return Vector::Zero(m);
    }
    std::optional<Vector> found;
    for (int p = 1; p <= std::min(max_support, m) && !found; ++p) {
        for_each_combination(m, p, [&](const IndexSet& support) {
            const Matrix cols = select_cols(q2t, support);
            const Vector coef = cols.colPivHouseholderQr().solve(target);
            if ((cols * coef - target).norm() <= tol) {
                Vector e = Vector::Zero(m);
                for (std::size_t i = 0; i < support.size(); ++i) {
                    e(support[i]) = coef(static_cast<Eigen::Index>(i));
                }
                found = std::move(e);
                return false;
            }
            return true;
        });
    }
    return found;
}

UniquenessReport uniqueness_check(const Matrix& q2t, const Vector& y, int k) {
    const int m = static_cast<int>(q2t.cols());
    if (k < 0 || 2 * k > m) {
        throw DomainError("uniqueness_check needs 0 <= 2k <= cols(Q2^T)");
    }
    std::uint64_t total = binomial(m, 2 * k);
    for (int p = 0; p <= k; ++p) {
        total += binomial(m, p);
    }
    require_enumerable(total, "uniqueness_check");

    UniquenessReport report;
    if (2 * k <= q2t.rows()) {
        Eigen::JacobiSVD<Matrix> whole(q2t);
        const double tol = 1e-10 * std::max(1.0, whole.singularValues()(0));
        report.columns_independent = true;
        for_each_combination(m, 2 * k, [&](const IndexSet& cols) {
            if (cols.empty()) {
                return true;
            }
            Eigen::JacobiSVD<Matrix> svd(select_cols(q2t, cols));
            const Vector& s = svd.singularValues();
            if (s(s.size() - 1) <= tol) {
                report.columns_independent = false;
                return false;
            }
            return true;
        });
    }
    report.sparse_feasible = find_sparse_feasible(q2t, y, k).has_value();
    return report;
}

}  // namespace resest
