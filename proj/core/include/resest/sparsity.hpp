#pragma once

#include "resest/types.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace resest {

/// How an NSP verdict was reached, i.e. how much it can be trusted.
enum class NspMethod {
    ExactDim1,            // one-dimensional nullspace, checked directly
    ExactVertex,          // q = 1: all vertices of the unit l1 ball in N(A)
    ExactQ2Eig,           // q = 2: generalized eigenvalue per support
    SufficientThm,        // induced-norm sufficient condition held
    SufficientCorollary,  // row infinity-norm sufficient condition held
    SampledFalsifier,     // random search found no violation ("not falsified")
};

std::string_view to_string(NspMethod method);

/// Outcome of a nullspace-property test A in NSP_q(k, gamma).
struct NspCertificate {
    int k = 0;
    double gamma = 0.0;
    int q = 1;
    bool holds = false;
    NspMethod method = NspMethod::SampledFalsifier;
    /// Largest ||v_T||_q / ||v_Tc||_q seen (exact methods: the supremum).
    double worst_ratio = 0.0;
    /// Violating nullspace element and its offending support when holds == false.
    std::optional<Vector> witness;
    IndexSet witness_support;

    bool is_exact() const noexcept {
        return method == NspMethod::ExactDim1 || method == NspMethod::ExactVertex ||
               method == NspMethod::ExactQ2Eig;
    }
};

struct RipEstimate {
    int k = 0;
    double delta = 0.0;
    IndexSet argmax_support;
};

/// Relative slack applied on the strict side of every NSP inequality.
inline constexpr double kStrictTolerance = 1e-12;

struct NspRatio {
    double ratio = 0.0;
    IndexSet support;
};

/// max over |T| <= k of ||v_T||_q / ||v_Tc||_q (infinite when v_Tc vanishes).
NspRatio nsp_ratio(const Vector& v, int k, double q);

/// Exact restricted isometry constant delta_k by enumerating column subsets.
RipEstimate rip_exact(const Matrix& a, int k);

struct NspOptions {
    std::uint64_t seed = 0x5eed;
    int samples = 10000;
};

/// Decides A in NSP_q(k, gamma) for q in {1, 2}; see NspMethod for the route taken.
NspCertificate nsp_check(const Matrix& a, int k, double gamma, int q, const NspOptions& opts = {});

/// Random-direction search for an NSP_q(k, gamma) violation in N(A).
NspCertificate nsp_sampled_falsifier(const Matrix& a, int k, double gamma, int q,
                                     const NspOptions& opts = {});

/// Sufficient condition for Q2^T in NSP_1(k, 1): every k-row block of Q1 has
/// induced q-norm below k^{1/q - 1} / 2. q = 2 uses the exact spectral norm;
/// other q use the Riesz-Thorin upper bound ||B||_1^{1/q} ||B||_inf^{1-1/q}.
bool nsp_sufficient_thm(const Matrix& q1, int k, int q);

/// Sufficient condition for Q2^T in NSP_1(k, 1) from the row infinity norms of Q1.
bool nsp_sufficient_corollary(const Matrix& q1, int k);

/// Largest integer k strictly below gamma^q m / (1 + gamma^q).
int max_correctable_errors(double gamma, double q, int m);

/// (k / (m - k))^{1/q}; a value >= 1 means no gamma in (0, 1) is admissible.
double min_admissible_gamma(int k, int m, double q);

struct UniquenessReport {
    bool columns_independent = false;  // every 2k columns of Q2^T independent
    bool sparse_feasible = false;      // some e with |supp e| <= k and Q2^T (y - e) = 0
    bool unique() const noexcept { return columns_independent && sparse_feasible; }
    explicit operator bool() const noexcept { return unique(); }
};

UniquenessReport uniqueness_check(const Matrix& q2t, const Vector& y, int k);

/// Smallest-support e (size <= max_support) with Q2^T (y - e) = 0, scanning
/// supports by size then lexicographically. Residual tolerance is 1e-9 max(1, |y|).
std::optional<Vector> find_sparse_feasible(const Matrix& q2t, const Vector& y, int max_support);

}  // namespace resest
