#pragma once

#include "resest/types.hpp"

#include <Eigen/SparseCore>

#include <string_view>
#include <vector>

namespace resest {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// minimize c^T x  subject to  G x + s = h,  s in K.
///
/// K is a product of a nonnegative orthant (the first lp_dim rows of G) and
/// second-order cones {(s0, s1) : s0 >= |s1|}, laid out after it in order.
struct ConeProgram {
    Vector c;
    SparseRowMatrix g;
    Vector h;
    int lp_dim = 0;
    std::vector<int> soc_dims;
};

struct ConicOptions {
    double tol = 1e-8;
    int max_iter = 200;
    int refinement_steps = 3;
};

enum class ConicStatus { Optimal, PrimalInfeasible, DualInfeasible, MaxIter };

std::string_view to_string(ConicStatus status);

struct ConicResult {
    ConicStatus status = ConicStatus::MaxIter;
    Vector x;
    Vector s;
    Vector z;
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    double primal_residual = 0.0;  // |Gx + s - h| / max(1, |h|)
    double dual_residual = 0.0;    // |G^T z + c| / max(1, |c|)
    double relative_gap = 0.0;     // s^T z / max(1, |c^T x|)
    double kkt_residual = 0.0;     // max of the three above
    int iterations = 0;
};

/// Homogeneous self-dual primal-dual interior-point method with Nesterov-Todd
/// scaling and Mehrotra correction. Infeasibility is reported only with a
/// certificate; anything unresolved within max_iter is MaxIter.
ConicResult solve_conic(const ConeProgram& program, const ConicOptions& opts = {});

/// Nesterov-Todd scaling of one second-order cone: W = eta * Wbar(wbar).
struct SocScaling {
    double eta = 1.0;
    Vector wbar;
};

/// Scaling with W z = W^{-1} s for s, z strictly inside the cone.
SocScaling soc_nt_scaling(const Vector& s, const Vector& z);

/// W v, or W^{-1} v when `inverse` is set.
Vector soc_apply(const SocScaling& w, const Vector& v, bool inverse);

}  // namespace resest
