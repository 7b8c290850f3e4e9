#pragma once

#include "resest/conic.hpp"
#include "resest/gpr.hpp"
#include "resest/types.hpp"

#include <optional>
#include <string_view>

namespace resest {

/// minimize sum_j w_j |y_j - (Hx + eps)_j| over (x, eps), optionally subject to
/// Hx + eps in the prior ellipsoid and eps in the noise ellipsoid.
///
/// An absent noise constraint fixes eps = 0. A constraint with infinite
/// radius is dropped.
struct WeightedL1Problem {
    Matrix h;
    Vector y;
    Vector weights;  // empty means all ones
    std::optional<EllipsoidConstraint> prior;
    std::optional<EllipsoidConstraint> noise;
};

enum class SolveStatus { Optimal, Infeasible, MaxIter };

std::string_view to_string(SolveStatus status);

struct Solution {
    Vector x;
    Vector eps;
    double objective = 0.0;  // weighted l1 norm of y - Hx - eps
    SolveStatus status = SolveStatus::MaxIter;
    double kkt_residual = 0.0;
    int iterations = 0;
};

Solution solve_weighted_l1(const WeightedL1Problem& problem, const ConicOptions& opts = {});

/// The cone program solve_weighted_l1 hands to the interior-point method.
/// Variables are ordered (x, eps, t) with eps omitted when eliminated.
ConeProgram weighted_l1_program(const WeightedL1Problem& problem);

/// argmin |e|_1 subject to Q2^T (y - e) = 0.
Vector solve_l1_equality(const Matrix& q2t, const Vector& y, const ConicOptions& opts = {});

/// argmin |y - Hx|_2 via Householder QR. Throws RankDeficient.
Vector least_squares(const Matrix& h, const Vector& y);

}  // namespace resest
