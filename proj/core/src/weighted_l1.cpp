#include "resest/weighted_l1.hpp"

#include "resest/errors.hpp"
#include "resest/measurement_model.hpp"

#include <cmath>
#include <string>

namespace resest {
namespace {

bool active(const std::optional<EllipsoidConstraint>& c) {
    return c.has_value() && std::isfinite(c->radius_sq);
}

void check_ellipsoid(const EllipsoidConstraint& c, Eigen::Index m, const char* name) {
    if (c.center.size() != m || c.inv_weights.size() != m) {
        throw ShapeError(std::string(name) + " ellipsoid size does not match the measurements");
    }
    if (!(c.radius_sq >= 0.0)) {
        throw DomainError(std::string(name) + " ellipsoid radius must be nonnegative");
    }
    if (!(c.inv_weights.array() > 0.0).all() || !c.inv_weights.allFinite() || !c.center.allFinite()) {
        throw DomainError(std::string(name) + " ellipsoid weights must be positive and finite");
    }
}

Vector weights_of(const WeightedL1Problem& p) {
    return p.weights.size() == 0 ? Vector(Vector::Ones(p.y.size())) : p.weights;
}

void validate(const WeightedL1Problem& p) {
    const auto m = p.h.rows();
    if (m == 0 || p.h.cols() == 0) {
        throw ShapeError("weighted l1 problem needs a nonempty H");
    }
    if (p.y.size() != m) {
        throw ShapeError("y has " + std::to_string(p.y.size()) + " entries, H has " + std::to_string(m) +
                         " rows");
    }
    if (p.weights.size() != 0 && p.weights.size() != m) {
        throw ShapeError("weights must have one entry per measurement");
    }
    if (p.weights.size() != 0 && (!(p.weights.array() > 0.0).all() || !p.weights.allFinite())) {
        throw DomainError("weights must be positive and finite");
    }
    if (!p.h.allFinite() || !p.y.allFinite()) {
        throw DomainError("weighted l1 data contains non-finite entries");
    }
    if (p.prior) check_ellipsoid(*p.prior, m, "prior");
    if (p.noise) check_ellipsoid(*p.noise, m, "noise");
}

}  // namespace

std::string_view to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::MaxIter: return "max-iter";
    }
    return "unknown";
}

ConeProgram weighted_l1_program(const WeightedL1Problem& p) {
    validate(p);
    const auto m = static_cast<int>(p.h.rows());
    const auto n = static_cast<int>(p.h.cols());
    const bool with_eps = active(p.noise);
    const bool with_prior = active(p.prior);
    const int eps0 = n;
    const int t0 = with_eps ? n + m : n;
    const int vars = t0 + m;

    ConeProgram prog;
    prog.c = Vector::Zero(vars);
    prog.c.tail(m) = weights_of(p);
    prog.lp_dim = 2 * m;
    int rows = 2 * m;
    if (with_prior) {
        prog.soc_dims.push_back(m + 1);
        rows += m + 1;
    }
    if (with_eps) {
        prog.soc_dims.push_back(m + 1);
        rows += m + 1;
    }
    prog.h = Vector::Zero(rows);

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(2 * m * (n + 2) + (with_prior ? m * (n + 1) : 0) + m));
    auto add_measurement_row = [&](int row, int j, double scale) {
        for (int i = 0; i < n; ++i) {
            if (p.h(j, i) != 0.0) {
                trip.emplace_back(row, i, scale * p.h(j, i));
            }
        }
        if (with_eps) {
            trip.emplace_back(row, eps0 + j, scale);
        }
    };
    // |y - Hx - eps| <= t, as two rows per measurement.
    for (int j = 0; j < m; ++j) {
        add_measurement_row(j, j, -1.0);
        trip.emplace_back(j, t0 + j, -1.0);
        prog.h(j) = -p.y(j);
        add_measurement_row(m + j, j, 1.0);
        trip.emplace_back(m + j, t0 + j, -1.0);
        prog.h(m + j) = p.y(j);
    }
    int at = 2 * m;
    if (with_prior) {
        const EllipsoidConstraint& c = *p.prior;
        prog.h(at) = std::sqrt(c.radius_sq);
        for (int j = 0; j < m; ++j) {
            const double r = std::sqrt(c.inv_weights(j));
            for (int i = 0; i < n; ++i) {
                if (p.h(j, i) != 0.0) {
                    trip.emplace_back(at + 1 + j, i, r * p.h(j, i));
                }
            }
            if (with_eps) {
                trip.emplace_back(at + 1 + j, eps0 + j, r);
            }
            prog.h(at + 1 + j) = r * c.center(j);
        }
        at += m + 1;
    }
    if (with_eps) {
        const EllipsoidConstraint& c = *p.noise;
        prog.h(at) = std::sqrt(c.radius_sq);
        for (int j = 0; j < m; ++j) {
            const double r = std::sqrt(c.inv_weights(j));
            trip.emplace_back(at + 1 + j, eps0 + j, r);
            prog.h(at + 1 + j) = r * c.center(j);
        }
    }
    prog.g.resize(rows, vars);
    prog.g.setFromTriplets(trip.begin(), trip.end());
    return prog;
}

Solution solve_weighted_l1(const WeightedL1Problem& p, const ConicOptions& opts) {
    const ConeProgram prog = weighted_l1_program(p);
    const ConicResult r = solve_conic(prog, opts);
    const auto m = p.h.rows();
    const auto n = p.h.cols();
    const bool with_eps = active(p.noise);

    Solution sol;
    sol.iterations = r.iterations;
    sol.kkt_residual = r.kkt_residual;
    switch (r.status) {
        case ConicStatus::Optimal: sol.status = SolveStatus::Optimal; break;
        case ConicStatus::PrimalInfeasible: sol.status = SolveStatus::Infeasible; break;
        // The objective is bounded below by zero, so a dual infeasibility
        // certificate can only come from numerical trouble.
        case ConicStatus::DualInfeasible:
        case ConicStatus::MaxIter: sol.status = SolveStatus::MaxIter; break;
    }
    if (sol.status == SolveStatus::Infeasible) {
        sol.x = Vector::Zero(n);
        sol.eps = Vector::Zero(m);
        sol.objective = std::numeric_limits<double>::infinity();
        return sol;
    }
    sol.x = r.x.head(n);
    sol.eps = with_eps ? Vector(r.x.segment(n, m)) : Vector(Vector::Zero(m));
    sol.objective = weights_of(p).dot((p.y - p.h * sol.x - sol.eps).cwiseAbs());
    return sol;
}

Vector solve_l1_equality(const Matrix& q2t, const Vector& y, const ConicOptions& opts) {
    if (y.size() != q2t.cols()) {
        throw ShapeError("y length does not match Q2^T");
    }
    // Feasible e are y - B c with B spanning N(Q2^T).
    const Matrix basis = nullspace_basis(q2t);
    if (basis.cols() == 0) {
        return y;
    }
    WeightedL1Problem p;
    p.h = basis;
    p.y = y;
    const Solution sol = solve_weighted_l1(p, opts);
    if (sol.status != SolveStatus::Optimal) {
        throw NumericalError("l1 equality solve ended with status " + std::string(to_string(sol.status)));
    }
    return y - basis * sol.x;
}

Vector least_squares(const Matrix& h, const Vector& y) {
    if (h.rows() != y.size()) {
        throw ShapeError("y length does not match H");
    }
    if (h.cols() == 0 || h.rows() < h.cols()) {
        throw ShapeError("least squares needs a tall, nonempty H");
    }
    if (numerical_rank(h) < h.cols()) {
        throw RankDeficient("H does not have full column rank");
    }
    return h.householderQr().solve(y);
}

}  // namespace resest
