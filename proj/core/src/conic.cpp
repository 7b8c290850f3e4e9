#include "resest/conic.hpp"

#include "resest/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace resest {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Layout {
    int lp = 0;
    std::vector<int> offset;
    std::vector<int> dim;
    int total = 0;

    int degree() const { return lp + static_cast<int>(dim.size()); }
    int cones() const { return static_cast<int>(dim.size()); }
};

Layout make_layout(const ConeProgram& p) {
    Layout l;
    l.lp = p.lp_dim;
    int at = p.lp_dim;
    for (int d : p.soc_dims) {
        if (d < 1) {
            throw DomainError("second-order cone dimensions must be positive");
        }
        l.offset.push_back(at);
        l.dim.push_back(d);
        at += d;
    }
    l.total = at;
    return l;
}

// u0^2 - |u1|^2 computed as a product to limit cancellation.
double soc_det(const Eigen::Ref<const Vector>& u) {
    const double tail = u.tail(u.size() - 1).norm();
    return (u(0) - tail) * (u(0) + tail);
}

double soc_min_eig(const Eigen::Ref<const Vector>& u) { return u(0) - u.tail(u.size() - 1).norm(); }

bool strictly_interior(const Layout& l, const Vector& u) {
    if (!(u.head(l.lp).array() > 0.0).all()) {
        return false;
    }
    for (int k = 0; k < l.cones(); ++k) {
        const auto seg = u.segment(l.offset[static_cast<std::size_t>(k)], l.dim[static_cast<std::size_t>(k)]);
        if (!(seg(0) > 0.0) || !(soc_det(seg) > 0.0)) {
            return false;
        }
    }
    return true;
}

Vector identity_element(const Layout& l) {
    Vector e = Vector::Zero(l.total);
    e.head(l.lp).setOnes();
    for (int k = 0; k < l.cones(); ++k) {
        e(l.offset[static_cast<std::size_t>(k)]) = 1.0;
    }
    return e;
}

Vector jordan_product(const Layout& l, const Vector& u, const Vector& v) {
    Vector w(l.total);
    w.head(l.lp) = u.head(l.lp).cwiseProduct(v.head(l.lp));
    for (int k = 0; k < l.cones(); ++k) {
        const int o = l.offset[static_cast<std::size_t>(k)];
        const int d = l.dim[static_cast<std::size_t>(k)];
        w(o) = u.segment(o, d).dot(v.segment(o, d));
        w.segment(o + 1, d - 1) = u(o) * v.segment(o + 1, d - 1) + v(o) * u.segment(o + 1, d - 1);
    }
    return w;
}

// Solves lambda o w = r for w.
Vector jordan_divide(const Layout& l, const Vector& lambda, const Vector& r) {
    Vector w(l.total);
    w.head(l.lp) = r.head(l.lp).cwiseQuotient(lambda.head(l.lp));
    for (int k = 0; k < l.cones(); ++k) {
        const int o = l.offset[static_cast<std::size_t>(k)];
        const int d = l.dim[static_cast<std::size_t>(k)];
        const double l0 = lambda(o);
        const auto l1 = lambda.segment(o + 1, d - 1);
        const auto r1 = r.segment(o + 1, d - 1);
        const double w0 = (l0 * r(o) - l1.dot(r1)) / soc_det(lambda.segment(o, d));
        w(o) = w0;
        w.segment(o + 1, d - 1) = (r1 - w0 * l1) / l0;
    }
    return w;
}

// Largest alpha with u + alpha d in the cone (infinite when unbounded).
double max_step(const Layout& l, const Vector& u, const Vector& d) {
    double alpha = kInf;
    for (int i = 0; i < l.lp; ++i) {
        if (d(i) < 0.0) {
            alpha = std::min(alpha, -u(i) / d(i));
        }
    }
    for (int k = 0; k < l.cones(); ++k) {
        const int o = l.offset[static_cast<std::size_t>(k)];
        const int n = l.dim[static_cast<std::size_t>(k)];
        const auto u1 = u.segment(o + 1, n - 1);
        const auto d1 = d.segment(o + 1, n - 1);
        const double a = d(o) * d(o) - d1.squaredNorm();
        const double b = 2.0 * (u(o) * d(o) - u1.dot(d1));
        const double c = std::max(0.0, soc_det(u.segment(o, n)));
        double root = kInf;
        if (a == 0.0) {
            if (b < 0.0) {
                root = -c / b;
            }
        } else {
            const double disc = b * b - 4.0 * a * c;
            if (disc >= 0.0) {
                const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
                for (double r : {q / a, q != 0.0 ? c / q : kInf}) {
                    if (r > 0.0) {
                        root = std::min(root, r);
                    }
                }
            }
        }
        // A cone of dimension one is a plain half-line.
        if (n == 1 && d(o) < 0.0) {
            root = std::min(root, -u(o) / d(o));
        }
        alpha = std::min(alpha, root);
    }
    return alpha;
}

Vector soc_apply_sq(const SocScaling& w, const Eigen::Ref<const Vector>& v, bool inverse) {
    // W^2 = eta^2 (2 wbar wbar^T - J), W^{-2} = eta^{-2} (2 J wbar (J wbar)^T - J).
    Vector a = w.wbar;
    if (inverse) {
        a.tail(a.size() - 1) *= -1.0;
    }
    Vector out = 2.0 * a.dot(v) * a;
    out(0) -= v(0);
    out.tail(v.size() - 1) += v.tail(v.size() - 1);
    const double scale = inverse ? 1.0 / (w.eta * w.eta) : w.eta * w.eta;
    return scale * out;
}

struct Scaling {
    Vector lp_w;  // sqrt(s / z)
    std::vector<SocScaling> soc;
};

Scaling compute_scaling(const Layout& l, const Vector& s, const Vector& z) {
    Scaling w;
    w.lp_w = s.head(l.lp).cwiseQuotient(z.head(l.lp)).cwiseSqrt();
    w.soc.reserve(static_cast<std::size_t>(l.cones()));
    for (int k = 0; k < l.cones(); ++k) {
        const int o = l.offset[static_cast<std::size_t>(k)];
        const int d = l.dim[static_cast<std::size_t>(k)];
        w.soc.push_back(soc_nt_scaling(s.segment(o, d), z.segment(o, d)));
    }
    return w;
}

enum class Op { W, WInv, W2, W2Inv };

Vector apply(const Layout& l, const Scaling& w, const Vector& v, Op op) {
    Vector out(l.total);
    switch (op) {
        case Op::W: out.head(l.lp) = w.lp_w.cwiseProduct(v.head(l.lp)); break;
        case Op::WInv: out.head(l.lp) = v.head(l.lp).cwiseQuotient(w.lp_w); break;
        case Op::W2: out.head(l.lp) = w.lp_w.cwiseAbs2().cwiseProduct(v.head(l.lp)); break;
        case Op::W2Inv: out.head(l.lp) = v.head(l.lp).cwiseQuotient(w.lp_w.cwiseAbs2()); break;
    }
    for (int k = 0; k < l.cones(); ++k) {
        const int o = l.offset[static_cast<std::size_t>(k)];
        const int d = l.dim[static_cast<std::size_t>(k)];
        const SocScaling& sc = w.soc[static_cast<std::size_t>(k)];
        const Vector seg = v.segment(o, d);
        switch (op) {
            case Op::W: out.segment(o, d) = soc_apply(sc, seg, false); break;
            case Op::WInv: out.segment(o, d) = soc_apply(sc, seg, true); break;
            case Op::W2: out.segment(o, d) = soc_apply_sq(sc, seg, false); break;
            case Op::W2Inv: out.segment(o, d) = soc_apply_sq(sc, seg, true); break;
        }
    }
    return out;
}

/// Reduced normal equations G^T W^{-2} G dx = r.
///
/// Variables that appear only in LP rows, never share a row with another such
/// variable, and touch few rows (epigraph variables, typically) have a diagonal
/// block; they are eliminated before the dense Cholesky factorization. Each
/// SOC block contributes eta^{-2}(2 a a^T - G_k^T J G_k) with a constant
/// G_k^T J G_k, so only a rank-one term changes between iterations.
class NormalSolver {
public:
    NormalSolver(const ConeProgram& p, const Layout& l) : layout_(l) {
        const auto n = static_cast<int>(p.g.cols());
        const Eigen::SparseMatrix<double> gc = p.g;
        sep_of_col_.assign(static_cast<std::size_t>(n), -1);
        u_of_col_.assign(static_cast<std::size_t>(n), -1);

        std::vector<int> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        std::vector<int> nnz(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            nnz[static_cast<std::size_t>(j)] = static_cast<int>(gc.col(j).nonZeros());
        }
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return nnz[static_cast<std::size_t>(a)] < nnz[static_cast<std::size_t>(b)];
        });
        std::vector<char> claimed(static_cast<std::size_t>(l.lp), 0);
        for (int j : order) {
            const int count = nnz[static_cast<std::size_t>(j)];
            if (count == 0 || count > 16) {
                continue;
            }
            bool ok = true;
            for (Eigen::SparseMatrix<double>::InnerIterator it(gc, j); it; ++it) {
                if (it.row() >= l.lp || claimed[static_cast<std::size_t>(it.row())] || it.value() == 0.0) {
                    ok = false;
                    break;
                }
            }
            if (!ok) {
                continue;
            }
            SepVar var;
            for (Eigen::SparseMatrix<double>::InnerIterator it(gc, j); it; ++it) {
                claimed[static_cast<std::size_t>(it.row())] = 1;
                var.rows.push_back(static_cast<int>(it.row()));
                var.coef.push_back(it.value());
            }
            sep_of_col_[static_cast<std::size_t>(j)] = static_cast<int>(seps_.size());
            sep_cols_.push_back(j);
            seps_.push_back(std::move(var));
        }
        for (int j = 0; j < n; ++j) {
            if (sep_of_col_[static_cast<std::size_t>(j)] < 0) {
                u_of_col_[static_cast<std::size_t>(j)] = static_cast<int>(u_cols_.size());
                u_cols_.push_back(j);
            }
        }
        const auto nu = static_cast<Eigen::Index>(u_cols_.size());

        lp_rows_.resize(static_cast<std::size_t>(l.lp));
        row_sep_.assign(static_cast<std::size_t>(l.lp), -1);
        for (int r = 0; r < l.lp; ++r) {
            for (SparseRowMatrix::InnerIterator it(p.g, r); it; ++it) {
                const int col = static_cast<int>(it.col());
                const int u = u_of_col_[static_cast<std::size_t>(col)];
                if (u >= 0) {
                    lp_rows_[static_cast<std::size_t>(r)].push_back({u, it.value()});
                } else {
                    row_sep_[static_cast<std::size_t>(r)] = sep_of_col_[static_cast<std::size_t>(col)];
                }
            }
        }
        for (int k = 0; k < l.cones(); ++k) {
            const int o = l.offset[static_cast<std::size_t>(k)];
            const int d = l.dim[static_cast<std::size_t>(k)];
            Matrix block = Matrix::Zero(d, nu);
            for (int r = 0; r < d; ++r) {
                for (SparseRowMatrix::InnerIterator it(p.g, o + r); it; ++it) {
                    const int u = u_of_col_[static_cast<std::size_t>(it.col())];
                    if (u < 0) {
                        throw NumericalError("internal: cone row touches an eliminated variable");
                    }
                    block(r, u) = it.value();
                }
            }
            Matrix jblock = block;
            jblock.row(0) *= -1.0;
            soc_jgj_.push_back(block.transpose() * jblock * -1.0);  // G^T J G
            soc_blocks_.push_back(std::move(block));
        }
        reduced_.resize(nu, nu);
        coupling_.resize(static_cast<Eigen::Index>(seps_.size()), nu);
        diag_.resize(static_cast<Eigen::Index>(seps_.size()));
        scratch_ = Vector::Zero(nu);
    }

    void factor(const Scaling& w) {
        const Layout& l = layout_;
        const auto nu = reduced_.rows();
        reduced_.setZero();
        coupling_.setZero();
        diag_.setZero();
        Vector d(l.lp);
        for (int r = 0; r < l.lp; ++r) {
            d(r) = 1.0 / (w.lp_w(r) * w.lp_w(r));
        }
        for (int r = 0; r < l.lp; ++r) {
            if (row_sep_[static_cast<std::size_t>(r)] >= 0) {
                continue;
            }
            const auto& row = lp_rows_[static_cast<std::size_t>(r)];
            for (const auto& [i, gi] : row) {
                for (const auto& [j, gj] : row) {
                    reduced_(i, j) += d(r) * gi * gj;
                }
            }
        }
        for (std::size_t k = 0; k < seps_.size(); ++k) {
            const SepVar& var = seps_[k];
            double dk = 0.0;
            for (std::size_t a = 0; a < var.rows.size(); ++a) {
                const int r = var.rows[a];
                dk += d(r) * var.coef[a] * var.coef[a];
                for (const auto& [i, gi] : lp_rows_[static_cast<std::size_t>(r)]) {
                    coupling_(static_cast<Eigen::Index>(k), i) += d(r) * var.coef[a] * gi;
                }
            }
            diag_(static_cast<Eigen::Index>(k)) = dk;
            // Schur complement written as a sum of pairwise outer products,
            // which avoids cancellation when one row's weight dominates.
            for (std::size_t a = 0; a < var.rows.size(); ++a) {
                for (std::size_t b = a + 1; b < var.rows.size(); ++b) {
                    const int ra = var.rows[a];
                    const int rb = var.rows[b];
                    touched_.clear();
                    for (const auto& [i, gi] : lp_rows_[static_cast<std::size_t>(ra)]) {
                        if (scratch_(i) == 0.0) touched_.push_back(i);
                        scratch_(i) += var.coef[b] * gi;
                    }
                    for (const auto& [i, gi] : lp_rows_[static_cast<std::size_t>(rb)]) {
                        if (scratch_(i) == 0.0) touched_.push_back(i);
                        scratch_(i) -= var.coef[a] * gi;
                    }
                    std::sort(touched_.begin(), touched_.end());
                    touched_.erase(std::unique(touched_.begin(), touched_.end()), touched_.end());
                    const double weight = d(ra) * d(rb) / dk;
                    for (int i : touched_) {
                        for (int j : touched_) {
                            reduced_(i, j) += weight * scratch_(i) * scratch_(j);
                        }
                    }
                    for (int i : touched_) {
                        scratch_(i) = 0.0;
                    }
                }
            }
        }
        for (int k = 0; k < l.cones(); ++k) {
            const SocScaling& sc = w.soc[static_cast<std::size_t>(k)];
            Vector jw = sc.wbar;
            jw.tail(jw.size() - 1) *= -1.0;
            const Vector a = soc_blocks_[static_cast<std::size_t>(k)].transpose() * jw;
            const double inv_eta2 = 1.0 / (sc.eta * sc.eta);
            reduced_.noalias() += (2.0 * inv_eta2) * a * a.transpose();
            reduced_ -= inv_eta2 * soc_jgj_[static_cast<std::size_t>(k)];
        }

        double scale = 1.0;
        if (nu > 0) {
            scale = std::max(scale, reduced_.diagonal().cwiseAbs().maxCoeff());
        }
        if (diag_.size() > 0) {
            scale = std::max(scale, diag_.maxCoeff());
        }
        double reg = 1e-13 * scale;
        for (int attempt = 0; attempt < 8; ++attempt) {
            Matrix m = reduced_;
            m.diagonal().array() += reg;
            // The Schur terms above used the unregularized diagonal; the small
            // mismatch is absorbed by iterative refinement.
            sep_reg_ = reg;
            llt_.compute(m);
            if (llt_.info() == Eigen::Success) {
                return;
            }
            reg *= 100.0;
        }
        throw NumericalError("interior-point normal equations could not be factorized");
    }

    Vector solve(const Vector& rhs) const {
        const auto nu = static_cast<Eigen::Index>(u_cols_.size());
        Vector ru(nu);
        for (Eigen::Index i = 0; i < nu; ++i) {
            ru(i) = rhs(u_cols_[static_cast<std::size_t>(i)]);
        }
        Vector rs(static_cast<Eigen::Index>(seps_.size()));
        for (std::size_t k = 0; k < seps_.size(); ++k) {
            rs(static_cast<Eigen::Index>(k)) = rhs(sep_cols_[k]);
        }
        const Vector dreg = diag_.array() + sep_reg_;
        if (rs.size() > 0) {
            ru.noalias() -= coupling_.transpose() * rs.cwiseQuotient(dreg);
        }
        const Vector xu = nu > 0 ? Vector(llt_.solve(ru)) : Vector();
        Vector out(rhs.size());
        for (Eigen::Index i = 0; i < nu; ++i) {
            out(u_cols_[static_cast<std::size_t>(i)]) = xu(i);
        }
        if (rs.size() > 0) {
            const Vector xs = (rs - coupling_ * xu).cwiseQuotient(dreg);
            for (std::size_t k = 0; k < seps_.size(); ++k) {
                out(sep_cols_[k]) = xs(static_cast<Eigen::Index>(k));
            }
        }
        return out;
    }

private:
    struct SepVar {
        std::vector<int> rows;
        std::vector<double> coef;
    };

    const Layout& layout_;
    std::vector<int> sep_of_col_;
    std::vector<int> u_of_col_;
    std::vector<int> sep_cols_;
    std::vector<int> u_cols_;
    std::vector<SepVar> seps_;
    std::vector<std::vector<std::pair<int, double>>> lp_rows_;
    std::vector<int> row_sep_;
    std::vector<Matrix> soc_blocks_;
    std::vector<Matrix> soc_jgj_;
    Matrix reduced_;
    Matrix coupling_;
    Vector diag_;
    double sep_reg_ = 0.0;
    Vector scratch_;
    std::vector<int> touched_;
    Eigen::LLT<Matrix> llt_;
};

class KktSolver {
public:
    KktSolver(const ConeProgram& p, const Layout& l, int refinement)
        : p_(p), l_(l), normal_(p, l), refinement_(refinement) {}

    void factor(const Scaling& w) {
        w_ = &w;
        normal_.factor(w);
    }

    // [0 G^T; G -W^2] [ux; uz] = [bx; bz]
    void solve(const Vector& bx, const Vector& bz, Vector& ux, Vector& uz) const {
        solve_once(bx, bz, ux, uz);
        const double scale = 1.0 + std::max(bx.lpNorm<Eigen::Infinity>(), bz.lpNorm<Eigen::Infinity>());
        for (int it = 0; it < refinement_; ++it) {
            const Vector rx = bx - p_.g.transpose() * uz;
            const Vector rz = bz - p_.g * ux + apply(l_, *w_, uz, Op::W2);
            const double err = std::max(rx.lpNorm<Eigen::Infinity>(), rz.lpNorm<Eigen::Infinity>());
            if (err <= 1e-15 * scale) {
                break;
            }
            Vector dx;
            Vector dz;
            solve_once(rx, rz, dx, dz);
            ux += dx;
            uz += dz;
        }
    }

private:
    void solve_once(const Vector& bx, const Vector& bz, Vector& ux, Vector& uz) const {
        const Vector rhs = bx + p_.g.transpose() * apply(l_, *w_, bz, Op::W2Inv);
        ux = normal_.solve(rhs);
        uz = apply(l_, *w_, Vector(p_.g * ux - bz), Op::W2Inv);
    }

    const ConeProgram& p_;
    const Layout& l_;
    NormalSolver normal_;
    int refinement_;
    const Scaling* w_ = nullptr;
};

// Moves v into the interior: adds (1 - min eigenvalue) e when needed.
void shift_interior(const Layout& l, Vector& v) {
    double lowest = kInf;
    for (int i = 0; i < l.lp; ++i) {
        lowest = std::min(lowest, v(i));
    }
    for (int k = 0; k < l.cones(); ++k) {
        lowest = std::min(lowest, soc_min_eig(v.segment(l.offset[static_cast<std::size_t>(k)],
                                                       l.dim[static_cast<std::size_t>(k)])));
    }
    if (lowest < 1.0) {
        v += (1.0 - lowest) * identity_element(l);
    }
}

void validate(const ConeProgram& p, const ConicOptions& opts) {
    const Eigen::Index n = p.c.size();
    if (p.g.cols() != n || p.g.rows() != p.h.size()) {
        throw ShapeError("cone program dimensions are inconsistent");
    }
    if (p.lp_dim < 0) {
        throw DomainError("lp_dim must be nonnegative");
    }
    const long cone_rows = std::accumulate(p.soc_dims.begin(), p.soc_dims.end(), 0L);
    if (p.lp_dim + cone_rows != p.g.rows()) {
        throw ShapeError("cone dimensions do not add up to the rows of G");
    }
    if (n == 0) {
        throw ShapeError("cone program has no variables");
    }
    if (!(opts.tol > 0.0) || opts.max_iter < 1) {
        throw DomainError("solver tolerance and iteration limit must be positive");
    }
    if (!p.c.allFinite() || !p.h.allFinite()) {
        throw DomainError("cone program data contains non-finite entries");
    }
}

}  // namespace

std::string_view to_string(ConicStatus status) {
    switch (status) {
        case ConicStatus::Optimal: return "optimal";
        case ConicStatus::PrimalInfeasible: return "primal-infeasible";
        case ConicStatus::DualInfeasible: return "dual-infeasible";
        case ConicStatus::MaxIter: return "max-iter";
    }
    return "unknown";
}

SocScaling soc_nt_scaling(const Vector& s, const Vector& z) {
    const double sres = soc_det(s);
    const double zres = soc_det(z);
    if (!(sres > 0.0) || !(zres > 0.0) || s(0) <= 0.0 || z(0) <= 0.0) {
        throw NumericalError("Nesterov-Todd scaling needs strictly interior points");
    }
    const Vector sb = s / std::sqrt(sres);
    const Vector zb = z / std::sqrt(zres);
    const double gamma = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
    SocScaling w;
    w.wbar.resize(s.size());
    w.wbar(0) = (sb(0) + zb(0)) / (2.0 * gamma);
    w.wbar.tail(s.size() - 1) = (sb.tail(s.size() - 1) - zb.tail(s.size() - 1)) / (2.0 * gamma);
    w.eta = std::pow(sres / zres, 0.25);
    return w;
}

Vector soc_apply(const SocScaling& w, const Vector& v, bool inverse) {
    const auto d = v.size();
    const double w0 = w.wbar(0);
    const auto w1 = w.wbar.tail(d - 1);
    const auto v1 = v.tail(d - 1);
    const double proj = w1.dot(v1);
    Vector out(d);
    if (!inverse) {
        out(0) = w0 * v(0) + proj;
        out.tail(d - 1) = v1 + (proj / (1.0 + w0) + v(0)) * w1;
        return w.eta * out;
    }
    out(0) = w0 * v(0) - proj;
    out.tail(d - 1) = v1 + (proj / (1.0 + w0) - v(0)) * w1;
    return out / w.eta;
}

ConicResult solve_conic(const ConeProgram& p, const ConicOptions& opts) {
    validate(p, opts);
    const Layout l = make_layout(p);
    const auto n = p.c.size();
    const auto m = p.h.size();
    const double hnorm = std::max(1.0, p.h.norm());
    const double cnorm = std::max(1.0, p.c.norm());
    const Vector e = identity_element(l);
    const double degree = l.degree();

    KktSolver kkt(p, l, opts.refinement_steps);

    // Starting point from two least-squares problems with W = I.
    Scaling w;
    w.lp_w = Vector::Ones(l.lp);
    for (int k = 0; k < l.cones(); ++k) {
        SocScaling sc;
        sc.wbar = Vector::Zero(l.dim[static_cast<std::size_t>(k)]);
        sc.wbar(0) = 1.0;
        w.soc.push_back(sc);
    }
    kkt.factor(w);
    Vector x;
    Vector z;
    Vector s;
    {
        Vector ux;
        Vector uz;
        kkt.solve(Vector::Zero(n), p.h, ux, uz);
        x = ux;
        s = -uz;
        kkt.solve(-p.c, Vector::Zero(m), ux, uz);
        z = uz;
    }
    shift_interior(l, s);
    shift_interior(l, z);
    double tau = 1.0;
    double kappa = 1.0;

    ConicResult res;
    auto finish = [&](ConicStatus status, int iters) {
        res.status = status;
        res.iterations = iters;
        if (status == ConicStatus::PrimalInfeasible) {
            const double scale = -p.h.dot(z);
            res.x = Vector::Zero(n);
            res.s = Vector::Zero(m);
            res.z = z / scale;
        } else if (status == ConicStatus::DualInfeasible) {
            const double scale = -p.c.dot(x);
            res.x = x / scale;
            res.s = s / scale;
            res.z = Vector::Zero(m);
        } else {
            res.x = x / tau;
            res.s = s / tau;
            res.z = z / tau;
        }
        return res;
    };

    int stalls = 0;
    for (int iter = 0;; ++iter) {
        const Vector gx = p.g * x;
        const Vector gtz = p.g.transpose() * z;
        const Vector rx = gtz + p.c * tau;
        const Vector rz = gx + s - p.h * tau;
        const double cx = p.c.dot(x);
        const double hz = p.h.dot(z);
        const double rt = kappa + cx + hz;
        const double sz = s.dot(z);

        res.primal_objective = cx / tau;
        res.dual_objective = -hz / tau;
        res.primal_residual = rz.norm() / tau / hnorm;
        res.dual_residual = rx.norm() / tau / cnorm;
        res.relative_gap = sz / (tau * tau) / std::max(1.0, std::abs(res.primal_objective));
        res.kkt_residual = std::max({res.primal_residual, res.dual_residual, res.relative_gap});

        if (res.kkt_residual <= opts.tol) {
            return finish(ConicStatus::Optimal, iter);
        }
        if (hz < 0.0 && gtz.norm() / (-hz) / cnorm <= opts.tol) {
            return finish(ConicStatus::PrimalInfeasible, iter);
        }
        if (cx < 0.0 && (gx + s).norm() / (-cx) / hnorm <= opts.tol) {
            return finish(ConicStatus::DualInfeasible, iter);
        }
        if (iter >= opts.max_iter || stalls >= 3) {
            return finish(ConicStatus::MaxIter, iter);
        }

        w = compute_scaling(l, s, z);
        const Vector lambda = apply(l, w, z, Op::W);
        const double mu = (sz + tau * kappa) / (degree + 1.0);
        kkt.factor(w);

        Vector x1;
        Vector z1;
        kkt.solve(-p.c, p.h, x1, z1);
        const double denom = p.c.dot(x1) + p.h.dot(z1) - kappa / tau;

        struct Direction {
            Vector dx, dz, ds;
            double dtau = 0.0;
            double dkappa = 0.0;
        };
        auto direction = [&](const Vector& ds_rhs, double dk_rhs, double eta) {
            const Vector q = jordan_divide(l, lambda, ds_rhs);
            Vector x2;
            Vector z2;
            kkt.solve(-eta * rx, Vector(-eta * rz - apply(l, w, q, Op::W)), x2, z2);
            Direction d;
            d.dtau = (-eta * rt - dk_rhs / tau - p.c.dot(x2) - p.h.dot(z2)) / denom;
            d.dx = x2 + d.dtau * x1;
            d.dz = z2 + d.dtau * z1;
            d.ds = apply(l, w, Vector(q - apply(l, w, d.dz, Op::W)), Op::W);
            d.dkappa = (dk_rhs - kappa * d.dtau) / tau;
            return d;
        };
        auto step_limit = [&](const Direction& d) {
            double a = std::min(max_step(l, s, d.ds), max_step(l, z, d.dz));
            if (d.dtau < 0.0) a = std::min(a, -tau / d.dtau);
            if (d.dkappa < 0.0) a = std::min(a, -kappa / d.dkappa);
            return a;
        };

        const Vector lam2 = jordan_product(l, lambda, lambda);
        const Direction aff = direction(-lam2, -tau * kappa, 1.0);
        const double alpha_aff = std::min(1.0, step_limit(aff));
        const double sigma = std::pow(1.0 - alpha_aff, 3);

        const Vector corr = jordan_product(l, apply(l, w, aff.ds, Op::WInv), apply(l, w, aff.dz, Op::W));
        const Direction dir = direction(Vector(-lam2 - corr + sigma * mu * e),
                                        -tau * kappa - aff.dtau * aff.dkappa + sigma * mu, 1.0 - sigma);
        double alpha = std::min(1.0, 0.99 * step_limit(dir));
        if (!(alpha > 0.0) || !std::isfinite(alpha)) {
            return finish(ConicStatus::MaxIter, iter);
        }
        // Rounding can leave a long step on the cone boundary; back off until
        // both iterates are strictly interior.
        Vector s_next = s + alpha * dir.ds;
        Vector z_next = z + alpha * dir.dz;
        for (int tries = 0; tries < 60 && !(strictly_interior(l, s_next) && strictly_interior(l, z_next)); ++tries) {
            alpha *= 0.5;
            s_next = s + alpha * dir.ds;
            z_next = z + alpha * dir.dz;
        }
        if (!(strictly_interior(l, s_next) && strictly_interior(l, z_next))) {
            return finish(ConicStatus::MaxIter, iter);
        }
        stalls = alpha < 1e-8 ? stalls + 1 : 0;

        x += alpha * dir.dx;
        s = std::move(s_next);
        z = std::move(z_next);
        tau += alpha * dir.dtau;
        kappa += alpha * dir.dkappa;
    }
}

}  // namespace resest
