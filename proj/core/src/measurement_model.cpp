#include "resest/measurement_model.hpp"

#include "resest/errors.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace resest {
namespace {

void require_finite(const Matrix& a, const char* what) {
    if (!a.allFinite()) {
        throw DomainError(std::string(what) + " contains non-finite entries");
    }
}

double rank_tolerance(const Matrix& a, double sigma_max) {
    return static_cast<double>(std::max(a.rows(), a.cols())) *
           std::numeric_limits<double>::epsilon() * sigma_max;
}

}  // namespace

QrFactors qr_split(const Matrix& h) {
    const auto m = h.rows();
    const auto n = h.cols();
    if (n == 0 || m <= n) {
        throw ShapeError("qr_split needs m > n >= 1, got " + std::to_string(m) + "x" +
                         std::to_string(n));
    }
    require_finite(h, "H");
    if (numerical_rank(h) < n) {
        throw RankDeficient("H does not have full column rank");
    }

    Eigen::HouseholderQR<Matrix> qr(h);
    const Matrix q = qr.householderQ() * Matrix::Identity(m, m);
    QrFactors f;
    f.r1 = qr.matrixQR().topLeftCorner(n, n).triangularView<Eigen::Upper>();
    f.q1 = q.leftCols(n);
    f.q2 = q.rightCols(m - n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (f.r1(i, i) < 0.0) {
            f.r1.row(i) *= -1.0;
            f.q1.col(i) *= -1.0;
        }
    }
    return f;
}

Matrix residual_projector(const QrFactors& f) { return f.q2.transpose(); }

double smallest_singular_value(const Matrix& a) {
    if (a.size() == 0) {
        throw ShapeError("smallest_singular_value of an empty matrix");
    }
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues().minCoeff();
}

int numerical_rank(const Matrix& a) {
    if (a.size() == 0) {
        return 0;
    }
    Eigen::JacobiSVD<Matrix> svd(a);
    const Vector& s = svd.singularValues();
    const double tol = rank_tolerance(a, s(0));
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > tol) {
            ++rank;
        }
    }
    return rank;
}

Matrix nullspace_basis(const Matrix& a) {
    const auto cols = a.cols();
    if (a.rows() == 0) {
        return Matrix::Identity(cols, cols);
    }
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
    const Vector& s = svd.singularValues();
    const double tol = rank_tolerance(a, s.size() > 0 ? s(0) : 0.0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > tol) {
            ++rank;
        }
    }
    return svd.matrixV().rightCols(cols - rank);
}

MeasurementModel::MeasurementModel(Matrix h, Vector noise_std)
    : h_(std::move(h)), noise_std_(std::move(noise_std)) {
    if (noise_std_.size() != h_.rows()) {
        throw ShapeError("noise_std has " + std::to_string(noise_std_.size()) +
                         " entries, H has " + std::to_string(h_.rows()) + " rows");
    }
    if (!noise_std_.allFinite() || (noise_std_.array() <= 0.0).any()) {
        throw DomainError("noise standard deviations must be finite and positive");
    }
    qr_ = qr_split(h_);
}

Vector MeasurementModel::state_from(const Vector& v) const {
    return qr_.r1.triangularView<Eigen::Upper>().solve(qr_.q1.transpose() * v);
}

}  // namespace resest
