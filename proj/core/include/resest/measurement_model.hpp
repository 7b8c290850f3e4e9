#pragma once

#include "resest/types.hpp"

namespace resest {

/// Orthogonal split of a tall full-rank matrix H = Q1 R1 with Q2 spanning
/// the left nullspace of H. Diagonal of R1 is nonnegative.
struct QrFactors {
    Matrix q1;  // m x n
    Matrix q2;  // m x (m - n)
    Matrix r1;  // n x n, upper triangular
};

/// Householder QR of H. Throws ShapeError when m <= n and RankDeficient
/// when H does not have full column rank.
QrFactors qr_split(const Matrix& h);

/// Q2^T, the (m-n) x m map that annihilates range(H).
Matrix residual_projector(const QrFactors& f);

double smallest_singular_value(const Matrix& a);

/// Orthonormal basis of N(A), computed from a full SVD.
Matrix nullspace_basis(const Matrix& a);

/// Numerical rank with the usual max(rows, cols) * eps * sigma_max cutoff.
int numerical_rank(const Matrix& a);

/// Linear measurement model y = Hx + e + eps with independent noise.
class MeasurementModel {
public:
    MeasurementModel(Matrix h, Vector noise_std);

    const Matrix& h() const noexcept { return h_; }
    const Vector& noise_std() const noexcept { return noise_std_; }
    const QrFactors& qr() const noexcept { return qr_; }

    int measurements() const noexcept { return static_cast<int>(h_.rows()); }
    int states() const noexcept { return static_cast<int>(h_.cols()); }

    /// R1^{-1} Q1^T v, the state explaining the range component of v.
    Vector state_from(const Vector& v) const;

private:
    Matrix h_;
    Vector noise_std_;
    QrFactors qr_;
};

}  // namespace resest
