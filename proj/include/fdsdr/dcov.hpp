#pragma once

#include "fdsdr/error.hpp"
#include "fdsdr/linalg.hpp"

#include <cmath>
#include <string>

namespace fdsdr {

/// Doubly centered matrix: rows and columns sum to zero (up to rounding).
class CenteredMatrix {
public:
    CenteredMatrix() = default;
    [[nodiscard]] const Matrix& matrix() const noexcept { return data_; }
    [[nodiscard]] Index size() const noexcept { return data_.rows(); }
    [[nodiscard]] double operator()(Index k, Index l) const { return data_(k, l); }

private:
    explicit CenteredMatrix(Matrix m) : data_(std::move(m)) {}
    friend CenteredMatrix double_center(const Matrix& d);

    Matrix data_;
};

/// Empirical squared distance covariance. Nonnegative up to rounding when both
/// distance matrices are of negative type.
struct DcovValue {
    double value = 0.0;
};

/// A_kl = a_kl - mean_row(k) - mean_col(l) + grand_mean.
inline CenteredMatrix double_center(const Matrix& d) {
    detail::require(d.rows() == d.cols(), ErrorKind::InvalidInput, "double_center needs a square matrix");
    detail::require(d.rows() >= 2, ErrorKind::InvalidInput, "double_center needs n >= 2");
    const Vector row_mean = d.rowwise().mean();
    const Eigen::RowVectorXd col_mean = d.colwise().mean();
    const double grand = d.mean();
    Matrix out = d;
    out.colwise() -= row_mean;
    out.rowwise() -= col_mean;
    out.array() += grand;
    return CenteredMatrix(std::move(out));
}

/// Pairwise Euclidean distances between rows of x raised to alpha.
inline Matrix row_distance_matrix(const Matrix& x, double alpha = 1.0) {
    const Index n = x.rows();
    Matrix a = Matrix::Zero(n, n);
    for (Index k = 0; k < n; ++k) {
        for (Index l = k + 1; l < n; ++l) {
            const double v = std::pow((x.row(k) - x.row(l)).norm(), alpha);
            a(k, l) = v;
            a(l, k) = v;
        }
    }
    return a;
}

/// (1/n^2) sum_{k,l} A_kl B_kl with A from ||X_k - X_l||^alpha and B from b.
inline DcovValue empirical_dcov(const Matrix& x, const Matrix& b, double alpha = 1.0) {
    detail::require(alpha > 0.0 && alpha < 2.0, ErrorKind::InvalidInput,
                    "alpha must lie in (0,2), got " + std::to_string(alpha));
    const Index n = x.rows();
    detail::require(n >= 2, ErrorKind::InvalidInput, "empirical_dcov needs n >= 2");
    detail::require(b.rows() == n && b.cols() == n, ErrorKind::InvalidInput,
                    "response distance matrix must be n x n");
    const CenteredMatrix a_c = double_center(row_distance_matrix(x, alpha));
    const CenteredMatrix b_c = double_center(b);
    return {a_c.matrix().cwiseProduct(b_c.matrix()).sum() / static_cast<double>(n * n)};
}

namespace detail {

/// F from the projected rows W = Z C. Upper-triangle sum, doubled.
inline double objective_from_projection(const Matrix& w, const Matrix& b_tilde) {
    const Matrix wt = w.transpose();  // columns contiguous
    const Index n = wt.cols();
    double sum = 0.0;
    for (Index k = 0; k < n; ++k) {
        double row_sum = 0.0;
        for (Index l = k + 1; l < n; ++l) row_sum += (wt.col(k) - wt.col(l)).norm() * b_tilde(k, l);
        sum += row_sum;
    }
    return 2.0 * sum / static_cast<double>(n * n);
}

}  // namespace detail

/// F(C) = (1/n^2) sum_{k,l} ||C^T (Z_k - Z_l)|| Btilde_kl.
inline double objective_F(const Matrix& c, const Matrix& z, const CenteredMatrix& b_tilde) {
    detail::require(c.rows() == z.cols(), ErrorKind::InvalidInput, "objective_F: C rows must equal Z columns");
    detail::require(b_tilde.size() == z.rows(), ErrorKind::InvalidInput, "objective_F: Btilde must be n x n");
    return detail::objective_from_projection(z * c, b_tilde.matrix());
}

inline double objective_F(const StiefelPoint& c, const Matrix& z, const CenteredMatrix& b_tilde) {
    return objective_F(c.matrix(), z, b_tilde);
}

}  // namespace fdsdr
