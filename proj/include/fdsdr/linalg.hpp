#pragma once

#include "fdsdr/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace fdsdr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Square matrix that is exactly symmetric. Construction replaces the input
/// with (M + M^T) / 2.
class SymMatrix {
public:
    SymMatrix() = default;

    explicit SymMatrix(const Matrix& m) {
        detail::require(m.rows() == m.cols(), ErrorKind::InvalidInput,
                        "SymMatrix needs a square matrix, got " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()));
        data_ = 0.5 * (m + m.transpose());
    }

    static SymMatrix zero(Index dim) { return SymMatrix(Matrix::Zero(dim, dim)); }
    static SymMatrix identity(Index dim) { return SymMatrix(Matrix::Identity(dim, dim)); }

    [[nodiscard]] Index dim() const noexcept { return data_.rows(); }
    [[nodiscard]] const Matrix& matrix() const noexcept { return data_; }
    [[nodiscard]] double operator()(Index i, Index j) const { return data_(i, j); }

private:
    Matrix data_;
};

inline constexpr double kStiefelTolerance = 1e-10;

/// p x d matrix with orthonormal columns.
class StiefelPoint {
public:
    StiefelPoint() = default;

    explicit StiefelPoint(Matrix c) : data_(std::move(c)) {
        detail::require(data_.cols() >= 1 && data_.cols() <= data_.rows(), ErrorKind::InvalidInput,
                        "Stiefel point needs 1 <= d <= p");
        const double dev = orthonormality_error(data_);
        detail::require(dev <= kStiefelTolerance, ErrorKind::InvalidInput,
                        "columns are not orthonormal (max deviation " + std::to_string(dev) + ")");
    }

    [[nodiscard]] Index rows() const noexcept { return data_.rows(); }
    [[nodiscard]] Index cols() const noexcept { return data_.cols(); }
    [[nodiscard]] const Matrix& matrix() const noexcept { return data_; }

    /// max |C^T C - I|
    static double orthonormality_error(const Matrix& c) {
        const Matrix gram = c.transpose() * c;
        return (gram - Matrix::Identity(c.cols(), c.cols())).cwiseAbs().maxCoeff();
    }

private:
    Matrix data_;
};

/// Unbiased (n-1) sample covariance of the rows of x.
inline SymMatrix sample_covariance(const Matrix& x) {
    detail::require(x.rows() >= 2, ErrorKind::InvalidInput,
                    "sample covariance needs at least 2 rows, got " + std::to_string(x.rows()));
    const Matrix centered = x.rowwise() - x.colwise().mean();
    return SymMatrix((centered.transpose() * centered) / static_cast<double>(x.rows() - 1));
}

enum class PsdExponent { Sqrt, InvSqrt };

/// Q f(Lambda) Q^T for f = sqrt or 1/sqrt.
///
/// For Sqrt, eigenvalues below eigen_floor are treated as zero. For InvSqrt they
/// are raised to eigen_floor, and at least one eigenvalue must exceed it.
inline SymMatrix psd_power(const SymMatrix& m, PsdExponent exponent, double eigen_floor) {
    detail::require(m.matrix().allFinite(), ErrorKind::InvalidInput, "psd_power: non-finite entries");
    detail::require(eigen_floor >= 0.0, ErrorKind::InvalidInput, "psd_power: eigen_floor must be >= 0");

    Eigen::SelfAdjointEigenSolver<Matrix> eig(m.matrix());
    detail::require(eig.info() == Eigen::Success, ErrorKind::Singularity, "eigendecomposition failed");

    Vector lambda = eig.eigenvalues();
    if (exponent == PsdExponent::Sqrt) {
        for (Index i = 0; i < lambda.size(); ++i)
            lambda(i) = lambda(i) < eigen_floor ? 0.0 : std::sqrt(std::max(lambda(i), 0.0));
    } else {
        detail::require(lambda.maxCoeff() > eigen_floor, ErrorKind::Singularity,
                        "psd_power: every eigenvalue is at or below the floor");
        for (Index i = 0; i < lambda.size(); ++i)
            lambda(i) = 1.0 / std::sqrt(std::max(lambda(i), eigen_floor));
    }
    const Matrix& q = eig.eigenvectors();
    return SymMatrix(q * lambda.asDiagonal() * q.transpose());
}

/// Default whitening floor: 1e-10 * trace / p.
inline double default_eigen_floor(const SymMatrix& cov) {
    return 1e-10 * cov.matrix().trace() / static_cast<double>(cov.dim());
}

/// Nearest point on St(d, p) in Frobenius norm: U V^T from the thin SVD of g.
inline StiefelPoint stiefel_project(const Matrix& g) {
    detail::require(g.cols() >= 1 && g.cols() <= g.rows(), ErrorKind::InvalidInput,
                    "stiefel_project needs a p x d matrix with d <= p");
    detail::require(g.allFinite(), ErrorKind::InvalidInput, "stiefel_project: non-finite entries");
    Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    detail::require(s(s.size() - 1) > 1e-12, ErrorKind::DegenerateProjection,
                    "matrix is rank deficient (smallest singular value " +
                        std::to_string(s(s.size() - 1)) + ")");
    return StiefelPoint(svd.matrixU() * svd.matrixV().transpose());
}

}  // namespace fdsdr
