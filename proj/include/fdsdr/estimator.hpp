#pragma once

#include "fdsdr/dcov.hpp"
#include "fdsdr/error.hpp"
#include "fdsdr/kernels.hpp"
#include "fdsdr/linalg.hpp"
#include "fdsdr/metric_spaces.hpp"
#include "fdsdr/optimizer.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace fdsdr {

struct Dataset {
    Matrix x;  // n x p
    ResponseSample responses;

    void validate() const {
        detail::require(x.rows() == static_cast<Index>(responses.size()), ErrorKind::InvalidInput,
                        "predictor rows (" + std::to_string(x.rows()) + ") != responses (" +
                            std::to_string(responses.size()) + ")");
        detail::require(x.allFinite(), ErrorKind::InvalidInput, "predictors contain non-finite values");
    }
};

struct SubspaceEstimate {
    Matrix beta_hat;  // p x d, beta^T Sigma beta = I_d
    StiefelPoint c_hat;
    SymMatrix sigma_inv_sqrt;
    FitTrace trace;
    KernelSpec kernel_used;
};

struct Whitened {
    Matrix z;
    SymMatrix sigma_inv_sqrt;
};

/// Centers the rows of x and maps them through Sigma^{-1/2}. A negative
/// eigen_floor selects the default 1e-10 * trace(Sigma) / p.
inline Whitened whiten(const Matrix& x, double eigen_floor = -1.0) {
    const SymMatrix cov = sample_covariance(x);
    const double floor = eigen_floor < 0.0 ? default_eigen_floor(cov) : eigen_floor;
    SymMatrix inv_sqrt = psd_power(cov, PsdExponent::InvSqrt, floor);
    Matrix z = (x.rowwise() - x.colwise().mean()) * inv_sqrt.matrix();
    return {std::move(z), std::move(inv_sqrt)};
}

struct FitOptions {
    SphereMetric sphere_metric = SphereMetric::Geodesic;
    double eigen_floor = -1.0;  // < 0: default
    IterateObserver observer;
};

/// Resolves the kernel for a sample: data-driven bandwidth unless overridden.
inline KernelSpec resolve_kernel(const SymMatrix& distances, const KernelRequest& request) {
    KernelSpec spec{request.family, 1.0, request.rho_y};
    if (request.family != KernelFamily::Linear)
        spec.gamma = request.gamma_override ? *request.gamma_override
                                            : select_bandwidth(distances, request.family, request.rho_y);
    spec.validate();
    return spec;
}

/// Doubly centered feature-space distances of the responses under the kernel.
inline CenteredMatrix centered_feature_distances(const ResponseSample& responses, const KernelRequest& request,
                                                 SphereMetric sphere_metric, KernelSpec* kernel_used = nullptr) {
    SymMatrix kernel;
    KernelSpec spec;
    if (request.family == KernelFamily::Linear) {
        kernel = linear_kernel_matrix(responses);
        spec = KernelSpec{KernelFamily::Linear, 1.0, request.rho_y};
    } else {
        const SymMatrix dist = pairwise_distances(responses, sphere_metric);
        spec = resolve_kernel(dist, request);
        kernel = kernel_matrix(dist, spec);
    }
    if (kernel_used) *kernel_used = spec;
    return double_center(feature_distances(kernel).matrix());
}

namespace detail {

inline SubspaceEstimate fit_centered(const Matrix& x, const CenteredMatrix& b_tilde, Index d,
                                     const OptimizerConfig& opt, std::uint64_t seed, const FitOptions& options) {
    const Index p = x.cols();
    require(d >= 1 && d <= p, ErrorKind::InvalidInput,
            "target dimension d=" + std::to_string(d) + " must satisfy 1 <= d <= p=" + std::to_string(p));
    Whitened w = whiten(x, options.eigen_floor);
    DirectionFit dir = fit_direction(w.z, b_tilde, d, opt, seed, options.observer);
    SubspaceEstimate est;
    est.beta_hat = w.sigma_inv_sqrt.matrix() * dir.c.matrix();
    est.c_hat = std::move(dir.c);
    est.sigma_inv_sqrt = std::move(w.sigma_inv_sqrt);
    est.trace = std::move(dir.trace);
    return est;
}

}  // namespace detail

/// Full Fd-SDR pipeline: response distances, kernel, centered feature
/// distances, whitening, Stiefel ascent, de-whitening.
inline SubspaceEstimate fit(const Dataset& data, const KernelRequest& kernel, Index d, const OptimizerConfig& opt,
                            std::uint64_t seed, const FitOptions& options = {}) {
    data.validate();
    detail::require(d >= 1 && d <= data.x.cols(), ErrorKind::InvalidInput,
                    "target dimension d=" + std::to_string(d) + " must satisfy 1 <= d <= p=" +
                        std::to_string(data.x.cols()));
    KernelSpec used;
    const CenteredMatrix b_tilde = centered_feature_distances(data.responses, kernel, options.sphere_metric, &used);
    SubspaceEstimate est = detail::fit_centered(data.x, b_tilde, d, opt, seed, options);
    est.kernel_used = used;
    return est;
}

/// Classical dCov-based SDR: the same optimizer fed raw response distances.
inline SubspaceEstimate fit_with_response_distances(const Matrix& x, const SymMatrix& response_distances, Index d,
                                                    const OptimizerConfig& opt, std::uint64_t seed,
                                                    const FitOptions& options = {}) {
    detail::require(response_distances.dim() == x.rows(), ErrorKind::InvalidInput,
                    "response distance matrix must be n x n");
    SubspaceEstimate est =
        detail::fit_centered(x, double_center(response_distances.matrix()), d, opt, seed, options);
    est.kernel_used = KernelSpec{KernelFamily::Linear, 1.0, kDefaultRhoY};
    return est;
}

namespace detail {

inline Matrix orthonormal_basis(const Matrix& b) {
    require(b.cols() >= 1 && b.cols() <= b.rows(), ErrorKind::InvalidInput, "basis must be p x d with 1 <= d <= p");
    require(b.allFinite(), ErrorKind::InvalidInput, "basis has non-finite entries");
    Eigen::HouseholderQR<Matrix> qr(b);
    const Matrix r = qr.matrixQR().topRows(b.cols()).triangularView<Eigen::Upper>();
    const double scale = b.cwiseAbs().maxCoeff();
    for (Index i = 0; i < b.cols(); ++i)
        require(std::abs(r(i, i)) > 1e-12 * std::max(scale, 1e-300), ErrorKind::InvalidInput,
                "basis is rank deficient");
    return qr.householderQ() * Matrix::Identity(b.rows(), b.cols());
}

}  // namespace detail

/// ||P_B - P_Bhat||_F with projectors built from thin QR factors.
inline double subspace_error(const Matrix& b, const Matrix& b_hat) {
    detail::require(b.rows() == b_hat.rows(), ErrorKind::InvalidInput, "bases live in different ambient dimensions");
    const Matrix q1 = detail::orthonormal_basis(b);
    const Matrix q2 = detail::orthonormal_basis(b_hat);
    return (q1 * q1.transpose() - q2 * q2.transpose()).norm();
}

}  // namespace fdsdr
