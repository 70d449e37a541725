#pragma once

#include "fdsdr/error.hpp"
#include "fdsdr/linalg.hpp"
#include "fdsdr/metric_spaces.hpp"

#include <cmath>
#include <optional>
#include <string>

namespace fdsdr {

enum class KernelFamily { Gaussian, Laplacian, Linear };

inline const char* to_string(KernelFamily f) {
    switch (f) {
        case KernelFamily::Gaussian: return "gaussian";
        case KernelFamily::Laplacian: return "laplacian";
        case KernelFamily::Linear: return "linear";
    }
    return "unknown";
}

inline KernelFamily parse_kernel_family(const std::string& s) {
    if (s == "gaussian") return KernelFamily::Gaussian;
    if (s == "laplacian") return KernelFamily::Laplacian;
    if (s == "linear") return KernelFamily::Linear;
    throw Error(ErrorKind::InvalidInput, "unknown kernel family '" + s + "'");
}

inline constexpr double kDefaultRhoY = 10.0;

struct KernelSpec {
    KernelFamily family = KernelFamily::Gaussian;
    double gamma = 1.0;  // unused for Linear
    double rho_y = kDefaultRhoY;

    void validate() const {
        detail::require(rho_y > 0.0, ErrorKind::InvalidInput, "rho_y must be positive");
        if (family != KernelFamily::Linear)
            detail::require(gamma > 0.0 && std::isfinite(gamma), ErrorKind::InvalidInput,
                            "kernel bandwidth gamma must be positive");
    }
};

/// Kernel as requested by a caller: the bandwidth is selected from the data
/// unless gamma_override is set.
struct KernelRequest {
    KernelFamily family = KernelFamily::Gaussian;
    double rho_y = kDefaultRhoY;
    std::optional<double> gamma_override;
};

/// Pairwise distances in the kernel's feature space, sqrt(K_kk + K_ll - 2 K_kl).
class FeatureDistanceMatrix {
public:
    explicit FeatureDistanceMatrix(SymMatrix b) : data_(std::move(b)) {}
    [[nodiscard]] const SymMatrix& sym() const noexcept { return data_; }
    [[nodiscard]] const Matrix& matrix() const noexcept { return data_.matrix(); }
    [[nodiscard]] Index size() const noexcept { return data_.dim(); }

private:
    SymMatrix data_;
};

/// Data-driven bandwidth: mean squared (Gaussian) or mean (Laplacian) pairwise
/// distance over i < j, scaled by rho_y / 2.
inline double select_bandwidth(const SymMatrix& distances, KernelFamily family, double rho_y) {
    detail::require(family != KernelFamily::Linear, ErrorKind::InvalidInput, "linear kernel has no bandwidth");
    detail::require(rho_y > 0.0, ErrorKind::InvalidInput, "rho_y must be positive");
    const Index n = distances.dim();
    detail::require(n >= 2, ErrorKind::InvalidInput, "bandwidth selection needs n >= 2");

    double sum = 0.0;
    double sum_sq = 0.0;
    bool any_positive = false;
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            const double d = distances(i, j);
            sum += d;
            sum_sq += d * d;
            any_positive = any_positive || d > 0.0;
        }
    }
    detail::require(any_positive, ErrorKind::DegenerateSample, "all pairwise response distances are zero");
    const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    if (family == KernelFamily::Gaussian) return rho_y / (2.0 * (sum_sq / pairs));
    return rho_y / (2.0 * (sum / pairs));
}

/// Gaussian exp(-gamma d^2) or Laplacian exp(-gamma d) applied entrywise.
inline SymMatrix kernel_matrix(const SymMatrix& distances, const KernelSpec& spec) {
    detail::require(spec.family != KernelFamily::Linear, ErrorKind::InvalidInput,
                    "linear kernel is built from raw vectors, use linear_kernel_matrix");
    spec.validate();
    const Matrix& d = distances.matrix();
    detail::require(d.allFinite(), ErrorKind::InvalidInput, "kernel_matrix: non-finite distances");
    if (spec.family == KernelFamily::Gaussian)
        return SymMatrix((-spec.gamma * d.array().square()).exp().matrix());
    return SymMatrix((-spec.gamma * d.array()).exp().matrix());
}

/// Gram matrix <Y_k, Y_l> of vector responses.
inline SymMatrix linear_kernel_matrix(const ResponseSample& sample) {
    detail::require(!sample.empty() && sample.kind() == ResponseKind::Vector, ErrorKind::InvalidInput,
                    "linear kernel applies to vector responses only");
    const auto n = static_cast<Index>(sample.size());
    const Index m = shape_of(sample[0]);
    Matrix y(n, m);
    for (Index i = 0; i < n; ++i) y.row(i) = std::get<VectorPoint>(sample[static_cast<std::size_t>(i)]).values.transpose();
    return SymMatrix(y * y.transpose());
}

inline constexpr double kFeatureClampTolerance = 1e-8;

/// b_kl = sqrt(K_kk + K_ll - 2 K_kl), computed directly from the kernel
/// without forming K^{1/2}.
inline FeatureDistanceMatrix feature_distances(const SymMatrix& kernel) {
    const Matrix& k = kernel.matrix();
    const Index n = k.rows();
    Matrix b = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            const double sq = k(i, i) + k(j, j) - 2.0 * k(i, j);
            detail::require(sq >= -kFeatureClampTolerance, ErrorKind::NonPsdKernel,
                            "kernel is not positive semidefinite at (" + std::to_string(i) + "," +
                                std::to_string(j) + "): " + std::to_string(sq));
            const double v = std::sqrt(std::max(0.0, sq));
            b(i, j) = v;
            b(j, i) = v;
        }
    }
    return FeatureDistanceMatrix(SymMatrix(b));
}

}  // namespace fdsdr
