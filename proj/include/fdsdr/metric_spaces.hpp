#pragma once

#include "fdsdr/error.hpp"
#include "fdsdr/linalg.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

namespace fdsdr {

// =============================================================================
// Response objects
// =============================================================================

struct VectorPoint {
    Vector values;
};

/// A 1-D distribution stored as its quantile function F^{-1} sampled on the
/// midpoint grid u_j = (j - 1/2) / m.
class QuantileDistribution {
public:
    explicit QuantileDistribution(Vector values) : values_(std::move(values)) {
        detail::require(values_.size() >= 2, ErrorKind::InvalidInput, "quantile grid needs m >= 2");
        detail::require(values_.allFinite(), ErrorKind::InvalidInput, "quantile grid has non-finite values");
        for (Index j = 1; j < values_.size(); ++j)
            detail::require(values_(j) >= values_(j - 1), ErrorKind::InvalidInput,
                            "quantile values must be non-decreasing (position " + std::to_string(j) + ")");
    }

    [[nodiscard]] Index grid_size() const noexcept { return values_.size(); }
    [[nodiscard]] const Vector& values() const noexcept { return values_; }

    static double grid_point(Index j, Index m) {
        return (static_cast<double>(j) + 0.5) / static_cast<double>(m);
    }

private:
    Vector values_;
};

struct SymMatrixPoint {
    SymMatrix value;
};

inline constexpr double kSphereNormTolerance = 1e-10;

class SpherePoint {
public:
    explicit SpherePoint(Vector values) : values_(std::move(values)) {
        detail::require(values_.size() >= 1, ErrorKind::InvalidInput, "sphere point needs length >= 1");
        const double norm = values_.norm();
        detail::require(std::abs(norm - 1.0) <= kSphereNormTolerance, ErrorKind::InvalidInput,
                        "sphere point must have unit norm, got " + std::to_string(norm));
    }

    /// Normalizes v onto the sphere.
    static SpherePoint from_direction(const Vector& v) {
        const double norm = v.norm();
        detail::require(norm > 0.0 && std::isfinite(norm), ErrorKind::InvalidInput, "cannot normalize zero vector");
        return SpherePoint(v / norm);
    }

    [[nodiscard]] const Vector& values() const noexcept { return values_; }

private:
    Vector values_;
};

using ResponseObject = std::variant<VectorPoint, QuantileDistribution, SymMatrixPoint, SpherePoint>;

enum class ResponseKind { Vector, Quantile, SymMatrix, Sphere };

inline ResponseKind kind_of(const ResponseObject& obj) {
    return static_cast<ResponseKind>(obj.index());
}

inline const char* to_string(ResponseKind kind) {
    switch (kind) {
        case ResponseKind::Vector: return "vector";
        case ResponseKind::Quantile: return "quantile";
        case ResponseKind::SymMatrix: return "symmatrix";
        case ResponseKind::Sphere: return "sphere";
    }
    return "unknown";
}

inline ResponseKind parse_response_kind(const std::string& s) {
    if (s == "vector") return ResponseKind::Vector;
    if (s == "quantile") return ResponseKind::Quantile;
    if (s == "symmatrix") return ResponseKind::SymMatrix;
    if (s == "sphere") return ResponseKind::Sphere;
    throw Error(ErrorKind::InvalidInput, "unknown response kind '" + s + "'");
}

/// Length of the underlying representation (vector length, grid size, matrix dim).
inline Index shape_of(const ResponseObject& obj) {
    return std::visit(
        [](const auto& o) -> Index {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, VectorPoint>) return o.values.size();
            else if constexpr (std::is_same_v<T, QuantileDistribution>) return o.grid_size();
            else if constexpr (std::is_same_v<T, SymMatrixPoint>) return o.value.dim();
            else return o.values().size();
        },
        obj);
}

/// Homogeneous collection of responses.
class ResponseSample {
public:
    ResponseSample() = default;

    explicit ResponseSample(std::vector<ResponseObject> objects) : objects_(std::move(objects)) {
        if (objects_.empty()) return;
        const auto kind = kind_of(objects_.front());
        const auto shape = shape_of(objects_.front());
        for (std::size_t i = 1; i < objects_.size(); ++i) {
            detail::require(kind_of(objects_[i]) == kind, ErrorKind::InvalidInput,
                            "response " + std::to_string(i) + " has a different variant");
            detail::require(shape_of(objects_[i]) == shape, ErrorKind::InvalidInput,
                            "response " + std::to_string(i) + " has a different shape");
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return objects_.size(); }
    [[nodiscard]] bool empty() const noexcept { return objects_.empty(); }
    [[nodiscard]] const ResponseObject& operator[](std::size_t i) const { return objects_[i]; }
    [[nodiscard]] const std::vector<ResponseObject>& objects() const noexcept { return objects_; }
    [[nodiscard]] ResponseKind kind() const {
        detail::require(!objects_.empty(), ErrorKind::InvalidInput, "empty response sample");
        return kind_of(objects_.front());
    }

private:
    std::vector<ResponseObject> objects_;
};

// =============================================================================
// Distances
// =============================================================================

enum class SphereMetric { Geodesic, Chordal };

inline double distance(const ResponseObject& a, const ResponseObject& b,
                       SphereMetric sphere_metric = SphereMetric::Geodesic) {
    detail::require(a.index() == b.index(), ErrorKind::InvalidInput, "distance between different response variants");
    detail::require(shape_of(a) == shape_of(b), ErrorKind::InvalidInput, "distance between responses of different shape");

    switch (kind_of(a)) {
        case ResponseKind::Vector:
            return (std::get<VectorPoint>(a).values - std::get<VectorPoint>(b).values).norm();
        case ResponseKind::Quantile: {
            const Vector& qa = std::get<QuantileDistribution>(a).values();
            const Vector& qb = std::get<QuantileDistribution>(b).values();
            return std::sqrt((qa - qb).squaredNorm() / static_cast<double>(qa.size()));
        }
        case ResponseKind::SymMatrix:
            return (std::get<SymMatrixPoint>(a).value.matrix() - std::get<SymMatrixPoint>(b).value.matrix()).norm();
        case ResponseKind::Sphere: {
            const Vector& ya = std::get<SpherePoint>(a).values();
            const Vector& yb = std::get<SpherePoint>(b).values();
            if (sphere_metric == SphereMetric::Chordal) return (ya - yb).norm();
            // Stable for nearly equal and nearly antipodal points; exact zero for equal ones.
            return 2.0 * std::atan2((ya - yb).norm(), (ya + yb).norm());
        }
    }
    return 0.0;
}

/// n x n matrix of d(Y_k, Y_l). Only the upper triangle is evaluated, so the
/// result is symmetric bit-for-bit.
inline SymMatrix pairwise_distances(const ResponseSample& sample,
                                    SphereMetric sphere_metric = SphereMetric::Geodesic) {
    const auto n = static_cast<Index>(sample.size());
    detail::require(n >= 2, ErrorKind::InvalidInput, "pairwise distances need n >= 2");
    Matrix d = Matrix::Zero(n, n);
    for (Index k = 0; k < n; ++k) {
        for (Index l = k + 1; l < n; ++l) {
            const double v = distance(sample[static_cast<std::size_t>(k)], sample[static_cast<std::size_t>(l)],
                                      sphere_metric);
            d(k, l) = v;
            d(l, k) = v;
        }
    }
    return SymMatrix(d);
}

// =============================================================================
// Gaussian quantile grids
// =============================================================================

/// Standard normal quantile function.
inline double normal_quantile(double u) {
    detail::require(u > 0.0 && u < 1.0, ErrorKind::InvalidInput, "normal_quantile needs u in (0,1)");
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

/// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline QuantileDistribution gaussian_quantile_distribution(double mu, double sigma, Index m) {
    detail::require(sigma > 0.0 && std::isfinite(sigma), ErrorKind::InvalidInput,
                    "gaussian quantile grid needs sigma > 0");
    detail::require(m >= 2, ErrorKind::InvalidInput, "gaussian quantile grid needs m >= 2");
    Vector q(m);
    for (Index j = 0; j < m; ++j) q(j) = mu + sigma * normal_quantile(QuantileDistribution::grid_point(j, m));
    return QuantileDistribution(std::move(q));
}

}  // namespace fdsdr
