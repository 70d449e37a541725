#pragma once

#include "fdsdr/error.hpp"
#include "fdsdr/estimator.hpp"
#include "fdsdr/linalg.hpp"
#include "fdsdr/metric_spaces.hpp"
#include "fdsdr/rng.hpp"

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <array>
#include <initializer_list>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

// =============================================================================
// Synthetic benchmark generators
//
// Scenario I:   distributional responses (Gaussian quantile grids)
// Scenario II:  SPD matrix responses, log(Y) symmetric-matrix-normal around log D(X)
// Scenario III: responses on S^1 / S^2
// =============================================================================

namespace fdsdr::sim {

enum class Scenario { I, II, III };

inline const char* to_string(Scenario s) {
    switch (s) {
        case Scenario::I: return "I";
        case Scenario::II: return "II";
        case Scenario::III: return "III";
    }
    return "?";
}

inline Scenario parse_scenario(const std::string& s) {
    if (s == "I" || s == "1") return Scenario::I;
    if (s == "II" || s == "2") return Scenario::II;
    if (s == "III" || s == "3") return Scenario::III;
    throw Error(ErrorKind::InvalidInput, "unknown scenario '" + s + "'");
}

enum class PredictorScheme { A, B, C };

inline char to_char(PredictorScheme s) { return static_cast<char>('a' + static_cast<int>(s)); }

inline PredictorScheme parse_scheme(const std::string& s) {
    if (s == "a") return PredictorScheme::A;
    if (s == "b") return PredictorScheme::B;
    if (s == "c") return PredictorScheme::C;
    throw Error(ErrorKind::InvalidInput, "unknown predictor scheme '" + s + "'");
}

/// What to do when a Scenario II D(X) is not positive definite.
enum class NonPdPolicy { Resample, Error };

struct ScenarioSpec {
    Scenario scenario = Scenario::I;
    int model = 1;
    PredictorScheme predictor_scheme = PredictorScheme::A;
    Index n = 200;
    Index p = 10;
    double alpha_var = 1.0;
    double nu = 0.5;
    Index grid_m = 100;
    std::uint64_t seed = 0;
    NonPdPolicy non_pd_policy = NonPdPolicy::Resample;

    void validate() const;
    [[nodiscard]] std::string label() const {
        return std::string(to_string(scenario)) + "(" + std::to_string(model) + "-" + to_char(predictor_scheme) + ")";
    }
};

struct GroundTruth {
    Matrix s_basis;  // p x d
    Index d_true = 0;
};

struct Simulated {
    Dataset data;
    GroundTruth truth;
};

inline constexpr double kSigmaMin = 0.1;
inline constexpr double kSigmaMax = 10.0;
inline constexpr double kMatrixNoiseSigma = 0.5;
inline constexpr double kSphereNoiseSigma = 0.2;

inline void ScenarioSpec::validate() const {
    detail::require(n >= 4, ErrorKind::InvalidInput, "scenario needs n >= 4");
    detail::require(p >= 5, ErrorKind::InvalidInput, "scenario needs p >= 5");
    detail::require(alpha_var > 0.0, ErrorKind::InvalidInput, "alpha_var must be positive");
    detail::require(nu > 0.0, ErrorKind::InvalidInput, "nu must be positive");
    detail::require(grid_m >= 2, ErrorKind::InvalidInput, "grid_m must be >= 2");
    const auto s = predictor_scheme;
    bool ok = false;
    switch (scenario) {
        case Scenario::I:
            ok = ((model == 1 || model == 2) && (s == PredictorScheme::A || s == PredictorScheme::B)) ||
                 ((model == 3 || model == 4) && s == PredictorScheme::C);
            break;
        case Scenario::II:
            ok = (model == 1 || model == 2) && (s == PredictorScheme::A || s == PredictorScheme::B);
            break;
        case Scenario::III:
            ok = model >= 1 && model <= 3;
            break;
    }
    detail::require(ok, ErrorKind::InvalidInput, "unsupported scenario/model/scheme combination " + label());
}

// =============================================================================
// Coefficient patterns
// =============================================================================

inline Vector beta1(Index p) { Vector b = Vector::Zero(p); b(0) = 1; b(1) = 1; return b; }
inline Vector beta2(Index p) { Vector b = Vector::Zero(p); b(p - 2) = 1; b(p - 1) = 1; return b; }
inline Vector beta3(Index p) { Vector b = Vector::Zero(p); b(0) = 1; b(1) = 2; b(p - 1) = 2; return b; }
inline Vector beta4(Index p) { Vector b = Vector::Zero(p); b(2) = 1; b(3) = 2; b(4) = 2; return b; }

inline Matrix columns(std::initializer_list<Vector> cols) {
    Matrix m(cols.begin()->size(), static_cast<Index>(cols.size()));
    Index j = 0;
    for (const auto& c : cols) m.col(j++) = c;
    return m;
}

// =============================================================================
// Predictors
// =============================================================================

/// Draws predictor rows one at a time for a scheme.
class PredictorSampler {
public:
    PredictorSampler(PredictorScheme scheme, Index p) : scheme_(scheme), p_(p) {
        detail::require(p >= 5, ErrorKind::InvalidInput, "predictor schemes need p >= 5");
        if (scheme != PredictorScheme::A) {
            Matrix ar(p, p);
            for (Index i = 0; i < p; ++i)
                for (Index j = 0; j < p; ++j) ar(i, j) = std::pow(0.5, static_cast<double>(std::abs(i - j)));
            chol_ = ar.llt().matrixL();
        }
    }

    Vector draw(Rng& rng) const {
        boost::random::normal_distribution<double> normal(0.0, 1.0);
        Vector e(p_);
        for (Index j = 0; j < p_; ++j) e(j) = normal(rng);
        if (scheme_ == PredictorScheme::A) return e;
        Vector u = chol_ * e;
        if (scheme_ == PredictorScheme::B) {
            u(0) = std::sin(u(0));
            u(1) = std::abs(u(1));
            return u;
        }
        for (Index j = 0; j < p_; ++j) u(j) = normal_cdf(u(j));
        return u;
    }

private:
    PredictorScheme scheme_;
    Index p_;
    Matrix chol_;
};

inline Matrix gen_predictors(PredictorScheme scheme, Index n, Index p, Rng& rng) {
    const PredictorSampler sampler(scheme, p);
    Matrix x(n, p);
    for (Index i = 0; i < n; ++i) x.row(i) = sampler.draw(rng).transpose();
    return x;
}

// =============================================================================
// Scenario I: distributions
// =============================================================================

/// Unclamped Gamma draw with shape (2+2t)^2/nu and scale nu/(2+2t), t = beta4^T x;
/// its mean is 2+2t.
inline double sample_gamma_sigma(double beta4_x, double nu, Rng& rng) {
    const double m = 2.0 + 2.0 * beta4_x;
    detail::require(m > 0.0, ErrorKind::InvalidInput, "Gamma mean 2+2*beta4'X must be positive");
    boost::random::gamma_distribution<double> gamma(m * m / nu, nu / m);
    return gamma(rng);
}

inline double clamp_sigma(double s) { return std::clamp(s, kSigmaMin, kSigmaMax); }

inline Simulated gen_scenario_I(const ScenarioSpec& spec, Rng& rng) {
    spec.validate();
    detail::require(spec.scenario == Scenario::I, ErrorKind::InvalidInput, "spec is not Scenario I");
    const Index p = spec.p;
    Matrix x = gen_predictors(spec.predictor_scheme, spec.n, p, rng);
    const Vector b1 = beta1(p), b2 = beta2(p), b3 = beta3(p), b4 = beta4(p);
    boost::random::normal_distribution<double> normal(0.0, 1.0);

    std::vector<ResponseObject> ys;
    ys.reserve(static_cast<std::size_t>(spec.n));
    for (Index i = 0; i < spec.n; ++i) {
        const Vector xi = x.row(i).transpose();
        double mu = 0.0;
        double sigma = 0.5;
        switch (spec.model) {
            case 1:
                mu = std::exp(b1.dot(xi)) + std::sqrt(0.1) * normal(rng);
                break;
            case 2:
                mu = std::exp(b1.dot(xi)) + std::sqrt(0.1) * normal(rng);
                sigma = clamp_sigma(std::exp(b2.dot(xi)));
                break;
            case 3:
                mu = 3.0 * b3.dot(xi) + 0.5 * normal(rng);
                sigma = clamp_sigma(sample_gamma_sigma(b4.dot(xi), spec.nu, rng));
                break;
            default:
                mu = 3.0 * std::sin(b3.dot(xi)) + 0.5 * normal(rng);
                sigma = clamp_sigma(sample_gamma_sigma(b4.dot(xi), spec.nu, rng));
                break;
        }
        ys.emplace_back(gaussian_quantile_distribution(mu, std::sqrt(spec.alpha_var) * sigma, spec.grid_m));
    }

    GroundTruth truth;
    truth.s_basis = spec.model == 1 ? columns({b1}) : spec.model == 2 ? columns({b1, b2}) : columns({b3, b4});
    truth.d_true = truth.s_basis.cols();
    return {{std::move(x), ResponseSample(std::move(ys))}, std::move(truth)};
}

// =============================================================================
// Scenario II: SPD matrices
// =============================================================================

/// Applies f to the eigenvalues of a symmetric matrix.
template <typename F>
Matrix spectral_map(const Matrix& s, F f) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (s + s.transpose()));
    Vector lambda = eig.eigenvalues();
    for (Index i = 0; i < lambda.size(); ++i) lambda(i) = f(lambda(i));
    return eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
}

inline Matrix expm_sym(const Matrix& s) {
    return spectral_map(s, [](double l) { return std::exp(l); });
}

inline Matrix logm_spd(const Matrix& s) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (s + s.transpose()), Eigen::EigenvaluesOnly);
    detail::require(eig.eigenvalues().minCoeff() > 0.0, ErrorKind::InvalidInput, "logm needs a positive definite matrix");
    return spectral_map(s, [](double l) { return std::log(l); });
}

inline Matrix correlation_model1(double rho) {
    Matrix d(2, 2);
    d << 1, rho, rho, 1;
    return d;
}

inline Matrix correlation_model2(double rho1, double rho2) {
    Matrix d(3, 3);
    d << 1, rho1, rho2, rho1, 1, rho1, rho2, rho1, 1;
    return d;
}

inline constexpr double kPdThreshold = 1e-10;

inline bool is_positive_definite(const Matrix& d) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(d, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff() > kPdThreshold;
}

/// Symmetric noise with independent upper-triangle entries: N(0, sigma^2) on
/// the diagonal and N(0, sigma^2/2) off it.
inline Matrix symmetric_noise(Index q, double sigma, Rng& rng) {
    boost::random::normal_distribution<double> normal(0.0, 1.0);
    Matrix e(q, q);
    for (Index i = 0; i < q; ++i) {
        e(i, i) = sigma * normal(rng);
        for (Index j = i + 1; j < q; ++j) {
            e(i, j) = sigma / std::numbers::sqrt2 * normal(rng);
            e(j, i) = e(i, j);
        }
    }
    return e;
}

/// Y = expm(logm(D) + E).
inline Matrix sample_spd_response(const Matrix& d, double sigma, Rng& rng) {
    return expm_sym(logm_spd(d) + symmetric_noise(d.rows(), sigma, rng));
}

inline Matrix scenario_II_mean(int model, const Vector& x) {
    const Index p = x.size();
    if (model == 1) return correlation_model1(0.8 * std::cos(beta1(p).dot(x)));
    return correlation_model2(0.8 * std::cos(beta1(p).dot(x)), 0.8 * std::sin(beta2(p).dot(x)));
}

inline Simulated gen_scenario_II(const ScenarioSpec& spec, Rng& rng) {
    spec.validate();
    detail::require(spec.scenario == Scenario::II, ErrorKind::InvalidInput, "spec is not Scenario II");
    const Index p = spec.p;
    const PredictorSampler sampler(spec.predictor_scheme, p);
    constexpr int kMaxResample = 10000;

    Matrix x(spec.n, p);
    std::vector<ResponseObject> ys;
    ys.reserve(static_cast<std::size_t>(spec.n));
    for (Index i = 0; i < spec.n; ++i) {
        Vector xi = sampler.draw(rng);
        Matrix d = scenario_II_mean(spec.model, xi);
        for (int attempt = 0; !is_positive_definite(d); ++attempt) {
            detail::require(spec.non_pd_policy == NonPdPolicy::Resample, ErrorKind::InvalidInput,
                            "D(X) is not positive definite at row " + std::to_string(i));
            detail::require(attempt < kMaxResample, ErrorKind::InvalidInput, "could not draw a positive definite D(X)");
            xi = sampler.draw(rng);
            d = scenario_II_mean(spec.model, xi);
        }
        x.row(i) = xi.transpose();
        ys.emplace_back(SymMatrixPoint{SymMatrix(sample_spd_response(d, kMatrixNoiseSigma, rng))});
    }

    GroundTruth truth;
    truth.s_basis = spec.model == 1 ? columns({beta1(p)}) : columns({beta1(p), beta2(p)});
    truth.d_true = truth.s_basis.cols();
    return {{std::move(x), ResponseSample(std::move(ys))}, std::move(truth)};
}

// =============================================================================
// Scenario III: spheres
// =============================================================================

/// Rotation of m(X) = (cos t, sin t), t = pi * beta1^T x, by angle delta along the circle.
inline SpherePoint sphere_response_model1(double beta1_x, double delta) {
    const double t = std::numbers::pi * beta1_x;
    Vector m(2);
    m << std::cos(t), std::sin(t);
    if (delta == 0.0) return SpherePoint::from_direction(m);
    Vector eps(2);
    eps << -delta * std::sin(t), delta * std::cos(t);
    const double norm = eps.norm();
    return SpherePoint::from_direction(std::cos(norm) * m + std::sin(norm) * eps / norm);
}

/// m(X) for Model 2; beta3^T x is clamped to [-1, 1] so the point stays on S^2.
inline Vector sphere_mean_model2(double beta1_x, double beta3_x) {
    const double s = std::clamp(beta3_x, -1.0, 1.0);
    const double r = std::sqrt(1.0 - s * s);
    const double t = std::numbers::pi * beta1_x;
    Vector m(3);
    m << r * std::cos(t), r * std::sin(t), s;
    return m;
}

/// Orthonormal basis (v1, v2) of the tangent plane at unit vector m in R^3,
/// by Gram-Schmidt on the two coordinate axes least aligned with m.
inline std::pair<Vector, Vector> tangent_basis(const Vector& m) {
    std::array<Index, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return std::abs(m(a)) < std::abs(m(b)); });
    Vector v1 = Vector::Unit(3, order[0]);
    v1 -= v1.dot(m) * m;
    v1.normalize();
    Vector v2 = Vector::Unit(3, order[1]);
    v2 -= v2.dot(m) * m + v2.dot(v1) * v1;
    v2.normalize();
    return {v1, v2};
}

/// Exponential map of the tangent noise delta1 v1 + delta2 v2 at m.
inline SpherePoint sphere_response_model2(double beta1_x, double beta3_x, double delta1, double delta2) {
    const Vector m = sphere_mean_model2(beta1_x, beta3_x);
    const auto [v1, v2] = tangent_basis(m);
    const Vector eps = delta1 * v1 + delta2 * v2;
    const double norm = eps.norm();
    if (norm == 0.0) return SpherePoint::from_direction(m);
    return SpherePoint::from_direction(std::cos(norm) * m + std::sin(norm) * eps / norm);
}

inline SpherePoint sphere_response_model3(double beta1_x, double beta2_x, double delta1, double delta2) {
    const double a = beta1_x + delta1;
    const double b = beta2_x + delta2;
    Vector y(3);
    y << std::sin(a) * std::sin(b), std::sin(a) * std::cos(b), std::cos(a);
    return SpherePoint::from_direction(y);
}

/// beta1 = (x1,x2,x3,0,...)/sqrt(3) and beta2 = (0,...,x_{p-2},x_{p-1},x_p)/sqrt(3).
inline std::pair<Vector, Vector> draw_sphere_betas(Index p, Rng& rng) {
    boost::random::normal_distribution<double> normal(0.0, 1.0);
    Vector b1 = Vector::Zero(p);
    Vector b2 = Vector::Zero(p);
    for (Index j = 0; j < 3; ++j) b1(j) = normal(rng) / std::sqrt(3.0);
    for (Index j = p - 3; j < p; ++j) b2(j) = normal(rng) / std::sqrt(3.0);
    return {b1, b2};
}

inline Simulated gen_scenario_III(const ScenarioSpec& spec, Rng& rng) {
    spec.validate();
    detail::require(spec.scenario == Scenario::III, ErrorKind::InvalidInput, "spec is not Scenario III");
    const Index p = spec.p;
    const auto [b1, b2] = draw_sphere_betas(p, rng);
    const Vector b3 = Vector::Unit(p, 1);
    Matrix x = gen_predictors(spec.predictor_scheme, spec.n, p, rng);
    boost::random::normal_distribution<double> noise(0.0, kSphereNoiseSigma);

    std::vector<ResponseObject> ys;
    ys.reserve(static_cast<std::size_t>(spec.n));
    for (Index i = 0; i < spec.n; ++i) {
        const Vector xi = x.row(i).transpose();
        if (spec.model == 1) {
            ys.emplace_back(sphere_response_model1(b1.dot(xi), noise(rng)));
        } else {
            const double d1 = noise(rng);
            const double d2 = noise(rng);
            if (spec.model == 2)
                ys.emplace_back(sphere_response_model2(b1.dot(xi), b3.dot(xi), d1, d2));
            else
                ys.emplace_back(sphere_response_model3(b1.dot(xi), b2.dot(xi), d1, d2));
        }
    }

    GroundTruth truth;
    truth.s_basis = spec.model == 1 ? columns({b1}) : spec.model == 2 ? columns({b1, b3}) : columns({b1, b2});
    truth.d_true = truth.s_basis.cols();
    return {{std::move(x), ResponseSample(std::move(ys))}, std::move(truth)};
}

inline ResponseKind response_kind(Scenario s) {
    switch (s) {
        case Scenario::I: return ResponseKind::Quantile;
        case Scenario::II: return ResponseKind::SymMatrix;
        case Scenario::III: return ResponseKind::Sphere;
    }
    return ResponseKind::Vector;
}

/// Generates a dataset seeded from ScenarioSpec::seed.
inline Simulated simulate(const ScenarioSpec& spec) {
    Rng rng = make_rng(spec.seed);
    switch (spec.scenario) {
        case Scenario::I: return gen_scenario_I(spec, rng);
        case Scenario::II: return gen_scenario_II(spec, rng);
        case Scenario::III: return gen_scenario_III(spec, rng);
    }
    throw Error(ErrorKind::InvalidInput, "unknown scenario");
}

}  // namespace fdsdr::sim
