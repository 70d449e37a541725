#include "fdsdr/simulation.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace fdsdr;
using namespace fdsdr::sim;

namespace {

ScenarioSpec make_spec(Scenario s, int model, PredictorScheme scheme, std::uint64_t seed = 1) {
    ScenarioSpec spec;
    spec.scenario = s;
    spec.model = model;
    spec.predictor_scheme = scheme;
    spec.seed = seed;
    return spec;
}

// Recovers (mu, sigma) of a Gaussian quantile grid from its symmetric end points.
std::pair<double, double> grid_parameters(const Vector& q) {
    const Index m = q.size();
    const double mu = 0.5 * (q(0) + q(m - 1));
    const double top = normal_quantile((static_cast<double>(m) - 0.5) / static_cast<double>(m));
    return {mu, (q(m - 1) - q(0)) / (2.0 * top)};
}

Matrix logm_oracle(const Matrix& y) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(y);
    return eig.eigenvectors() * eig.eigenvalues().array().log().matrix().asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

TEST(Predictors, SchemeAHasIdentityCovariance) {
    Rng rng = make_rng(1);
    const Matrix x = gen_predictors(PredictorScheme::A, 10000, 6, rng);
    const Matrix c = x.rowwise() - x.colwise().mean();
    EXPECT_LT(test::max_abs(c.transpose() * c / 9999.0 - Matrix::Identity(6, 6)), 0.05);
}

TEST(Predictors, SchemeBSecondColumnNonNegative) {
    Rng rng = make_rng(2);
    const Matrix x = gen_predictors(PredictorScheme::B, 2000, 6, rng);
    EXPECT_GE(x.col(1).minCoeff(), 0.0);
    EXPECT_GE(x.col(0).minCoeff(), -1.0);
    EXPECT_LE(x.col(0).maxCoeff(), 1.0);
}

TEST(Predictors, SchemeCInUnitInterval) {
    Rng rng = make_rng(3);
    const Matrix x = gen_predictors(PredictorScheme::C, 2000, 6, rng);
    EXPECT_GT(x.minCoeff(), 0.0);
    EXPECT_LT(x.maxCoeff(), 1.0);
}

TEST(Predictors, ArOneCorrelationBeforeTransform) {
    // Scheme b leaves columns 3.. untouched, so their correlation is 0.5^|i-j|.
    Rng rng = make_rng(4);
    const Matrix x = gen_predictors(PredictorScheme::B, 20000, 6, rng);
    const Matrix c = x.rightCols(4).rowwise() - x.rightCols(4).colwise().mean();
    const Matrix cov = c.transpose() * c / 19999.0;
    for (Index i = 0; i < 4; ++i)
        for (Index j = 0; j < 4; ++j) EXPECT_NEAR(cov(i, j), std::pow(0.5, std::abs(i - j)), 0.05);
}

TEST(ScenarioSpec, RejectsUnlistedCombinations) {
    EXPECT_THROW(simulate(make_spec(Scenario::I, 1, PredictorScheme::C)), Error);
    EXPECT_THROW(simulate(make_spec(Scenario::I, 3, PredictorScheme::A)), Error);
    EXPECT_THROW(simulate(make_spec(Scenario::I, 5, PredictorScheme::A)), Error);
    EXPECT_THROW(simulate(make_spec(Scenario::II, 1, PredictorScheme::C)), Error);
    EXPECT_THROW(simulate(make_spec(Scenario::III, 4, PredictorScheme::A)), Error);
    ScenarioSpec small = make_spec(Scenario::I, 1, PredictorScheme::A);
    small.p = 4;
    EXPECT_THROW(simulate(small), Error);
}

TEST(ScenarioI, ModelOneResponsesHaveFixedScale) {
    const Simulated s = simulate(make_spec(Scenario::I, 1, PredictorScheme::A));
    ASSERT_EQ(s.data.responses.kind(), ResponseKind::Quantile);
    for (const auto& obj : s.data.responses.objects()) {
        const Vector q = std::get<QuantileDistribution>(obj).values();
        EXPECT_NEAR(grid_parameters(q).second, 0.5, 1e-12);
        EXPECT_EQ(q.size(), 100);
        for (Index j = 1; j < q.size(); ++j) EXPECT_GE(q(j), q(j - 1));
    }
    EXPECT_EQ(s.truth.d_true, 1);
    EXPECT_EQ(s.truth.s_basis, beta1(10));
}

TEST(ScenarioI, ModelTwoScaleIsClamped) {
    for (auto scheme : {PredictorScheme::A, PredictorScheme::B}) {
        const Simulated s = simulate(make_spec(Scenario::I, 2, scheme, 9));
        for (const auto& obj : s.data.responses.objects()) {
            const double sigma = grid_parameters(std::get<QuantileDistribution>(obj).values()).second;
            EXPECT_GE(sigma, 0.1 - 1e-12);
            EXPECT_LE(sigma, 10.0 + 1e-12);
        }
        EXPECT_EQ(s.truth.d_true, 2);
    }
}

TEST(ScenarioI, GammaMeanMatchesShapeTimesScale) {
    Rng rng = make_rng(5);
    for (double t : {-0.5, 0.0, 1.5}) {
        double sum = 0;
        for (int i = 0; i < 10000; ++i) sum += sample_gamma_sigma(t, 0.5, rng);
        EXPECT_NEAR(sum / 10000.0, 2.0 + 2.0 * t, 0.03);
    }
}

TEST(ScenarioI, AlphaScalesVariance) {
    ScenarioSpec spec = make_spec(Scenario::I, 1, PredictorScheme::A);
    spec.alpha_var = 0.25;
    const Simulated s = simulate(spec);
    const double sigma = grid_parameters(std::get<QuantileDistribution>(s.data.responses[0]).values()).second;
    EXPECT_NEAR(sigma, 0.25, 1e-12);
}

TEST(ScenarioI, ModelsThreeAndFourTruth) {
    for (int model : {3, 4}) {
        const Simulated s = simulate(make_spec(Scenario::I, model, PredictorScheme::C));
        EXPECT_EQ(s.truth.d_true, 2);
        EXPECT_EQ(s.truth.s_basis.col(0), beta3(10));
        EXPECT_EQ(s.truth.s_basis.col(1), beta4(10));
    }
}

TEST(ScenarioII, ZeroCorrelationMeanIsIdentity) {
    const Matrix d = correlation_model1(0.0);
    EXPECT_EQ(d, Matrix::Identity(2, 2));
    EXPECT_LT(test::max_abs(logm_spd(d)), 1e-15);
}

TEST(ScenarioII, ResponsesAreSymmetricPositiveDefinite) {
    for (int model : {1, 2}) {
        const Simulated s = simulate(make_spec(Scenario::II, model, PredictorScheme::A, 11));
        for (const auto& obj : s.data.responses.objects()) {
            const Matrix& y = std::get<SymMatrixPoint>(obj).value.matrix();
            EXPECT_EQ(y, y.transpose());
            Eigen::SelfAdjointEigenSolver<Matrix> eig(y, Eigen::EigenvaluesOnly);
            EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
        }
        for (Index i = 0; i < s.data.x.rows(); ++i)
            EXPECT_TRUE(is_positive_definite(scenario_II_mean(model, s.data.x.row(i).transpose())));
    }
}

TEST(ScenarioII, LogMeanMatchesLogOfCenter) {
    Rng rng = make_rng(6);
    const Matrix d = correlation_model2(0.5, -0.3);
    const Matrix target = logm_oracle(d);
    Matrix acc = Matrix::Zero(3, 3);
    for (int i = 0; i < 10000; ++i) acc += logm_oracle(sample_spd_response(d, kMatrixNoiseSigma, rng));
    EXPECT_LT(test::max_abs(acc / 10000.0 - target), 0.05);
}

TEST(ScenarioII, NoiseVarianceConvention) {
    Rng rng = make_rng(7);
    double diag = 0, off = 0;
    for (int i = 0; i < 20000; ++i) {
        const Matrix e = symmetric_noise(3, 0.5, rng);
        diag += e(0, 0) * e(0, 0);
        off += e(0, 1) * e(0, 1);
        EXPECT_EQ(e(0, 1), e(1, 0));
    }
    EXPECT_NEAR(diag / 20000.0, 0.25, 0.01);
    EXPECT_NEAR(off / 20000.0, 0.125, 0.005);
}

TEST(ScenarioII, ErrorPolicyRejectsNonPositiveDefiniteCenters) {
    ScenarioSpec spec = make_spec(Scenario::II, 2, PredictorScheme::A, 12);
    spec.non_pd_policy = NonPdPolicy::Error;
    EXPECT_THROW(simulate(spec), Error);
}

TEST(ScenarioIII, ModelOneZeroNoiseIsMean) {
    const double t = 0.3;
    const SpherePoint y = sphere_response_model1(t, 0.0);
    EXPECT_NEAR(y.values()(0), std::cos(std::numbers::pi * t), 1e-15);
    EXPECT_NEAR(y.values()(1), std::sin(std::numbers::pi * t), 1e-15);
}

TEST(ScenarioIII, ModelOneNoiseIsGeodesicRotation) {
    const SpherePoint base = sphere_response_model1(0.2, 0.0);
    const SpherePoint moved = sphere_response_model1(0.2, 0.15);
    EXPECT_NEAR(distance(base, moved), 0.15, 1e-12);
}

TEST(ScenarioIII, ModelTwoNoiseIsTangent) {
    auto g = test::rng(101);
    for (int t = 0; t < 200; ++t) {
        const Vector m = sphere_mean_model2(test::uniform(-2, 2, g), test::uniform(-1.5, 1.5, g));
        EXPECT_NEAR(m.norm(), 1.0, 1e-12);
        const auto [v1, v2] = tangent_basis(m);
        const Vector eps = test::uniform(-1, 1, g) * v1 + test::uniform(-1, 1, g) * v2;
        EXPECT_NEAR(m.dot(eps), 0.0, 1e-12);
        EXPECT_NEAR(v1.dot(v2), 0.0, 1e-12);
    }
}

TEST(ScenarioIII, ModelThreeDirectSubstitution) {
    const SpherePoint y = sphere_response_model3(std::numbers::pi / 2, 0.0, 0.0, 0.0);
    EXPECT_NEAR(y.values()(0), 0.0, 1e-15);
    EXPECT_NEAR(y.values()(1), 1.0, 1e-15);
    EXPECT_NEAR(y.values()(2), 0.0, 1e-15);
}

TEST(ScenarioIII, ResponsesHaveUnitNormAndTruthShapes) {
    for (int model : {1, 2, 3}) {
        for (auto scheme : {PredictorScheme::A, PredictorScheme::C}) {
            const Simulated s = simulate(make_spec(Scenario::III, model, scheme, 13));
            for (const auto& obj : s.data.responses.objects())
                EXPECT_NEAR(std::get<SpherePoint>(obj).values().norm(), 1.0, 1e-10);
            EXPECT_EQ(s.truth.d_true, model == 1 ? 1 : 2);
            if (model == 2) {
                EXPECT_EQ(s.truth.s_basis.col(1), Vector::Unit(10, 1));
            }
        }
    }
}

TEST(Simulate, DeterministicGivenSeed) {
    for (auto s : {Scenario::I, Scenario::II, Scenario::III}) {
        const ScenarioSpec spec = make_spec(s, 1, PredictorScheme::A, 21);
        const Simulated a = simulate(spec), b = simulate(spec);
        EXPECT_EQ(a.data.x, b.data.x);
        EXPECT_EQ(a.truth.s_basis, b.truth.s_basis);
        for (std::size_t i = 0; i < a.data.responses.size(); ++i)
            EXPECT_EQ(distance(a.data.responses[i], b.data.responses[i]), 0.0);
        const Simulated c = simulate(make_spec(s, 1, PredictorScheme::A, 22));
        EXPECT_NE(a.data.x, c.data.x);
    }
}

TEST(Simulate, GroundTruthHasFullColumnRank) {
    const std::vector<std::tuple<Scenario, int, PredictorScheme>> combos = {
        {Scenario::I, 1, PredictorScheme::A},   {Scenario::I, 2, PredictorScheme::B},
        {Scenario::I, 3, PredictorScheme::C},   {Scenario::I, 4, PredictorScheme::C},
        {Scenario::II, 1, PredictorScheme::B},  {Scenario::II, 2, PredictorScheme::A},
        {Scenario::III, 1, PredictorScheme::A}, {Scenario::III, 2, PredictorScheme::C},
        {Scenario::III, 3, PredictorScheme::B}};
    for (const auto& [scenario, model, scheme] : combos) {
        ScenarioSpec spec = make_spec(scenario, model, scheme, 31);
        spec.n = 20;
        const Simulated s = simulate(spec);
        Eigen::JacobiSVD<Matrix> svd(s.truth.s_basis);
        EXPECT_GT(svd.singularValues().minCoeff(), 1e-8) << spec.label();
        EXPECT_EQ(s.data.x.rows(), 20);
        EXPECT_EQ(s.data.responses.size(), 20u);
        EXPECT_EQ(s.data.responses.kind(), response_kind(scenario));
    }
}
