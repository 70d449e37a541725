#include "fdsdr/config.hpp"
#include "fdsdr/io.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <functional>
#include <fstream>
#include <sstream>

using namespace fdsdr;

namespace {

class TempDir : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = std::filesystem::temp_directory_path() /
               ("fdsdr_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        std::filesystem::remove_all(dir_);
        std::filesystem::create_directories(dir_);
    }
    void TearDown() override { std::filesystem::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(path(name)) << text;
        return path(name);
    }

    std::filesystem::path dir_;
};

std::string parse_error_message(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Parse);
        return e.what();
    }
    ADD_FAILURE() << "expected a parse error";
    return {};
}

std::string config_error_message(const std::string& text) {
    std::istringstream in(text);
    try {
        parse_run_config(in);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Config);
        return e.what();
    }
    ADD_FAILURE() << "expected a config error";
    return {};
}

}  // namespace

using Csv = TempDir;

TEST_F(Csv, MatrixRoundTripIsExact) {
    auto g = test::rng(111);
    const Matrix m = test::randn(7, 3, g) * 1e3;
    io::write_matrix_csv(path("m.csv"), m);
    EXPECT_EQ(io::read_matrix_csv(path("m.csv")), m);
}

TEST_F(Csv, RaggedRowNamesLine) {
    const std::string p = write("bad.csv", "1,2,3\n4,5,6\n7,8\n");
    const std::string msg = parse_error_message([&] { io::read_matrix_csv(p); });
    EXPECT_NE(msg.find(":3:"), std::string::npos) << msg;
}

TEST_F(Csv, NonNumericFieldNamesLine) {
    const std::string p = write("bad.csv", "# comment\n1,2\n3,abc\n");
    const std::string msg = parse_error_message([&] { io::read_matrix_csv(p); });
    EXPECT_NE(msg.find(":3:"), std::string::npos) << msg;
    EXPECT_NE(msg.find("abc"), std::string::npos) << msg;
}

TEST_F(Csv, MissingFileIsParseError) {
    parse_error_message([&] { io::read_matrix_csv(path("absent.csv")); });
}

TEST_F(Csv, DecreasingQuantileRowNamesRow) {
    const std::string p = write("q.csv", "0,1,2\n0,1,2\n0,2,1\n");
    const std::string msg = parse_error_message([&] { io::read_responses(p, ResponseKind::Quantile); });
    EXPECT_NE(msg.find(":3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("response 2"), std::string::npos) << msg;
}

TEST_F(Csv, SymMatrixNeedsHeader) {
    const std::string p = write("s.csv", "1,0,0,1\n");
    parse_error_message([&] { io::read_responses(p, ResponseKind::SymMatrix); });
    const std::string q = write("s2.csv", "# q=2\n1,0,0\n");
    parse_error_message([&] { io::read_responses(q, ResponseKind::SymMatrix); });
}

TEST_F(Csv, SphereRowsMustBeUnit) {
    const std::string p = write("s.csv", "1,0,0\n0.5,0.5,0\n");
    parse_error_message([&] { io::read_responses(p, ResponseKind::Sphere); });
}

TEST_F(Csv, ResponseRoundTripForEveryKind) {
    auto g = test::rng(112);
    std::vector<std::vector<ResponseObject>> samples(4);
    for (int i = 0; i < 5; ++i) {
        samples[0].emplace_back(VectorPoint{test::randn(3, 1, g).col(0)});
        samples[1].emplace_back(gaussian_quantile_distribution(test::uniform(-1, 1, g), 0.5, 20));
        samples[2].emplace_back(SymMatrixPoint{SymMatrix(test::randn(3, 3, g))});
        samples[3].emplace_back(SpherePoint::from_direction(test::randn(3, 1, g).col(0)));
    }
    for (auto& objs : samples) {
        const ResponseSample s(objs);
        io::write_responses(path("r.csv"), s);
        const ResponseSample back = io::read_responses(path("r.csv"), s.kind());
        ASSERT_EQ(back.size(), s.size());
        for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(distance(s[i], back[i]), 0.0) << to_string(s.kind());
    }
}

TEST(RunConfig, DefaultsWhenEmpty) {
    std::istringstream in("");
    const RunConfig c = parse_run_config(in);
    EXPECT_EQ(c.repetitions, 20);
    EXPECT_EQ(c.kernel.family, KernelFamily::Gaussian);
    EXPECT_EQ(c.kernel.rho_y, 10.0);
    EXPECT_FALSE(c.kernel.gamma_override.has_value());
    EXPECT_EQ(c.optimizer.max_iters, 500);
    EXPECT_EQ(c.scenario.n, 200);
    EXPECT_EQ(c.scenario.grid_m, 100);
    EXPECT_EQ(c.threads, 1);
}

TEST(RunConfig, ParsesEverySection) {
    std::istringstream in(
        "[scenario]\nscenario = II\nmodel = 2\npredictor_scheme = b\nn = 120\np = 8\nalpha_var = 0.4\nnu = 0.7\n"
        "grid_m = 50\nseed = 42\nnon_pd_policy = error\n"
        "[kernel]\nfamily = laplacian\nrho_y = 5\ngamma_override = 0.3\nsphere_metric = chordal\n"
        "[optimizer]\nmax_iters = 100\ntol = 1e-9\nls_shrink = 0.3\nls_init_step = 2\nls_armijo_c = 0.01\n"
        "ls_max_halvings = 12\nrestarts = 3\npair_norm_floor = 1e-10\n"
        "[bench]\nrepetitions = 7\nd = 2\noutput_dir = results\nthreads = 4\n");
    const RunConfig c = parse_run_config(in);
    EXPECT_EQ(c.scenario.scenario, sim::Scenario::II);
    EXPECT_EQ(c.scenario.model, 2);
    EXPECT_EQ(c.scenario.predictor_scheme, sim::PredictorScheme::B);
    EXPECT_EQ(c.scenario.n, 120);
    EXPECT_EQ(c.scenario.p, 8);
    EXPECT_EQ(c.scenario.alpha_var, 0.4);
    EXPECT_EQ(c.scenario.nu, 0.7);
    EXPECT_EQ(c.scenario.grid_m, 50);
    EXPECT_EQ(c.scenario.seed, 42u);
    EXPECT_EQ(c.scenario.non_pd_policy, sim::NonPdPolicy::Error);
    EXPECT_EQ(c.kernel.family, KernelFamily::Laplacian);
    EXPECT_EQ(c.kernel.rho_y, 5.0);
    EXPECT_EQ(c.kernel.gamma_override, 0.3);
    EXPECT_EQ(c.sphere_metric, SphereMetric::Chordal);
    EXPECT_EQ(c.optimizer.max_iters, 100);
    EXPECT_EQ(c.optimizer.tol, 1e-9);
    EXPECT_EQ(c.optimizer.ls_shrink, 0.3);
    EXPECT_EQ(c.optimizer.ls_init_step, 2.0);
    EXPECT_EQ(c.optimizer.ls_armijo_c, 0.01);
    EXPECT_EQ(c.optimizer.ls_max_halvings, 12);
    EXPECT_EQ(c.optimizer.restarts, 3);
    EXPECT_EQ(c.optimizer.pair_norm_floor, 1e-10);
    EXPECT_EQ(c.repetitions, 7);
    EXPECT_EQ(c.d, 2);
    EXPECT_EQ(c.output_dir, "results");
    EXPECT_EQ(c.threads, 4);
    EXPECT_NO_THROW(c.validate());
}

TEST(RunConfig, AutoKernelIsGaussian) {
    std::istringstream in("[kernel]\nfamily = auto\n");
    EXPECT_EQ(parse_run_config(in).kernel.family, KernelFamily::Gaussian);
}

TEST(RunConfig, RejectsUnknownKeysSectionsAndBadValues) {
    EXPECT_NE(config_error_message("[scenario]\nmodle = 1\n").find("modle"), std::string::npos);
    EXPECT_NE(config_error_message("[solver]\nx = 1\n").find("solver"), std::string::npos);
    EXPECT_NE(config_error_message("[bench]\nrepetitions = many\n").find("repetitions"), std::string::npos);
    EXPECT_NE(config_error_message("[kernel]\nfamily = rbf\n").find("family"), std::string::npos);
    EXPECT_NE(config_error_message("[scenario]\nseed = -3\n").find("seed"), std::string::npos);
    EXPECT_NE(config_error_message("[optimizer]\nmax_iters = 2.5\n").find("max_iters"), std::string::npos);
    config_error_message("[scenario\n");
}

TEST(RunConfig, ValidateFlagsInconsistentValues) {
    RunConfig c;
    c.repetitions = 0;
    EXPECT_THROW(c.validate(), Error);
    c = RunConfig{};
    c.scenario.scenario = sim::Scenario::II;
    c.scenario.predictor_scheme = sim::PredictorScheme::C;
    try {
        c.validate();
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Config);
    }
    c = RunConfig{};
    c.d = 11;
    EXPECT_THROW(c.validate(), Error);
    c = RunConfig{};
    c.optimizer.ls_shrink = 2;
    EXPECT_THROW(c.validate(), Error);
}
