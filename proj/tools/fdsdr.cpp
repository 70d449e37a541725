// fdsdr: simulate datasets, run seeded benchmarks, fit user data.

#include "fdsdr/commands.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace fdsdr;

struct GlobalFlags {
    std::optional<std::string> config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> reps;
    std::optional<std::string> out;
    std::optional<int> threads;
};

struct FitFlags {
    std::string x_path;
    std::string responses_path;
    std::string kind;
    Index d = 1;
    std::optional<std::string> kernel;
    std::optional<double> rho_y;
    std::optional<double> gamma;
    std::optional<std::string> sphere_metric;
    std::optional<std::string> truth;
};

RunConfig build_config(const GlobalFlags& g) {
    RunConfig c = g.config_path ? load_run_config(*g.config_path) : RunConfig{};
    if (g.seed) c.scenario.seed = *g.seed;
    if (g.reps) c.repetitions = *g.reps;
    if (g.out) c.output_dir = *g.out;
    if (g.threads) c.threads = *g.threads;
    c.validate();
    return c;
}

cli::FitRequest build_fit_request(const RunConfig& c, const GlobalFlags& g, const FitFlags& f) {
    cli::FitRequest req;
    try {
        req.kind = parse_response_kind(f.kind);
        req.kernel = c.kernel;
        if (f.kernel) req.kernel.family = *f.kernel == "auto" ? KernelFamily::Gaussian : parse_kernel_family(*f.kernel);
        if (f.rho_y) req.kernel.rho_y = *f.rho_y;
        if (f.gamma) req.kernel.gamma_override = *f.gamma;
        req.sphere_metric = f.sphere_metric ? parse_sphere_metric(*f.sphere_metric) : c.sphere_metric;
        KernelSpec{req.kernel.family, req.kernel.gamma_override.value_or(1.0), req.kernel.rho_y}.validate();
    } catch (const Error& e) {
        throw Error(ErrorKind::Config, e.what());
    }
    req.x_path = f.x_path;
    req.responses_path = f.responses_path;
    req.d = f.d;
    req.optimizer = c.optimizer;
    req.seed = g.seed.value_or(c.scenario.seed);
    req.out_dir = c.output_dir;
    req.truth_path = f.truth;
    return req;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frechet sufficient dimension reduction via kernel distance covariance"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalFlags g;
    app.add_option("--config", g.config_path, "INI run-config file");
    app.add_option("--seed", g.seed, "base seed (overrides [scenario] seed)");
    app.add_option("--reps", g.reps, "repetitions (overrides [bench] repetitions)");
    app.add_option("--out", g.out, "output directory (overrides [bench] output_dir)");
    app.add_option("--threads", g.threads, "worker threads (overrides [bench] threads)");

    auto* simulate = app.add_subcommand("simulate", "write X.csv, responses.csv, truth.csv, manifest.json");
    auto* bench = app.add_subcommand("bench", "seeded generate+fit repetitions; writes results.csv, summary.csv");
    auto* fit = app.add_subcommand("fit", "fit user-supplied CSV data");

    FitFlags f;
    fit->add_option("--x", f.x_path, "predictor matrix CSV (n x p)")->required();
    fit->add_option("--responses", f.responses_path, "responses CSV")->required();
    fit->add_option("--kind", f.kind, "vector | quantile | symmatrix | sphere")->required();
    fit->add_option("--d", f.d, "target dimension")->required();
    fit->add_option("--kernel", f.kernel, "gaussian | laplacian | linear | auto");
    fit->add_option("--rho-y", f.rho_y, "bandwidth multiplier");
    fit->add_option("--gamma", f.gamma, "fixed kernel bandwidth");
    fit->add_option("--sphere-metric", f.sphere_metric, "geodesic | chordal");
    fit->add_option("--truth", f.truth, "true basis CSV (p x d) for subspace_error");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kExitConfig;
    }

    RunConfig config;
    std::optional<cli::FitRequest> fit_request;
    try {
        config = build_config(g);
        if (fit->parsed()) fit_request = build_fit_request(config, g, f);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kExitConfig;
    }

    try {
        if (simulate->parsed()) {
            cli::cmd_simulate(config);
            std::cout << "wrote " << config.scenario.label() << " dataset to " << config.output_dir << '\n';
            return cli::kExitOk;
        }
        if (bench->parsed()) {
            const cli::BenchOutcome out = cli::cmd_bench(config);
            std::cout << config.scenario.label() << ": " << out.summary.successes << "/" << config.repetitions
                      << " ok, mean error " << io::format_double(out.summary.error_mean) << ", mean fit "
                      << io::format_double(out.summary.fit_seconds_mean) << " s\n";
            for (const auto& r : out.records)
                if (!r.ok()) std::cerr << "repetition " << r.repetition << ": " << r.status << '\n';
            return out.exit_code;
        }
        const cli::FitOutcome out = cli::cmd_fit(*fit_request);
        std::cout << "F = " << io::format_double(out.estimate.trace.objective_per_iter.back()) << " after "
                  << out.estimate.trace.iters_used << " iterations";
        if (out.error) std::cout << ", subspace_error = " << io::format_double(*out.error);
        std::cout << '\n';
        return cli::kExitOk;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.kind() == ErrorKind::Config ? cli::kExitConfig : cli::kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kExitFailure;
    }
}
