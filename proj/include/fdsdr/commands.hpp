#pragma once

#include "fdsdr/config.hpp"
#include "fdsdr/error.hpp"
#include "fdsdr/estimator.hpp"
#include "fdsdr/io.hpp"
#include "fdsdr/simulation.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace fdsdr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitAllFailed = 3;

// =============================================================================
// JSON echoes
// =============================================================================

inline nlohmann::json to_json(const sim::ScenarioSpec& s) {
    return {{"scenario", sim::to_string(s.scenario)},
            {"model", s.model},
            {"predictor_scheme", std::string(1, sim::to_char(s.predictor_scheme))},
            {"n", s.n},
            {"p", s.p},
            {"alpha_var", s.alpha_var},
            {"nu", s.nu},
            {"grid_m", s.grid_m},
            {"seed", s.seed},
            {"non_pd_policy", to_string(s.non_pd_policy)},
            {"label", s.label()}};
}

inline nlohmann::json to_json(const OptimizerConfig& o) {
    return {{"max_iters", o.max_iters},       {"tol", o.tol},
            {"ls_shrink", o.ls_shrink},       {"ls_init_step", o.ls_init_step},
            {"ls_armijo_c", o.ls_armijo_c},   {"ls_max_halvings", o.ls_max_halvings},
            {"restarts", o.restarts},         {"pair_norm_floor", o.pair_norm_floor}};
}

inline nlohmann::json to_json(const KernelSpec& k) {
    nlohmann::json j = {{"family", to_string(k.family)}, {"rho_y", k.rho_y}};
    j["gamma"] = k.family == KernelFamily::Linear ? nlohmann::json(nullptr) : nlohmann::json(k.gamma);
    return j;
}

inline nlohmann::json to_json(const FitTrace& t) {
    return {{"objective_per_iter", t.objective_per_iter},
            {"iters_used", t.iters_used},
            {"converged", t.converged},
            {"restart_index_of_best", t.restart_index_of_best},
            {"restart_objectives", t.restart_objectives}};
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
    auto out = io::detail::open_for_write(path);
    out << j.dump(2) << '\n';
}

// =============================================================================
// simulate
// =============================================================================

/// Writes X.csv, responses.csv, truth.csv and manifest.json into output_dir.
inline void cmd_simulate(const RunConfig& config) {
    config.validate();
    const sim::Simulated s = sim::simulate(config.scenario);
    io::ensure_directory(config.output_dir);
    const std::string dir = config.output_dir + "/";
    io::write_matrix_csv(dir + "X.csv", s.data.x);
    io::write_responses(dir + "responses.csv", s.data.responses);
    io::write_matrix_csv(dir + "truth.csv", s.truth.s_basis);
    write_json(dir + "manifest.json", {{"spec", to_json(config.scenario)},
                                       {"seed", config.scenario.seed},
                                       {"response_kind", to_string(sim::response_kind(config.scenario.scenario))},
                                       {"d_true", s.truth.d_true},
                                       {"files", {"X.csv", "responses.csv", "truth.csv"}}});
}

// =============================================================================
// bench
// =============================================================================

struct BenchRecord {
    int repetition = 0;
    std::uint64_t seed = 0;
    double error = std::numeric_limits<double>::quiet_NaN();
    double fit_seconds = std::numeric_limits<double>::quiet_NaN();
    int iters = 0;
    double objective_final = std::numeric_limits<double>::quiet_NaN();
    std::string status = "ok";

    [[nodiscard]] bool ok() const { return status == "ok"; }
};

struct BenchSummary {
    double error_mean = std::numeric_limits<double>::quiet_NaN();
    double error_sd = std::numeric_limits<double>::quiet_NaN();
    double fit_seconds_mean = std::numeric_limits<double>::quiet_NaN();
    double fit_seconds_sd = std::numeric_limits<double>::quiet_NaN();
    int successes = 0;
    int failures = 0;
};

/// One generate + fit cycle. Dataset and optimizer share the seed
/// base_seed + repetition; only the fit call is timed.
inline BenchRecord run_repetition(const RunConfig& config, int repetition) {
    BenchRecord rec;
    rec.repetition = repetition;
    rec.seed = config.scenario.seed + static_cast<std::uint64_t>(repetition);
    try {
        sim::ScenarioSpec spec = config.scenario;
        spec.seed = rec.seed;
        const sim::Simulated s = sim::simulate(spec);
        FitOptions options;
        options.sphere_metric = config.sphere_metric;
        const auto t0 = std::chrono::steady_clock::now();
        const SubspaceEstimate est =
            fit(s.data, config.kernel, config.target_dim(s.truth.d_true), config.optimizer, rec.seed, options);
        rec.fit_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rec.error = subspace_error(s.truth.s_basis, est.beta_hat);
        rec.iters = est.trace.iters_used;
        rec.objective_final = est.trace.objective_per_iter.back();
    } catch (const std::exception& e) {
        rec.status = e.what();
        rec.error = rec.fit_seconds = rec.objective_final = std::numeric_limits<double>::quiet_NaN();
        rec.iters = 0;
    }
    return rec;
}

/// Runs every repetition on a pool of config.threads workers. Records come
/// back in repetition order whatever the scheduling.
inline std::vector<BenchRecord> run_bench(const RunConfig& config) {
    config.validate();
    std::vector<BenchRecord> records(static_cast<std::size_t>(config.repetitions));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int r = next++; r < config.repetitions; r = next++) records[static_cast<std::size_t>(r)] = run_repetition(config, r);
    };
    const int workers = std::min(config.threads, config.repetitions);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return records;
}

namespace detail {

inline std::pair<double, double> mean_sd(const std::vector<double>& v) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (v.empty()) return {nan, nan};
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    if (v.size() < 2) return {mean, nan};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

inline std::string csv_field(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return out;
}

}  // namespace detail

/// Mean and sample standard deviation (n - 1) over successful repetitions.
inline BenchSummary summarize(const std::vector<BenchRecord>& records) {
    std::vector<double> errors, seconds;
    BenchSummary s;
    for (const auto& r : records) {
        if (!r.ok()) {
            ++s.failures;
            continue;
        }
        ++s.successes;
        errors.push_back(r.error);
        seconds.push_back(r.fit_seconds);
    }
    std::tie(s.error_mean, s.error_sd) = detail::mean_sd(errors);
    std::tie(s.fit_seconds_mean, s.fit_seconds_sd) = detail::mean_sd(seconds);
    return s;
}

inline void write_results_csv(const std::string& path, const std::vector<BenchRecord>& records) {
    auto out = io::detail::open_for_write(path);
    out << "repetition,seed,error,fit_seconds,iters,objective_final,status\n";
    for (const auto& r : records)
        out << r.repetition << ',' << r.seed << ',' << io::format_double(r.error) << ','
            << io::format_double(r.fit_seconds) << ',' << r.iters << ',' << io::format_double(r.objective_final)
            << ',' << detail::csv_field(r.status) << '\n';
}

inline void write_summary_csv(const std::string& path, const BenchSummary& s) {
    auto out = io::detail::open_for_write(path);
    out << "quantity,mean,sd,successes,failures\n";
    out << "error," << io::format_double(s.error_mean) << ',' << io::format_double(s.error_sd) << ','
        << s.successes << ',' << s.failures << '\n';
    out << "fit_seconds," << io::format_double(s.fit_seconds_mean) << ',' << io::format_double(s.fit_seconds_sd)
        << ',' << s.successes << ',' << s.failures << '\n';
}

struct BenchOutcome {
    std::vector<BenchRecord> records;
    BenchSummary summary;
    int exit_code = kExitOk;
};

/// Runs the benchmark and writes results.csv, summary.csv and bench.json.
inline BenchOutcome cmd_bench(const RunConfig& config) {
    BenchOutcome out;
    out.records = run_bench(config);
    out.summary = summarize(out.records);
    io::ensure_directory(config.output_dir);
    const std::string dir = config.output_dir + "/";
    write_results_csv(dir + "results.csv", out.records);
    write_summary_csv(dir + "summary.csv", out.summary);
    write_json(dir + "bench.json", {{"spec", to_json(config.scenario)},
                                    {"kernel_family", to_string(config.kernel.family)},
                                    {"rho_y", config.kernel.rho_y},
                                    {"gamma_override", config.kernel.gamma_override
                                                           ? nlohmann::json(*config.kernel.gamma_override)
                                                           : nlohmann::json(nullptr)},
                                    {"sphere_metric", to_string(config.sphere_metric)},
                                    {"optimizer", to_json(config.optimizer)},
                                    {"repetitions", config.repetitions},
                                    {"d", config.d},
                                    {"threads", config.threads}});
    out.exit_code = out.summary.successes == 0 ? kExitAllFailed : kExitOk;
    return out;
}

// =============================================================================
// fit
// =============================================================================

struct FitRequest {
    std::string x_path;
    std::string responses_path;
    ResponseKind kind = ResponseKind::Vector;
    Index d = 1;
    KernelRequest kernel;
    SphereMetric sphere_metric = SphereMetric::Geodesic;
    OptimizerConfig optimizer;
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    std::optional<std::string> truth_path;
};

struct FitOutcome {
    SubspaceEstimate estimate;
    std::optional<double> error;
};

/// Fits user data and writes beta_hat.csv, projected.csv and trace.json.
inline FitOutcome cmd_fit(const FitRequest& req) {
    Dataset data{io::read_matrix_csv(req.x_path), io::read_responses(req.responses_path, req.kind)};
    data.validate();
    std::optional<Matrix> truth;
    if (req.truth_path) {
        truth = io::read_matrix_csv(*req.truth_path);
        fdsdr::detail::require(truth->rows() == data.x.cols(), ErrorKind::InvalidInput,
                        "truth basis has " + std::to_string(truth->rows()) + " rows but X has " +
                            std::to_string(data.x.cols()) + " columns");
    }
    FitOptions options;
    options.sphere_metric = req.sphere_metric;
    FitOutcome out{fit(data, req.kernel, req.d, req.optimizer, req.seed, options), std::nullopt};
    if (truth) out.error = subspace_error(*truth, out.estimate.beta_hat);

    io::ensure_directory(req.out_dir);
    const std::string dir = req.out_dir + "/";
    io::write_matrix_csv(dir + "beta_hat.csv", out.estimate.beta_hat);
    io::write_matrix_csv(dir + "projected.csv", data.x * out.estimate.beta_hat);
    write_json(dir + "trace.json",
               {{"n", data.x.rows()},
                {"p", data.x.cols()},
                {"d", req.d},
                {"response_kind", to_string(req.kind)},
                {"seed", req.seed},
                {"kernel", to_json(out.estimate.kernel_used)},
                {"sphere_metric", to_string(req.sphere_metric)},
                {"optimizer", to_json(req.optimizer)},
                {"trace", to_json(out.estimate.trace)},
                {"subspace_error", out.error ? nlohmann::json(*out.error) : nlohmann::json(nullptr)}});
    return out;
}

}  // namespace fdsdr::cli
