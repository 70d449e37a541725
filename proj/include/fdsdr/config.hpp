#pragma once

#include "fdsdr/error.hpp"
#include "fdsdr/kernels.hpp"
#include "fdsdr/metric_spaces.hpp"
#include "fdsdr/optimizer.hpp"
#include "fdsdr/simulation.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

// =============================================================================
// Run configuration (INI)
//
//   [scenario]  scenario, model, predictor_scheme, n, p, alpha_var, nu, grid_m,
//               seed, non_pd_policy (resample|error)
//   [kernel]    family (gaussian|laplacian|linear|auto), rho_y, gamma_override,
//               sphere_metric (geodesic|chordal)
//   [optimizer] max_iters, tol, ls_shrink, ls_init_step, ls_armijo_c,
//               ls_max_halvings, restarts, pair_norm_floor
//   [bench]     repetitions, d, output_dir, threads
//
// Unknown sections or keys are rejected so typos never pass silently.
// =============================================================================

namespace fdsdr {

struct RunConfig {
    sim::ScenarioSpec scenario;
    KernelRequest kernel;
    SphereMetric sphere_metric = SphereMetric::Geodesic;
    OptimizerConfig optimizer;
    int repetitions = 20;
    Index d = 0;  // 0: the scenario's true dimension
    std::string output_dir = "out";
    int threads = 1;

    [[nodiscard]] Index target_dim(Index d_true) const { return d > 0 ? d : d_true; }

    void validate() const {
        try {
            scenario.validate();
            optimizer.validate();
            KernelSpec{kernel.family, kernel.gamma_override.value_or(1.0), kernel.rho_y}.validate();
        } catch (const Error& e) {
            throw Error(ErrorKind::Config, e.what());
        }
        detail::require(repetitions >= 1, ErrorKind::Config, "repetitions must be >= 1");
        detail::require(d >= 0 && d <= scenario.p, ErrorKind::Config, "d must lie in [1, p] (0 selects the true d)");
        detail::require(threads >= 1, ErrorKind::Config, "threads must be >= 1");
        detail::require(!output_dir.empty(), ErrorKind::Config, "output_dir must not be empty");
    }
};

inline SphereMetric parse_sphere_metric(const std::string& s) {
    if (s == "geodesic") return SphereMetric::Geodesic;
    if (s == "chordal") return SphereMetric::Chordal;
    throw Error(ErrorKind::InvalidInput, "unknown sphere metric '" + s + "'");
}

inline const char* to_string(SphereMetric m) { return m == SphereMetric::Geodesic ? "geodesic" : "chordal"; }

inline sim::NonPdPolicy parse_non_pd_policy(const std::string& s) {
    if (s == "resample") return sim::NonPdPolicy::Resample;
    if (s == "error") return sim::NonPdPolicy::Error;
    throw Error(ErrorKind::InvalidInput, "unknown non_pd_policy '" + s + "'");
}

inline const char* to_string(sim::NonPdPolicy p) { return p == sim::NonPdPolicy::Resample ? "resample" : "error"; }

namespace detail {

template <class T>
T parse_value(const std::string& section, const std::string& key, const std::string& raw) {
    if constexpr (std::is_unsigned_v<T>) {
        if (raw.find('-') != std::string::npos)
            throw Error(ErrorKind::Config, "[" + section + "] " + key + ": must be non-negative, got '" + raw + "'");
    }
    std::istringstream in(raw);
    T value{};
    in >> value;
    if (in.fail() || !(in >> std::ws).eof())
        throw Error(ErrorKind::Config, "[" + section + "] " + key + ": cannot parse '" + raw + "'");
    return value;
}

using KeyHandler = std::function<void(const std::string&)>;

inline void apply_section(const boost::property_tree::ptree& tree, const std::string& section,
                          const std::map<std::string, KeyHandler>& handlers) {
    for (const auto& [key, node] : tree) {
        const auto it = handlers.find(key);
        if (it == handlers.end()) throw Error(ErrorKind::Config, "unknown key [" + section + "] " + key);
        try {
            it->second(node.data());
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Config) throw;
            throw Error(ErrorKind::Config, "[" + section + "] " + key + ": " + e.what());
        }
    }
}

}  // namespace detail

/// Applies INI text on top of the defaults in `base`.
inline RunConfig parse_run_config(std::istream& in, RunConfig base = {}) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw Error(ErrorKind::Config, std::string("malformed config: ") + e.what());
    }

    RunConfig c = std::move(base);
    auto num = [](const std::string& sec, const std::string& key, auto& field) {
        return detail::KeyHandler([&field, sec, key](const std::string& raw) {
            field = detail::parse_value<std::decay_t<decltype(field)>>(sec, key, raw);
        });
    };

    for (const auto& [section, body] : tree) {
        if (section == "scenario") {
            auto& s = c.scenario;
            detail::apply_section(body, section,
                                  {{"scenario", [&](const std::string& v) { s.scenario = sim::parse_scenario(v); }},
                                   {"model", num(section, "model", s.model)},
                                   {"predictor_scheme",
                                    [&](const std::string& v) { s.predictor_scheme = sim::parse_scheme(v); }},
                                   {"n", num(section, "n", s.n)},
                                   {"p", num(section, "p", s.p)},
                                   {"alpha_var", num(section, "alpha_var", s.alpha_var)},
                                   {"nu", num(section, "nu", s.nu)},
                                   {"grid_m", num(section, "grid_m", s.grid_m)},
                                   {"seed", num(section, "seed", s.seed)},
                                   {"non_pd_policy",
                                    [&](const std::string& v) { s.non_pd_policy = parse_non_pd_policy(v); }}});
        } else if (section == "kernel") {
            detail::apply_section(
                body, section,
                {{"family",
                  [&](const std::string& v) {
                      c.kernel.family = v == "auto" ? KernelFamily::Gaussian : parse_kernel_family(v);
                  }},
                 {"rho_y", num(section, "rho_y", c.kernel.rho_y)},
                 {"gamma_override",
                  [&](const std::string& v) {
                      c.kernel.gamma_override = detail::parse_value<double>(section, "gamma_override", v);
                  }},
                 {"sphere_metric", [&](const std::string& v) { c.sphere_metric = parse_sphere_metric(v); }}});
        } else if (section == "optimizer") {
            auto& o = c.optimizer;
            detail::apply_section(body, section,
                                  {{"max_iters", num(section, "max_iters", o.max_iters)},
                                   {"tol", num(section, "tol", o.tol)},
                                   {"ls_shrink", num(section, "ls_shrink", o.ls_shrink)},
                                   {"ls_init_step", num(section, "ls_init_step", o.ls_init_step)},
                                   {"ls_armijo_c", num(section, "ls_armijo_c", o.ls_armijo_c)},
                                   {"ls_max_halvings", num(section, "ls_max_halvings", o.ls_max_halvings)},
                                   {"restarts", num(section, "restarts", o.restarts)},
                                   {"pair_norm_floor", num(section, "pair_norm_floor", o.pair_norm_floor)}});
        } else if (section == "bench") {
            detail::apply_section(body, section,
                                  {{"repetitions", num(section, "repetitions", c.repetitions)},
                                   {"d", num(section, "d", c.d)},
                                   {"output_dir", [&](const std::string& v) { c.output_dir = v; }},
                                   {"threads", num(section, "threads", c.threads)}});
        } else {
            throw Error(ErrorKind::Config, "unknown section [" + section + "]");
        }
    }
    return c;
}

inline RunConfig load_run_config(const std::string& path, RunConfig base = {}) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Config, "cannot open config " + path);
    return parse_run_config(in, std::move(base));
}

}  // namespace fdsdr
