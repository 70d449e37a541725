#pragma once

#include "fdsdr/dcov.hpp"
#include "fdsdr/error.hpp"
#include "fdsdr/linalg.hpp"
#include "fdsdr/rng.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace fdsdr {

// =============================================================================
// Configuration and diagnostics
// =============================================================================

struct OptimizerConfig {
    int max_iters = 500;
    double tol = 1e-7;  // on |F(C_next) - F(C)|
    double ls_shrink = 0.5;
    double ls_init_step = 1.0;
    double ls_armijo_c = 1e-4;
    int ls_max_halvings = 30;
    int restarts = 5;
    double pair_norm_floor = 1e-12;

    void validate() const {
        detail::require(max_iters > 0, ErrorKind::InvalidInput, "max_iters must be positive");
        detail::require(tol > 0.0, ErrorKind::InvalidInput, "tol must be positive");
        detail::require(ls_shrink > 0.0 && ls_shrink < 1.0, ErrorKind::InvalidInput, "ls_shrink must lie in (0,1)");
        detail::require(ls_init_step > 0.0, ErrorKind::InvalidInput, "ls_init_step must be positive");
        detail::require(ls_armijo_c > 0.0, ErrorKind::InvalidInput, "ls_armijo_c must be positive");
        detail::require(ls_max_halvings > 0, ErrorKind::InvalidInput, "ls_max_halvings must be positive");
        detail::require(restarts > 0, ErrorKind::InvalidInput, "restarts must be positive");
        detail::require(pair_norm_floor > 0.0, ErrorKind::InvalidInput, "pair_norm_floor must be positive");
    }
};

struct FitTrace {
    std::vector<double> objective_per_iter;  // F(C0), then one entry per accepted step
    int iters_used = 0;
    bool converged = false;
    int restart_index_of_best = 0;
    std::vector<double> restart_objectives;  // final F of every restart
};

/// Gradient norm below which a point is treated as stationary.
inline constexpr double kStationaryGradNorm = 1e-12;

// =============================================================================
// Subgradient
// =============================================================================

/// (1/n^2) sum_{k != l} Btilde_kl (Z_k - Z_l)(Z_k - Z_l)^T C / ||C^T (Z_k - Z_l)||.
///
/// Pairs whose projected difference is at or below pair_norm_floor contribute
/// zero. The pair sum is folded into Z^T R with R_k = sum_l c_kl (W_k - W_l),
/// W = Z C, so the cost is O(n^2 d + n p d).
inline Matrix subgradient(const Matrix& c, const Matrix& z, const CenteredMatrix& b_tilde, double pair_norm_floor) {
    detail::require(c.rows() == z.cols(), ErrorKind::InvalidInput, "subgradient: C rows must equal Z columns");
    detail::require(b_tilde.size() == z.rows(), ErrorKind::InvalidInput, "subgradient: Btilde must be n x n");
    const Index n = z.rows();
    const Index d = c.cols();
    const Matrix wt = (z * c).transpose();  // d x n, columns contiguous
    const Matrix& bt = b_tilde.matrix();
    Matrix r = Matrix::Zero(d, n);
    for (Index k = 0; k < n; ++k) {
        for (Index l = k + 1; l < n; ++l) {
            const double norm = (wt.col(k) - wt.col(l)).norm();
            if (norm <= pair_norm_floor) continue;
            const double weight = bt(k, l) / norm;
            r.col(k) += weight * (wt.col(k) - wt.col(l));
            r.col(l) += weight * (wt.col(l) - wt.col(k));
        }
    }
    return (2.0 / static_cast<double>(n * n)) * (z.transpose() * r.transpose());
}

inline Matrix subgradient(const StiefelPoint& c, const Matrix& z, const CenteredMatrix& b_tilde,
                          double pair_norm_floor) {
    return subgradient(c.matrix(), z, b_tilde, pair_norm_floor);
}

// =============================================================================
// Backtracking line search
// =============================================================================

struct LineSearchContext {
    const Matrix& z;
    const CenteredMatrix& b_tilde;
    const OptimizerConfig& config;
    double f_current;
};

struct LineSearchResult {
    double step = 0.0;
    StiefelPoint c_next;
    double f_next = 0.0;
};

/// Tries t = t0, t0 s, t0 s^2, ... with t0 = ls_init_step / ||G||_F, so the
/// first trial moves C by ls_init_step in Frobenius norm whatever the scale of
/// F. Accepts the first t with F(P(C + t G)) >= F(C) + c t ||G||_F^2; returns
/// C unchanged with step 0 when nothing is accepted.
inline LineSearchResult line_search(const StiefelPoint& c, const Matrix& g, const LineSearchContext& ctx) {
    detail::require(g.allFinite(), ErrorKind::InvalidInput, "line_search: non-finite direction");
    const double g_sq = g.squaredNorm();
    LineSearchResult rejected{0.0, c, ctx.f_current};
    if (std::sqrt(g_sq) < kStationaryGradNorm) return rejected;

    double t = ctx.config.ls_init_step / std::sqrt(g_sq);
    for (int trial = 0; trial < ctx.config.ls_max_halvings; ++trial, t *= ctx.config.ls_shrink) {
        StiefelPoint candidate;
        try {
            candidate = stiefel_project(c.matrix() + t * g);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::DegenerateProjection) throw;
            continue;
        }
        const double f = objective_F(candidate.matrix(), ctx.z, ctx.b_tilde);
        if (f >= ctx.f_current + ctx.config.ls_armijo_c * t * g_sq) return {t, std::move(candidate), f};
    }
    return rejected;
}

// =============================================================================
// Multi-start projected subgradient ascent
// =============================================================================

/// Called once per iterate (including the initialization) of every restart.
using IterateObserver = std::function<void(int restart, int iter, const StiefelPoint& c, double objective)>;

inline StiefelPoint random_stiefel_point(Index p, Index d, Rng& rng) {
    for (int attempt = 0; attempt < 16; ++attempt) {
        try {
            return stiefel_project(gaussian_matrix(p, d, rng));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::DegenerateProjection) throw;
        }
    }
    throw Error(ErrorKind::DegenerateProjection, "could not draw a full-rank initialization");
}

struct DirectionFit {
    StiefelPoint c;
    FitTrace trace;
};

namespace detail {

struct RestartResult {
    StiefelPoint c;
    std::vector<double> objectives;
    int iters_used = 0;
    bool converged = false;
    bool failed_at_start = false;
};

inline RestartResult run_restart(const StiefelPoint& c0, const Matrix& z, const CenteredMatrix& b_tilde,
                                 const OptimizerConfig& config, int restart, const IterateObserver& observer) {
    RestartResult out;
    out.c = c0;
    double f = objective_F(c0.matrix(), z, b_tilde);
    out.objectives.push_back(f);
    if (observer) observer(restart, 0, out.c, f);

    for (int iter = 0; iter < config.max_iters; ++iter) {
        const Matrix g = subgradient(out.c.matrix(), z, b_tilde, config.pair_norm_floor);
        LineSearchResult ls = line_search(out.c, g, {z, b_tilde, config, f});
        out.iters_used = iter + 1;
        if (ls.step == 0.0) {
            // Stall: no ascent step found, treated as a stationary point.
            out.converged = true;
            out.failed_at_start = iter == 0 && g.norm() >= kStationaryGradNorm;
            return out;
        }
        const double delta = ls.f_next - f;
        out.c = std::move(ls.c_next);
        f = ls.f_next;
        out.objectives.push_back(f);
        if (observer) observer(restart, iter + 1, out.c, f);
        if (std::abs(delta) <= config.tol) {
            out.converged = true;
            return out;
        }
    }
    return out;
}

}  // namespace detail

/// Maximizes F over St(d, p) from `restarts` seeded random starts and returns
/// the restart with the highest final objective.
inline DirectionFit fit_direction(const Matrix& z, const CenteredMatrix& b_tilde, Index d,
                                  const OptimizerConfig& config, std::uint64_t seed,
                                  const IterateObserver& observer = {}) {
    config.validate();
    const Index n = z.rows();
    const Index p = z.cols();
    detail::require(d >= 1 && d <= p, ErrorKind::InvalidInput,
                    "target dimension d=" + std::to_string(d) + " must satisfy 1 <= d <= p=" + std::to_string(p));
    detail::require(n >= 4, ErrorKind::InvalidInput, "fit_direction needs n >= 4");
    detail::require(b_tilde.size() == n, ErrorKind::InvalidInput, "Btilde must be n x n");

    DirectionFit best;
    double best_f = -std::numeric_limits<double>::infinity();
    int failures = 0;
    for (int r = 0; r < config.restarts; ++r) {
        Rng rng = make_rng(seed, static_cast<std::uint64_t>(r));
        detail::RestartResult res = detail::run_restart(random_stiefel_point(p, d, rng), z, b_tilde, config, r, observer);
        failures += res.failed_at_start ? 1 : 0;
        const double f = res.objectives.back();
        best.trace.restart_objectives.push_back(f);
        if (f > best_f) {
            best_f = f;
            best.c = std::move(res.c);
            best.trace.objective_per_iter = std::move(res.objectives);
            best.trace.iters_used = res.iters_used;
            best.trace.converged = res.converged;
            best.trace.restart_index_of_best = r;
        }
    }
    if (failures == config.restarts)
        throw Error(ErrorKind::OptimizationFailure, "every restart stalled at its first iteration");
    return best;
}

}  // namespace fdsdr
