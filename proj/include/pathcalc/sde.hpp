#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pathcalc/errors.hpp"
#include "pathcalc/grid_path.hpp"
#include "pathcalc/holder.hpp"
#include "pathcalc/young.hpp"

namespace pathcalc {

/// Drift/diffusion evaluators with their Lipschitz data.  lip_b bounds the
/// Lipschitz constant of b in (t, x); lip_sigma is a common Lipschitz
/// constant for sigma, sigma_t and sigma_x on the working region.  The
/// derivative evaluators are user-supplied; nothing is differentiated
/// automatically.
struct CoefficientField {
    std::function<double(double, double)> b;
    std::function<double(double, double)> sigma;
    std::function<double(double, double)> sigma_t;
    std::function<double(double, double)> sigma_x;
    double lip_b = 0.0;
    double lip_sigma = 0.0;
    std::optional<double> bound_b;      // sup |b| on the working region, if known
    std::optional<double> bound_sigma;  // sup |sigma| on the working region, if known
};

struct SolverConfig {
    double beta = 0.0;                // target solution exponent
    double gamma = 0.0;               // driver exponent
    double K = 0.0;                   // Holder ball radius; <= 0 selects the default
    double L = 0.0;                   // driver coefficient; <= 0 selects the default
    double contraction_margin = 0.9;  // required bound on the Eq.-type contraction factor
    double picard_tol = 1e-10;
    int max_picard_iters = 200;

    void validate() const {
        if (!(gamma > 0.5) || gamma > 1.0)
            throw hypothesis_error("SolverConfig: need 1/2 < gamma <= 1");
        if (!(gamma > beta) || !(beta > 1.0 - gamma))
            throw hypothesis_error("SolverConfig: need gamma > beta > 1 - gamma");
        if (!(contraction_margin > 0.0) || contraction_margin >= 1.0)
            throw hypothesis_error("SolverConfig: contraction margin must lie in (0,1)");
        if (!(picard_tol > 0.0) || max_picard_iters < 1)
            throw hypothesis_error("SolverConfig: bad Picard parameters");
    }
};

/// Left-hand side of the ball-preservation condition: F maps C_K^beta into
/// itself when this is <= K.
inline double ball_condition_lhs(double eps, double b_abs, double sigma_abs,
                                 const CoefficientField& c, double L, double K, double beta,
                                 double gamma) {
    const double eb = std::pow(eps, beta);
    return std::pow(eps, gamma - beta) * (1.0 + eb) *
           ((b_abs + c.lip_b * (eps + K * eb)) * std::pow(eps, 1.0 - gamma) +
            L * (1.0 + eb / (std::exp2(beta + gamma) - 2.0)) *
                (sigma_abs + c.lip_sigma * (1.0 + eb) * (std::pow(eps, 1.0 - beta) + K)));
}

/// Coefficient of ||X - Y||_beta in the contraction estimate; F is a
/// contraction when this is < 1.
inline double contraction_lhs(double eps, const CoefficientField& c, double L, double K,
                              double beta, double gamma) {
    const double eb = std::pow(eps, beta);
    return std::pow(eps, gamma - beta) * (1.0 + eb) *
           (c.lip_b * std::pow(eps, 1.0 - gamma) +
            L * c.lip_sigma * (2.0 + std::pow(eps, 1.0 - beta) + K) *
                (1.0 + eb / (std::exp2(beta + gamma) - 2.0)));
}

struct StepRecord {
    double s;
    double eps;
    int iters;
    double residual;
    double contraction;           // last measured Picard ratio
    double contraction_bound;     // contraction_lhs at the chosen eps
};

struct Solution {
    GridPath path;
    std::vector<StepRecord> steps;
    SolverConfig config;  // with K and L resolved
    std::uint64_t driver_hash = 0;

    nlohmann::json diagnostics() const {
        nlohmann::json js = nlohmann::json::array();
        for (const auto& st : steps)
            js.push_back({{"s", st.s},
                          {"eps", st.eps},
                          {"iters", st.iters},
                          {"residual", st.residual},
                          {"contraction", st.contraction}});
        char hash[19];
        std::snprintf(hash, sizeof hash, "0x%016llx",
                      static_cast<unsigned long long>(driver_hash));
        return {{"steps", js},
                {"config",
                 {{"beta", config.beta},
                  {"gamma", config.gamma},
                  {"K", config.K},
                  {"L", config.L},
                  {"contraction_margin", config.contraction_margin},
                  {"picard_tol", config.picard_tol},
                  {"max_picard_iters", config.max_picard_iters}}},
                {"driver_hash", hash}};
    }
};

namespace detail {

inline double step_norm_beta(const std::vector<double>& v, double h, double beta) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    const std::size_t n = v.size() - 1;
    double best = 0.0;
    for (std::size_t d = 1; d <= n; ++d) {
        double mi = 0.0;
        for (std::size_t i = 0; i + d <= n; ++i)
            mi = std::max(mi, std::abs(v[i + d] - v[i]));
        best = std::max(best, mi / std::pow(static_cast<double>(d) * h, beta));
    }
    return m + best;
}

inline double step_holder_coeff(const std::vector<double>& v, double h, double beta) {
    const std::size_t n = v.size() - 1;
    double best = 0.0;
    for (std::size_t d = 1; d <= n; ++d) {
        double mi = 0.0;
        for (std::size_t i = 0; i + d <= n; ++i)
            mi = std::max(mi, std::abs(v[i + d] - v[i]));
        best = std::max(best, mi / std::pow(static_cast<double>(d) * h, beta));
    }
    return best;
}

}  // namespace detail

/// Largest grid-aligned cell count c such that eps = c * cell satisfies both
/// step conditions; found by bisection (both left-hand sides are increasing
/// in eps).  Throws step_error if even one cell fails.
inline std::size_t step_cells(double s, double x_s, const CoefficientField& coeffs, double L,
                              const SolverConfig& cfg, std::size_t remaining_cells,
                              double cell) {
    const double b_abs = std::abs(coeffs.b(s, x_s));
    const double sigma_abs = std::abs(coeffs.sigma(s, x_s));
    auto ok = [&](std::size_t c) {
        const double eps = static_cast<double>(c) * cell;
        return ball_condition_lhs(eps, b_abs, sigma_abs, coeffs, L, cfg.K, cfg.beta,
                                  cfg.gamma) <= cfg.K &&
               contraction_lhs(eps, coeffs, L, cfg.K, cfg.beta, cfg.gamma) <=
                   cfg.contraction_margin;
    };
    if (!ok(1))
        throw step_error(
            "step conditions unsatisfiable at one grid cell (t = " + std::to_string(s) +
            "); use a finer grid or a larger ball radius K");
    std::size_t lo = 1, hi = remaining_cells;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo + 1) / 2;
        if (ok(mid))
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

/// Time-valued wrapper around step_cells.
inline double step_size(double s, double x_s, const CoefficientField& coeffs, double L,
                        const SolverConfig& cfg, double remaining, double cell) {
    const auto cells = static_cast<std::size_t>(std::floor(remaining / cell + 1e-12));
    if (cells == 0) throw step_error("step_size: remaining horizon shorter than one cell");
    return static_cast<double>(step_cells(s, x_s, coeffs, L, cfg, cells, cell)) * cell;
}

enum class PicardStart {
    constant,  // X_0 = a, which lies in every ball
    ramp,      // X_0 = a + slope (t - s), slope chosen inside the ball
};

struct StepResult {
    std::vector<double> values;  // nodes i0 .. i0 + cells of the driver grid
    int iters;
    double residual;
    double contraction;
};

/// Picard iteration for the integral operator
///   (F X)(t) = a + int_s^t b(tau, X) dtau + int_s^t sigma(tau, X) dg
/// on the step [i0, i0 + cells] of the driver grid, integrals at full grid
/// resolution.  Stops when ||X_{m+1} - X_m||_beta < picard_tol.
inline StepResult picard_solve_step(double a, const GridPath& g, std::size_t i0,
                                    std::size_t cells, const CoefficientField& coeffs,
                                    const SolverConfig& cfg,
                                    PicardStart start = PicardStart::constant) {
    const double h = g.cell_width();
    const double eps = static_cast<double>(cells) * h;
    const std::size_t m = cells;

    std::vector<double> X(m + 1, a);
    if (start == PicardStart::ramp) {
        const double slope = 0.5 * cfg.K * std::pow(eps, cfg.beta - 1.0);
        for (std::size_t j = 0; j <= m; ++j)
            X[j] = a + slope * static_cast<double>(j) * h;
    }

    std::vector<double> FX(m + 1), diff(m + 1);
    auto apply_F = [&](const std::vector<double>& cur) {
        pathcalc::detail::CompensatedSum acc;
        FX[0] = a;
        for (std::size_t j = 0; j < m; ++j) {
            const double t = g.node_time(i0 + j);
            acc.add(coeffs.b(t, cur[j]) * h + coeffs.sigma(t, cur[j]) * (g[i0 + j + 1] - g[i0 + j]));
            FX[j + 1] = a + acc.value();
        }
    };

    double prev_delta = -1.0, ratio = 0.0;
    int it = 0;
    for (; it < cfg.max_picard_iters; ++it) {
        apply_F(X);
        for (std::size_t j = 0; j <= m; ++j) diff[j] = FX[j] - X[j];
        const double delta = detail::step_norm_beta(diff, h, cfg.beta);
        if (prev_delta > 0.0) ratio = delta / prev_delta;
        prev_delta = delta;
        X.swap(FX);
        if (detail::step_holder_coeff(X, h, cfg.beta) > cfg.K)
            throw picard_error(
                "Picard iterate left the Holder ball; measured driver data likely "
                "underestimates the true coefficient");
        if (delta < cfg.picard_tol) {
            ++it;
            break;
        }
    }
    if (prev_delta >= cfg.picard_tol)
        throw picard_error("Picard iteration did not converge in " +
                           std::to_string(cfg.max_picard_iters) + " iterations");

    apply_F(X);
    for (std::size_t j = 0; j <= m; ++j) diff[j] = FX[j] - X[j];
    const double residual = detail::step_norm_beta(diff, h, cfg.beta);
    return {std::move(X), it, residual, ratio};
}

/// Resolves defaulted K and L:
///   K: twice the Holder-beta coefficient of the driver-only integral
///      int sigma(tau, x0) dg over [0, T], floored at 1;
///   L: 1.1 times the measured Holder-gamma coefficient of g.
inline void resolve_config(SolverConfig& cfg, double x0, const CoefficientField& coeffs,
                           const GridPath& g) {
    cfg.validate();
    if (cfg.L <= 0.0) cfg.L = 1.1 * holder_coefficient(g, cfg.gamma);
    if (cfg.K <= 0.0) {
        std::vector<double> d(g.size());
        d[0] = 0.0;
        pathcalc::detail::CompensatedSum acc;
        for (std::size_t i = 0; i + 1 < g.size(); ++i) {
            acc.add(coeffs.sigma(g.node_time(i), x0) * (g[i + 1] - g[i]));
            d[i + 1] = acc.value();
        }
        const double kd = detail::step_holder_coeff(d, g.cell_width(), cfg.beta);
        cfg.K = std::max(1.0, 2.0 * kd);
    }
}

/// Chains Picard steps over [t0, T], taking the end value of each step as the
/// next initial condition.  T must be a grid node with a power-of-two cell
/// count from t0 (so the solution is itself a dyadic grid path).
inline Solution solve(double x0, double T, const CoefficientField& coeffs, const GridPath& g,
                      SolverConfig cfg, PicardStart start = PicardStart::constant) {
    resolve_config(cfg, x0, coeffs, g);
    const std::size_t end = g.index_of(T);
    if (end == 0) throw grid_error("solve: T must exceed the grid origin");
    if ((end & (end - 1)) != 0)
        throw grid_error("solve: cell count up to T must be a power of two");
    int level = 0;
    while ((std::size_t{1} << level) < end) ++level;

    const double h = g.cell_width();
    std::vector<double> vals(end + 1);
    vals[0] = x0;
    std::vector<StepRecord> steps;
    std::size_t j = 0;
    while (j < end) {
        const double s = g.node_time(j);
        const double a = vals[j];
        std::size_t c;
        try {
            c = step_cells(s, a, coeffs, cfg.L, cfg, end - j, h);
        } catch (const step_error& e) {
            throw step_error(std::string(e.what()) + " (reached t = " + std::to_string(s) + ")");
        }
        auto res = picard_solve_step(a, g, j, c, coeffs, cfg, start);
        for (std::size_t k = 0; k <= c; ++k) vals[j + k] = res.values[k];
        const double eps = static_cast<double>(c) * h;
        steps.push_back({s, eps, res.iters, res.residual, res.contraction,
                         contraction_lhs(eps, coeffs, cfg.L, cfg.K, cfg.beta, cfg.gamma)});
        j += c;
    }
    return {GridPath(g.t0(), T, level, std::move(vals)), std::move(steps), cfg,
            g.content_hash()};
}

/// Residual of the integral equation at full depth:
///   max_t |X(t) - x0 - int_0^t b(tau, X) dtau - int_0^t sigma(tau, X) dg|.
inline double verify_solution(const Solution& sol, const CoefficientField& coeffs,
                              const GridPath& g) {
    const auto& X = sol.path;
    const std::size_t n = X.cells();
    if (X.t0() != g.t0() || g.index_of(X.t1()) != n)
        throw grid_error("verify_solution: solution grid must align with the driver");
    const double h = X.cell_width();
    const double x0 = X[0];
    pathcalc::detail::CompensatedSum acc;
    double defect = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = X.node_time(i);
        acc.add(coeffs.b(t, X[i]) * h + coeffs.sigma(t, X[i]) * (g[i + 1] - g[i]));
        defect = std::max(defect, std::abs(X[i + 1] - x0 - acc.value()));
    }
    return defect;
}

}  // namespace pathcalc
