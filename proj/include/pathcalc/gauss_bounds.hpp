#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pathcalc/errors.hpp"
#include "pathcalc/fbm.hpp"
#include "pathcalc/grid_path.hpp"
#include "pathcalc/rng.hpp"

namespace pathcalc {

/// Deterministic integrand f on [0, 1] (or [0, horizon]).  The Holder/L^p
/// smoothness class of f is metadata only; it never enters the computed
/// formulas.
struct DeterministicIntegrand {
    std::function<double(double)> f;
    std::optional<double> smoothness_beta = std::nullopt;

    template <typename Fn>
        requires std::is_invocable_r_v<double, Fn, double>
    DeterministicIntegrand(Fn&& fn)  // NOLINT(google-explicit-constructor)
        : f(std::forward<Fn>(fn)) {}
    DeterministicIntegrand(std::function<double(double)> fn, std::optional<double> beta)
        : f(std::move(fn)), smoothness_beta(beta) {}
};

namespace detail {

/// Moments I_mn(delta) = int_0^1 int_0^1 x^m y^n |x - y + delta|^(alpha-1) dx dy
/// for m, n in {0, 1}, delta integer.  These are the building blocks of the
/// exact double integral of piecewise-linear interpolants against the kernel:
/// reducing to the distribution G_mn(tau) of x - y turns the cell-pair
/// integral into int_{-1}^{1} G_mn(tau) |tau + delta|^(alpha-1) dtau with
/// G_mn piecewise cubic.  |delta| <= 1 (kernel singular or adjacent) is done
/// in closed form through power-function primitives; larger |delta| uses
/// 16-point Gauss-Legendre per piece, where the integrand is analytic and the
/// closed form would cancel catastrophically.
struct KernelMoments {
    double I00, I10, I01, I11;
};

inline double kernel_primitive(double w, int j, double alpha) {
    const double p = alpha + static_cast<double>(j);
    const double mag = std::pow(std::abs(w), p) / p;
    if (j % 2 == 1) return mag;
    return w < 0.0 ? -mag : mag;
}

// G_mn polynomial coefficients in tau, on [0,1] ("plus") and [-1,0] ("minus").
inline constexpr std::array<std::array<double, 4>, 4> g_plus = {{
    {1.0, -1.0, 0.0, 0.0},            // G00
    {0.5, 0.0, -0.5, 0.0},            // G10
    {0.5, -1.0, 0.5, 0.0},            // G01
    {1.0 / 3.0, -0.5, 0.0, 1.0 / 6.0},  // G11
}};
inline constexpr std::array<std::array<double, 4>, 4> g_minus = {{
    {1.0, 1.0, 0.0, 0.0},
    {0.5, 1.0, 0.5, 0.0},
    {0.5, 0.0, -0.5, 0.0},
    {1.0 / 3.0, 0.5, 0.0, -1.0 / 6.0},
}};

inline double piece_closed_form(const std::array<double, 4>& c, double lo, double hi,
                                double delta, double alpha) {
    // shift tau-polynomial to w = tau + delta
    std::array<double, 4> cw{};
    for (int p = 0; p < 4; ++p) {
        if (c[p] == 0.0) continue;
        double binom = 1.0;
        for (int j = p; j >= 0; --j) {
            cw[j] += c[p] * binom * std::pow(-delta, p - j);
            binom = binom * j / (p - j + 1.0);
        }
    }
    double out = 0.0;
    for (int j = 0; j < 4; ++j) {
        if (cw[j] == 0.0) continue;
        out += cw[j] *
               (kernel_primitive(hi + delta, j, alpha) - kernel_primitive(lo + delta, j, alpha));
    }
    return out;
}

inline constexpr std::array<double, 8> gl16_x = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
inline constexpr std::array<double, 8> gl16_w = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

inline double piece_gauss(const std::array<double, 4>& c, double lo, double hi, double delta,
                          double alpha) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    auto eval = [&](double tau) {
        const double g = c[0] + tau * (c[1] + tau * (c[2] + tau * c[3]));
        return g * std::pow(std::abs(tau + delta), alpha - 1.0);
    };
    double s = 0.0;
    for (std::size_t q = 0; q < gl16_x.size(); ++q)
        s += gl16_w[q] * (eval(mid + half * gl16_x[q]) + eval(mid - half * gl16_x[q]));
    return s * half;
}

inline KernelMoments kernel_moments(double alpha, long delta) {
    const double d = static_cast<double>(delta);
    std::array<double, 4> vals{};
    for (int mn = 0; mn < 4; ++mn) {
        double v;
        if (std::labs(delta) <= 1) {
            v = piece_closed_form(g_minus[static_cast<std::size_t>(mn)], -1.0, 0.0, d, alpha) +
                piece_closed_form(g_plus[static_cast<std::size_t>(mn)], 0.0, 1.0, d, alpha);
        } else {
            v = piece_gauss(g_minus[static_cast<std::size_t>(mn)], -1.0, 0.0, d, alpha) +
                piece_gauss(g_plus[static_cast<std::size_t>(mn)], 0.0, 1.0, d, alpha);
        }
        vals[static_cast<std::size_t>(mn)] = v;
    }
    return {vals[0], vals[1], vals[2], vals[3]};
}

/// Table of moments for delta = 0..max_delta; negative delta swaps I10/I01.
class MomentTable {
public:
    MomentTable(double alpha, std::size_t max_delta) : table_(max_delta + 1) {
        for (std::size_t d = 0; d <= max_delta; ++d)
            table_[d] = kernel_moments(alpha, static_cast<long>(d));
    }
    KernelMoments at(long delta) const {
        if (delta >= 0) return table_[static_cast<std::size_t>(delta)];
        const auto& m = table_[static_cast<std::size_t>(-delta)];
        return {m.I00, m.I01, m.I10, m.I11};
    }

private:
    std::vector<KernelMoments> table_;
};

/// Exact cell-pair integrals P(i,j) of the piecewise-linear interpolant pair
/// against the kernel, for a uniform grid with M cells of width w:
///   P(i,j) = w^(1+alpha) [a_i a_j I00(d) + d_i a_j I10(d) + a_i d_j I01(d)
///            + d_i d_j I11(d)],  d = i - j.
struct InterpolantGrid {
    std::vector<double> node_vals;  // M + 1 samples
    double width;                   // cell width
    double wpow;                    // width^(1+alpha)

    InterpolantGrid(const std::function<double(double)>& f, double s, double t, std::size_t M,
                    double alpha)
        : node_vals(M + 1), width((t - s) / static_cast<double>(M)) {
        for (std::size_t i = 0; i <= M; ++i)
            node_vals[i] = f(s + (t - s) * static_cast<double>(i) / static_cast<double>(M));
        wpow = std::pow(width, 1.0 + alpha);
    }

    std::size_t cells() const { return node_vals.size() - 1; }

    double cell_pair(std::size_t i, std::size_t j, const MomentTable& tab) const {
        const double ai = node_vals[i], di = node_vals[i + 1] - node_vals[i];
        const double aj = node_vals[j], dj = node_vals[j + 1] - node_vals[j];
        const auto m = tab.at(static_cast<long>(i) - static_cast<long>(j));
        return wpow * (ai * aj * m.I00 + di * aj * m.I10 + ai * dj * m.I01 + di * dj * m.I11);
    }
};

/// Sum of cell pairs over the whole grid, plus an absolute-value version used
/// as the convergence scale.
inline std::pair<double, double> grid_double_integral(const InterpolantGrid& grid,
                                                      const MomentTable& tab) {
    const std::size_t M = grid.cells();
    double q = 0.0, qabs = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
        const double ai = grid.node_vals[i];
        const double di = grid.node_vals[i + 1] - ai;
        for (std::size_t j = 0; j < M; ++j) {
            const double aj = grid.node_vals[j];
            const double dj = grid.node_vals[j + 1] - aj;
            const auto m = tab.at(static_cast<long>(i) - static_cast<long>(j));
            q += ai * aj * m.I00 + di * aj * m.I10 + ai * dj * m.I01 + di * dj * m.I11;
            qabs += std::abs(ai * aj * m.I00) + std::abs(di * aj * m.I10) +
                    std::abs(ai * dj * m.I01) + std::abs(di * dj * m.I11);
        }
    }
    return {q * grid.wpow, qabs * grid.wpow};
}

/// sqrt(2/pi) * int_a^inf e^{-x^2/2} dx.
inline double gaussian_tail(double a) { return std::erfc(a / std::numbers::sqrt2); }

/// int_a^inf e^{-x^2/2} dx (no normalization).
inline double gaussian_tail_unnormalized(double a) {
    return std::sqrt(std::numbers::pi / 2.0) * std::erfc(a / std::numbers::sqrt2);
}

}  // namespace detail

/// q_f(s, t) = C alpha (alpha+1) * int_s^t int_s^t f(u) f(v) |u-v|^(alpha-1) du dv,
/// by singularity-exact quadrature: f is replaced by its piecewise-linear
/// interpolant and the double integral of the interpolant pair against the
/// kernel is evaluated in closed form; the grid doubles until the relative
/// change drops below 1e-8 or the 2^quad_level cap.  The printed form of q_f
/// omits the variance constant C alpha (alpha+1); pass
/// include_variance_constant = false to reproduce it.
inline double qf(const DeterministicIntegrand& f, double s, double t, double alpha,
                 int quad_level = 12, bool include_variance_constant = true) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw hypothesis_error("qf: need 0 < alpha < 1");
    if (!(s <= t)) throw hypothesis_error("qf: need s <= t");
    if (s == t) return 0.0;
    const double kappa =
        include_variance_constant ? kernel_constant(alpha) * alpha * (alpha + 1.0) : 1.0;

    std::size_t M = 64;
    const std::size_t Mcap = std::size_t{1} << std::max(6, quad_level);
    double prev = 0.0;
    bool have_prev = false;
    while (true) {
        detail::MomentTable tab(alpha, M);
        detail::InterpolantGrid grid(f.f, s, t, M, alpha);
        const auto [q, qabs] = detail::grid_double_integral(grid, tab);
        if (have_prev && std::abs(q - prev) <= 1e-8 * std::max(std::abs(q), 1e-8 * qabs))
            return kappa * q;
        if (M >= Mcap) {
            if (have_prev && std::abs(q - prev) <= 1e-6 * std::max(std::abs(q), qabs * 1e-8))
                return kappa * q;
            throw quadrature_error("qf did not converge; last refinements " +
                                   std::to_string(kappa * prev) + " -> " +
                                   std::to_string(kappa * q));
        }
        prev = q;
        have_prev = true;
        M *= 2;
    }
}

/// Named alias: E (int_0^t f dxi)^2 = q_f(0, t).
inline double variance_of_integral(const DeterministicIntegrand& f, double t, double alpha,
                                   int quad_level = 12) {
    return qf(f, 0.0, t, alpha, quad_level);
}

/// Slepian comparison bound on P(max_{[0,1]} int f dxi > lambda):
///   sqrt(2/pi) [ int_{lambda r / sqrt(q_{f+}(0,1))}^inf e^{-x^2/2} dx
///              + int_{lambda (1-r) / sqrt(q_{f-}(0,1))}^inf e^{-x^2/2} dx ],
/// with f_pm = (|f| +- f)/2.  A term whose q is zero corresponds to an
/// identically-zero comparison process and is dropped.
inline double slepian_tail_bound(const DeterministicIntegrand& f, double lambda, double r,
                                 double alpha, int quad_level = 12) {
    if (!(lambda > 0.0)) throw hypothesis_error("slepian_tail_bound: need lambda > 0");
    const auto& fn = f.f;
    DeterministicIntegrand fplus{[&fn](double x) { return std::max(fn(x), 0.0); }};
    DeterministicIntegrand fminus{[&fn](double x) { return std::max(-fn(x), 0.0); }};
    const double qp = qf(fplus, 0.0, 1.0, alpha, quad_level);
    const double qm = qf(fminus, 0.0, 1.0, alpha, quad_level);
    double bound = 0.0;
    if (qp > 0.0) bound += detail::gaussian_tail(lambda * r / std::sqrt(qp));
    if (qm > 0.0) bound += detail::gaussian_tail(lambda * (1.0 - r) / std::sqrt(qm));
    return bound;
}

/// Grid search for the split r minimizing the Slepian bound.
struct SlepianOptimum {
    double r;
    double bound;
};

inline SlepianOptimum slepian_optimize_r(const DeterministicIntegrand& f, double lambda,
                                         double alpha, int quad_level = 12) {
    SlepianOptimum best{1.0, std::numeric_limits<double>::infinity()};
    for (int i = 0; i <= 1000; ++i) {
        const double r = static_cast<double>(i) / 1000.0;
        const double b = slepian_tail_bound(f, lambda, r, alpha, quad_level);
        if (b < best.bound) best = {r, b};
    }
    return best;
}

/// Fernique entropy-type constant
///   c = sup_{0<=s,t<=1} sqrt(q_f(s,t))
///       + (2+sqrt 2) int_1^inf sup_{|s-t| < m^{-x^2}} sqrt(q_f(s,t)) dx.
/// Sups are evaluated on dyadic grids (129 and 257 nodes, max taken), which
/// under-estimates the true sup; inflate=true multiplies the grid-derived
/// parts by 1.05 for dominance testing.  The outer integral is truncated once
/// m^{-x^2} drops below the grid resolution; the remainder uses the window
/// bound q_f(s,t) <= sup|f|^2 * 2 kappa / (b(b+1)) * |s-t|^(1+alpha) with
/// b = alpha/2, obtained from |u-v|^(alpha-1) <= |s-t|^(alpha-b) |u-v|^(b-1).
inline double fernique_entropy_constant(const DeterministicIntegrand& f, int m, double alpha,
                                        int quad_level = 12, bool inflate = false) {
    if (m < 2) throw hypothesis_error("fernique: need integer m >= 2");
    const double kappa = kernel_constant(alpha) * alpha * (alpha + 1.0);
    const double logm = std::log(static_cast<double>(m));

    // sup sqrt(q) over all windows and over windows of width <= d cells, on a
    // dyadic grid and its refinement (the finer grid feeds the width table).
    const std::size_t Gfine = std::size_t{1} << std::clamp(quad_level, 6, 9);
    std::vector<double> cummax_by_width;
    double sup_all = 0.0, sup_absf = 0.0;
    for (std::size_t G : {Gfine / 2, Gfine}) {
        detail::MomentTable tab(alpha, G);
        detail::InterpolantGrid grid(f.f, 0.0, 1.0, G, alpha);
        for (double v : grid.node_vals) sup_absf = std::max(sup_absf, std::abs(v));
        // 2-D prefix sums of cell-pair integrals
        std::vector<double> pre((G + 1) * (G + 1), 0.0);
        auto P = [&](std::size_t a, std::size_t b) -> double& { return pre[a * (G + 1) + b]; };
        for (std::size_t i = 1; i <= G; ++i)
            for (std::size_t j = 1; j <= G; ++j)
                P(i, j) = grid.cell_pair(i - 1, j - 1, tab) + P(i - 1, j) + P(i, j - 1) -
                          P(i - 1, j - 1);
        std::vector<double> width_max(G + 1, 0.0);
        for (std::size_t d = 1; d <= G; ++d) {
            double md = 0.0;
            for (std::size_t a = 0; a + d <= G; ++a) {
                const std::size_t b = a + d;
                md = std::max(md, P(b, b) - P(a, b) - P(b, a) + P(a, a));
            }
            width_max[d] = std::max(width_max[d - 1], md);
        }
        sup_all = std::max(sup_all, width_max[G]);
        if (G == Gfine) cummax_by_width.assign(width_max.begin(), width_max.end());
    }
    auto sup_q_width = [&](double h) -> double {
        // windows with |s-t| < h on the fine grid
        const double cells = h * static_cast<double>(Gfine);
        const auto dmax = static_cast<long>(std::ceil(cells)) - 1;
        if (dmax < 1) return 0.0;
        const std::size_t d = std::min<std::size_t>(static_cast<std::size_t>(dmax), Gfine);
        return kappa * std::max(0.0, cummax_by_width[d]);
    };

    const double infl = inflate ? 1.05 : 1.0;
    const double sup_term = std::sqrt(std::max(0.0, kappa * sup_all));

    // numeric part of the outer integral, truncated at the grid resolution
    const double xstar =
        std::sqrt(std::log(static_cast<double>(Gfine)) / logm);  // m^{-x^2} = 1/G
    double numeric = 0.0;
    if (xstar > 1.0) {
        const int n = 4096;  // Simpson; integrand is monotone decreasing
        const double dx = (xstar - 1.0) / n;
        auto val = [&](double x) { return std::sqrt(sup_q_width(std::pow(m, -x * x))); };
        double s4 = 0.0, s2 = 0.0;
        for (int i = 1; i < n; i += 2) s4 += val(1.0 + i * dx);
        for (int i = 2; i < n; i += 2) s2 += val(1.0 + i * dx);
        numeric = dx / 3.0 * (val(1.0) + 4.0 * s4 + 2.0 * s2 + val(xstar));
    }

    // remainder beyond the truncation point
    const double beta = alpha / 2.0;
    const double rem_const = sup_absf * std::sqrt(2.0 * kappa / (beta * (beta + 1.0)));
    const double a = 0.5 * (1.0 + alpha) * logm;
    const double x0 = std::max(1.0, xstar);
    const double remainder =
        rem_const * 0.5 * std::sqrt(std::numbers::pi / a) * std::erfc(x0 * std::sqrt(a));

    return infl * (sup_term + (2.0 + std::numbers::sqrt2) * numeric) +
           (2.0 + std::numbers::sqrt2) * remainder;
}

/// Fernique bound on P(max_{[0,1]} |int f dxi| > lambda) for integer m >= 2
/// and lambda >= sqrt(1 + log m^4):  (5/2) m^2 int_{lambda/c}^inf e^{-x^2/2} dx.
inline double fernique_tail_bound(const DeterministicIntegrand& f, double lambda, int m,
                                  double alpha, int quad_level = 12, bool inflate = false) {
    if (m < 2) throw hypothesis_error("fernique_tail_bound: need integer m >= 2");
    const double threshold = std::sqrt(1.0 + 4.0 * std::log(static_cast<double>(m)));
    if (!(lambda >= threshold))
        throw hypothesis_error("fernique_tail_bound: lambda < sqrt(1 + log m^4) = " +
                               std::to_string(threshold));
    const double c = fernique_entropy_constant(f, m, alpha, quad_level, inflate);
    return 2.5 * static_cast<double>(m) * static_cast<double>(m) *
           detail::gaussian_tail_unnormalized(lambda / c);
}

/// Parameters of the series tail bound for state-dependent integrands
/// f(t, x) with bounded |f'_t|, |f'_x|.
struct TailBoundParams {
    double gamma;   // exponent in (1/2, (1+alpha)/2)
    double f00;     // |f(0, 0)|
    double ft;      // sup |f'_t|
    double fx;      // sup |f'_x|
    double lambda;  // threshold
};

/// The nu of the series bound, via the cancellation-free root form
///   nu = 2 lambda / (A + sqrt(A^2 + 4 |f'_x| lambda / (2^{2 gamma} - 2))),
///   A = |f(0,0)| + |f'_t| / (2^{gamma+1} - 2),
/// which agrees with the printed quadratic-root expression and serves the
/// f'_x -> 0 limit nu = lambda / A exactly.
inline double maxf_nu(const TailBoundParams& p) {
    const double A = p.f00 + p.ft / (std::exp2(p.gamma + 1.0) - 2.0);
    const double B = 4.0 * p.fx * p.lambda / (std::exp2(2.0 * p.gamma) - 2.0);
    return 2.0 * p.lambda / (A + std::sqrt(A * A + B));
}

/// Series bound on P(max_{[0,1]} int f(tau, xi) dxi > lambda):
///   (2^g+1)/(2^g-1) sqrt(2/pi) sum_{n>=1} 2^{(1-d)n}/nu
///       exp(-( (2^g-1)/(2^g+1) ) nu^2 2^{2nd-1}),   d = (1+alpha)/2 - gamma.
/// Terms are summed until the next term is below series_tol times the partial
/// sum and past the peak; failure to decrease within the cap signals d <= 0.
inline double maxf_tail_bound(const TailBoundParams& p, double alpha,
                              double series_tol = 1e-16) {
    if (!(p.gamma > 0.5) || !(p.gamma < 0.5 * (1.0 + alpha)))
        throw hypothesis_error("maxf_tail_bound: need 1/2 < gamma < (1+alpha)/2");
    if (!(p.lambda > 0.0)) throw hypothesis_error("maxf_tail_bound: need lambda > 0");
    const double delta = 0.5 * (1.0 + alpha) - p.gamma;
    const double nu = maxf_nu(p);
    const double ratio = (std::exp2(p.gamma) - 1.0) / (std::exp2(p.gamma) + 1.0);
    const double pre = std::sqrt(2.0 / std::numbers::pi) / ratio;

    double sum = 0.0, prev = std::numeric_limits<double>::infinity();
    constexpr int n_max = 10000;
    for (int n = 1; n <= n_max; ++n) {
        const double term = std::exp2((1.0 - delta) * n) / nu *
                            std::exp(-ratio * nu * nu * std::exp2(2.0 * n * delta - 1.0));
        sum += term;
        const bool decreasing = term < prev;
        prev = term;
        if (decreasing && term <= series_tol * sum) return pre * sum;
        if (n == n_max && !decreasing)
            throw hypothesis_error(
                "maxf_tail_bound: series terms still growing at the cap; delta is too small");
    }
    return pre * sum;
}

/// Exact Gaussian sampling of X(t) = int_0^t f dxi on a dyadic grid:
/// Cov X(t_a) X(t_b) is assembled by the same closed-form quadrature and
/// factorized once; draws are deterministic under (seed, path index).
class DeterministicIntegralSampler {
public:
    DeterministicIntegralSampler(const DeterministicIntegrand& f, int level, double horizon,
                                 double alpha, std::uint64_t seed)
        : level_(level), horizon_(horizon), seed_(seed) {
        if (level < 0 || level > 12)
            throw hypothesis_error("DeterministicIntegralSampler: level out of range");
        if (!(horizon > 0.0) || horizon > 1.0)
            throw hypothesis_error("DeterministicIntegralSampler: need 0 < horizon <= 1");
        const std::size_t N = std::size_t{1} << level;
        const double kappa = kernel_constant(alpha) * alpha * (alpha + 1.0);
        detail::MomentTable tab(alpha, N);
        detail::InterpolantGrid grid(f.f, 0.0, horizon, N, alpha);

        std::vector<double> pre((N + 1) * (N + 1), 0.0);
        auto P = [&](std::size_t a, std::size_t b) -> double& { return pre[a * (N + 1) + b]; };
        for (std::size_t i = 1; i <= N; ++i)
            for (std::size_t j = 1; j <= N; ++j)
                P(i, j) = grid.cell_pair(i - 1, j - 1, tab) + P(i - 1, j) + P(i, j - 1) -
                          P(i - 1, j - 1);

        Eigen::MatrixXd cov(N, N);
        for (std::size_t a = 1; a <= N; ++a)
            for (std::size_t b = 1; b <= N; ++b)
                cov(static_cast<Eigen::Index>(a - 1), static_cast<Eigen::Index>(b - 1)) =
                    kappa * P(a, b);
        cov = 0.5 * (cov + cov.transpose().eval());
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() != Eigen::Success) {
            cov.diagonal().array() += 1e-12 * cov.diagonal().maxCoeff();
            llt.compute(cov);
            if (llt.info() != Eigen::Success) {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, Eigen::EigenvaluesOnly);
                throw factorization_error(
                    "integral covariance not PSD after jitter; smallest eigenvalue " +
                    std::to_string(es.eigenvalues().minCoeff()));
            }
        }
        chol_ = llt.matrixL();
    }

    GridPath sample(std::uint64_t path_index = 0) const {
        const std::size_t N = std::size_t{1} << level_;
        CounterRng rng(seed_, path_index);
        Eigen::VectorXd z(static_cast<Eigen::Index>(N));
        for (std::size_t i = 0; i < N; ++i)
            z[static_cast<Eigen::Index>(i)] = rng.next_gaussian();
        Eigen::VectorXd y = chol_ * z;
        std::vector<double> vals(N + 1);
        vals[0] = 0.0;
        for (std::size_t i = 0; i < N; ++i) vals[i + 1] = y[static_cast<Eigen::Index>(i)];
        return GridPath(0.0, horizon_, level_, std::move(vals));
    }

private:
    int level_;
    double horizon_;
    std::uint64_t seed_;
    Eigen::MatrixXd chol_;
};

/// Batch convenience wrapper.
inline std::vector<GridPath> sample_deterministic_integral(const DeterministicIntegrand& f,
                                                           int level, double horizon,
                                                           double alpha, std::uint64_t seed,
                                                           std::size_t n_paths) {
    DeterministicIntegralSampler sampler(f, level, horizon, alpha, seed);
    std::vector<GridPath> out;
    out.reserve(n_paths);
    for (std::size_t p = 0; p < n_paths; ++p) out.push_back(sampler.sample(p));
    return out;
}

}  // namespace pathcalc
