#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pathcalc/detail/parallel.hpp"
#include "pathcalc/errors.hpp"
#include "pathcalc/grid_path.hpp"
#include "pathcalc/holder.hpp"

namespace pathcalc {

/// Holder data (exponents and coefficients) for an integrand/integrator pair.
/// The truncation bound is valid only when beta + gamma > 1.
struct HolderData {
    double beta;
    double Kf;
    double gamma;
    double Kg;

    bool hypothesis_ok() const { return beta + gamma > 1.0; }

    /// Grid-measured data: exponents from estimate_holder_exponent (clamped
    /// to (0,1]), coefficients exact on the grid.  Grid-optimistic: the true
    /// coefficient of the underlying function may exceed the grid value.
    static HolderData measured(const GridPath& f, const GridPath& g) {
        auto one = [](const GridPath& p) -> std::pair<double, double> {
            if (detail::holder_coefficient_values(p.values(), p.cell_width(), 1.0) == 0.0)
                return {1.0, 0.0};  // constant path
            double b;
            try {
                b = std::clamp(estimate_holder_exponent(p), 0.05, 1.0);
            } catch (const error&) {
                b = 1.0;
            }
            return {b, holder_coefficient(p, b)};
        };
        const auto [bf, kf] = one(f);
        const auto [bg, kg] = one(g);
        return {bf, kf, bg, kg};
    }
};

struct IntegralResult {
    double value;
    int depth_used;
    double truncation_bound;
};

/// Tail of the geometric series beyond `depth`:
/// sum_{k>depth} 2^(k-1) Kf Kg len^(beta+gamma) 2^(-k(beta+gamma)).
inline double truncation_bound(const HolderData& h, double length, int depth) {
    if (!h.hypothesis_ok())
        throw hypothesis_error("truncation_bound: beta + gamma <= 1");
    if (!(length > 0.0) || depth < 0)
        throw hypothesis_error("truncation_bound: need length > 0 and depth >= 0");
    const double p = h.beta + h.gamma;
    return 0.5 * h.Kf * h.Kg * std::pow(length, p) *
           std::exp2(static_cast<double>(depth + 1) * (1.0 - p)) / (1.0 - std::exp2(1.0 - p));
}

/// Sup bound on |int_s^t X dg|: L * ||X||_beta * (t-s)^gamma * (1 + (t-s)^beta / (2^(beta+gamma) - 2)).
inline double sup_bound(double L, double normX, double beta, double gamma, double s, double t) {
    if (!(beta + gamma > 1.0)) throw hypothesis_error("sup_bound: beta + gamma <= 1");
    if (!(t > s)) throw hypothesis_error("sup_bound: need t > s");
    const double d = t - s;
    return L * normX * std::pow(d, gamma) *
           (1.0 + std::pow(d, beta) / (std::exp2(beta + gamma) - 2.0));
}

/// Sup and Holder-norm bounds for int X dg over a step of length eps.
struct HolderBoundPair {
    double sup_part;     // bound on max |int_s^t X dg|, t in [s, s+eps]
    double holder_part;  // bound on ||int X dg||_beta over the step
};

inline HolderBoundPair holder_bound_of_integral(double L, double normX, double beta,
                                                double gamma, double eps) {
    if (!(beta + gamma > 1.0))
        throw hypothesis_error("holder_bound_of_integral: beta + gamma <= 1");
    if (!(eps > 0.0)) throw hypothesis_error("holder_bound_of_integral: need eps > 0");
    const double eb = std::pow(eps, beta);
    const double tail = 1.0 + eb / (std::exp2(beta + gamma) - 2.0);
    return {L * normX * std::pow(eps, gamma) * tail,
            L * normX * std::pow(eps, gamma - beta) * (1.0 + eb) * tail};
}

/// Drift bound ||int X dtau||_beta <= ||X||_inf * eps^(1-beta) * (1 + eps^beta).
inline double drift_holder_bound(double supX, double beta, double eps) {
    return supX * std::pow(eps, 1.0 - beta) * (1.0 + std::pow(eps, beta));
}

/// Largest dyadic depth usable between grid nodes s and t: the 2-adic
/// valuation of the index difference.
inline int max_feasible_depth(const GridPath& path, double s, double t) {
    const std::size_t i = path.index_of(s);
    const std::size_t j = path.index_of(t);
    if (j <= i) throw grid_error("max_feasible_depth: need s < t");
    std::size_t d = j - i;
    int v = 0;
    while ((d & 1u) == 0) { d >>= 1; ++v; }
    return v;
}

/// Dyadic sum formula for int_s^t f dg, truncated at `depth` levels:
///   f(s)(g(t)-g(s)) + sum_{k=1}^{depth} sum_{i=0}^{2^(k-1)-1}
///       df(s + s_{2i}^k) dg(s + s_{2i+1}^k),
/// where s_i^k are the points of the 2^k-piece partition of [s, t].
/// Levels are accumulated ascending with compensated summation.
inline IntegralResult young_integrate(const GridPath& f, const GridPath& g, double s, double t,
                                      int depth, const HolderData& data) {
    if (!f.same_grid(g)) throw grid_error("young_integrate: f and g must share a grid");
    const std::size_t i0 = f.index_of(s);
    const std::size_t i1 = f.index_of(t);
    if (i1 <= i0) throw grid_error("young_integrate: need s < t on the grid");
    const int maxd = max_feasible_depth(f, s, t);
    if (depth < 0 || depth > maxd)
        throw depth_error("young_integrate: depth " + std::to_string(depth) +
                          " infeasible; max feasible depth between these nodes is " +
                          std::to_string(maxd));

    const auto& fv = f.values();
    const auto& gv = g.values();
    detail::CompensatedSum acc;
    acc.add(fv[i0] * (gv[i1] - gv[i0]));
    const std::size_t span = i1 - i0;
    for (int k = 1; k <= depth; ++k) {
        const std::size_t stride = span >> k;  // nodes per 2^k-piece
        const std::size_t blocks = std::size_t{1} << (k - 1);
        for (std::size_t b = 0; b < blocks; ++b) {
            const std::size_t p0 = i0 + 2 * b * stride;
            const std::size_t p1 = p0 + stride;
            const std::size_t p2 = p1 + stride;
            acc.add((fv[p1] - fv[p0]) * (gv[p2] - gv[p1]));
        }
    }

    double bound = 0.0;
    if (data.Kf == 0.0 || data.Kg == 0.0)
        bound = 0.0;
    else
        bound = truncation_bound(data, t - s, depth);
    return {acc.value(), depth, bound};
}

/// Variant with grid-measured Holder data.
inline IntegralResult young_integrate(const GridPath& f, const GridPath& g, double s, double t,
                                      int depth) {
    return young_integrate(f, g, s, t, depth, HolderData::measured(f, g));
}

/// Left Riemann-Stieltjes sum of f dg over grid cells [i0, i1).  By the
/// level-recursion behind the dyadic formula this equals young_integrate at
/// the maximal feasible depth whenever i1 - i0 is a power of two; it is the
/// additivity-chained value otherwise.
inline double riemann_stieltjes(const GridPath& f, const GridPath& g, std::size_t i0,
                                std::size_t i1) {
    if (!f.same_grid(g)) throw grid_error("riemann_stieltjes: f and g must share a grid");
    const auto& fv = f.values();
    const auto& gv = g.values();
    detail::CompensatedSum acc;
    for (std::size_t i = i0; i < i1; ++i) acc.add(fv[i] * (gv[i + 1] - gv[i]));
    return acc.value();
}

/// Prefix integrals I_j = int_{t0}^{t_j} f dg at full grid resolution.
inline std::vector<double> prefix_integral(const GridPath& f, const GridPath& g) {
    if (!f.same_grid(g)) throw grid_error("prefix_integral: f and g must share a grid");
    const auto& fv = f.values();
    const auto& gv = g.values();
    std::vector<double> out(f.size());
    detail::CompensatedSum acc;
    out[0] = 0.0;
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
        acc.add(fv[i] * (gv[i + 1] - gv[i]));
        out[i + 1] = acc.value();
    }
    return out;
}

/// Scalar field u(t, x) with its partial derivatives.
struct ScalarField {
    std::function<double(double, double)> u;
    std::function<double(double, double)> u_t;
    std::function<double(double, double)> u_x;
};

/// Builds eta(t) = eta0 + int_0^t e ds + int_0^t f dg on the dyadic sub-grid
/// of resolution 2^depth, then returns the largest defect over sub-grid nodes
/// of the change-of-variables identity
///   u(t, eta(t)) - u(0, eta0) - int_0^t (u_t + u_x e) ds - int_0^t u_x f dg.
inline double change_of_variables_check(const ScalarField& u, const GridPath& e,
                                        const GridPath& f, const GridPath& g, double eta0,
                                        int depth) {
    if (!e.same_grid(f) || !f.same_grid(g))
        throw grid_error("change_of_variables_check: paths must share a grid");
    if (depth < 0 || depth > g.level())
        throw depth_error("change_of_variables_check: depth exceeds grid level " +
                          std::to_string(g.level()));
    const std::size_t stride = std::size_t{1} << (g.level() - depth);
    const std::size_t m = std::size_t{1} << depth;
    const double dt = g.cell_width() * static_cast<double>(stride);

    std::vector<double> eta(m + 1);
    eta[0] = eta0;
    detail::CompensatedSum acc_eta;
    acc_eta.add(eta0);
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t i = j * stride;
        acc_eta.add(e[i] * dt + f[i] * (g[i + stride] - g[i]));
        eta[j + 1] = acc_eta.value();
    }

    const double v0 = u.u(g.node_time(0), eta0);
    detail::CompensatedSum time_int, young_int;
    double defect = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t i = j * stride;
        const double tj = g.node_time(i);
        time_int.add((u.u_t(tj, eta[j]) + u.u_x(tj, eta[j]) * e[i]) * dt);
        young_int.add(u.u_x(tj, eta[j]) * f[i] * (g[i + stride] - g[i]));
        const double tnext = g.node_time(i + stride);
        const double lhs = u.u(tnext, eta[j + 1]) - v0;
        defect = std::max(defect, std::abs(lhs - time_int.value() - young_int.value()));
    }
    return defect;
}

}  // namespace pathcalc
