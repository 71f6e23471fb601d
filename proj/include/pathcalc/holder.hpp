#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "pathcalc/errors.hpp"
#include "pathcalc/grid_path.hpp"

namespace pathcalc {

/// A (beta, K) pair certifying membership in the Holder ball C_K^beta.
struct HolderEstimate {
    double beta;
    double coefficient;
};

namespace detail {

/// Max |f(i+d) - f(i)| for each node distance d = 1..n, O(N^2) adds.
inline std::vector<double> max_increment_by_distance(const std::vector<double>& v) {
    const std::size_t n = v.size() - 1;
    std::vector<double> out(n + 1, 0.0);
    for (std::size_t d = 1; d <= n; ++d) {
        double m = 0.0;
        for (std::size_t i = 0; i + d <= n; ++i)
            m = std::max(m, std::abs(v[i + d] - v[i]));
        out[d] = m;
    }
    return out;
}

inline double holder_coefficient_values(const std::vector<double>& v, double h, double beta) {
    const std::size_t n = v.size() - 1;
    if (beta == 1.0) {
        // For exponent 1 the supremum is attained on adjacent nodes.
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(v[i + 1] - v[i]));
        return m / h;
    }
    const auto maxinc = max_increment_by_distance(v);
    double best = 0.0;
    for (std::size_t d = 1; d <= n; ++d)
        best = std::max(best, maxinc[d] / std::pow(static_cast<double>(d) * h, beta));
    return best;
}

}  // namespace detail

/// The quotient part of the Holder norm: max over all distinct node pairs of
/// |f(t2) - f(t1)| / |t2 - t1|^beta.  Exact on the grid; O(N^2).
inline double holder_coefficient(const GridPath& path, double beta) {
    if (!(beta > 0.0) || beta > 1.0)
        throw hypothesis_error("holder_coefficient: need 0 < beta <= 1");
    if (path.size() < 2) throw invalid_path_error("holder_coefficient: need >= 2 nodes");
    return detail::holder_coefficient_values(path.values(), path.cell_width(), beta);
}

/// O(N log N) variant restricted to dyadic node pairs (i, i + 2^k); a lower
/// bound on the exact grid coefficient, for use on very large paths.
inline double holder_coefficient_dyadic(const GridPath& path, double beta) {
    if (!(beta > 0.0) || beta > 1.0)
        throw hypothesis_error("holder_coefficient_dyadic: need 0 < beta <= 1");
    const auto& v = path.values();
    const std::size_t n = v.size() - 1;
    const double h = path.cell_width();
    double best = 0.0;
    for (std::size_t d = 1; d <= n; d <<= 1) {
        double m = 0.0;
        for (std::size_t i = 0; i + d <= n; ++i)
            m = std::max(m, std::abs(v[i + d] - v[i]));
        best = std::max(best, m / std::pow(static_cast<double>(d) * h, beta));
    }
    return best;
}

/// max |f| + Holder coefficient.
inline double holder_norm(const GridPath& path, double beta) {
    double m = 0.0;
    for (double v : path.values()) m = std::max(m, std::abs(v));
    return m + holder_coefficient(path, beta);
}

inline bool in_ball(const GridPath& path, double beta, double K) {
    if (K < 0.0) throw hypothesis_error("in_ball: need K >= 0");
    return holder_coefficient(path, beta) <= K;
}

inline HolderEstimate certify(const GridPath& path, double beta) {
    return {beta, holder_coefficient(path, beta)};
}

/// Empirical Holder exponent: least-squares slope of the log2 per-scale
/// increment statistic against -k over dyadic scales k.  The statistic is the
/// 90th-percentile |increment| at scale k, which is free of the sqrt(2 ln N)
/// extreme-value factor that biases the per-scale maximum low by ~0.15 at
/// level 14; for a linear path every increment at a scale is equal, so the
/// slope is exactly 1.  Coarse scales k < 3 are excluded when level >= 6
/// (too few increments for a stable quantile).
inline double estimate_holder_exponent(const GridPath& path) {
    const int level = path.level();
    if (level < 4) throw invalid_path_error("estimate_holder_exponent: need level >= 4");
    const auto& v = path.values();
    const int k0 = level >= 6 ? 3 : 1;

    std::vector<double> ks, logstats;
    for (int k = k0; k <= level; ++k) {
        const std::size_t stride = std::size_t{1} << (level - k);
        const std::size_t m = std::size_t{1} << k;
        std::vector<double> inc(m);
        for (std::size_t i = 0; i < m; ++i)
            inc[i] = std::abs(v[(i + 1) * stride] - v[i * stride]);
        const std::size_t rank = (m * 9 + 9) / 10 - 1;  // nearest-rank 90th percentile
        std::nth_element(inc.begin(), inc.begin() + static_cast<std::ptrdiff_t>(rank), inc.end());
        const double stat = inc[rank];
        if (stat > 0.0) {
            ks.push_back(static_cast<double>(k));
            logstats.push_back(std::log2(stat));
        }
    }
    if (ks.size() < 2) throw degenerate_path_error("estimate_holder_exponent: constant path");

    // least-squares slope of logstat against -k
    double mk = 0.0, ms = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i) { mk += ks[i]; ms += logstats[i]; }
    mk /= static_cast<double>(ks.size());
    ms /= static_cast<double>(ks.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        num += (ks[i] - mk) * (logstats[i] - ms);
        den += (ks[i] - mk) * (ks[i] - mk);
    }
    return -num / den;
}

}  // namespace pathcalc
