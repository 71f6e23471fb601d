#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/special_functions/beta.hpp>
#include <nlohmann/json.hpp>

#include "pathcalc/detail/parallel.hpp"
#include "pathcalc/errors.hpp"
#include "pathcalc/fbm.hpp"
#include "pathcalc/gauss_bounds.hpp"
#include "pathcalc/grid_path.hpp"
#include "pathcalc/young.hpp"

namespace pathcalc {

enum class ExperimentKind {
    driver_max,                // max of xi itself over [0, 1]
    deterministic_integrand,   // max of X(t) = int_0^t f(tau) dxi
    state_dependent_integrand  // max of int_0^t f(tau, xi(tau)) dxi (prefix sums)
};

enum class Normalization {
    paper,     // the literal covariance, Var xi(1) = 2C
    rescaled,  // paths divided by sqrt(2C), Var xi(1) = 1
};

/// Deterministic integrands the harness and the CLI can name in a spec file.
/// f(t) = c0 + c1 t ("affine"), a smooth bump on [0.4, 0.6] ("bump"), or
/// c0 sin(c1 t) ("sin").
inline DeterministicIntegrand make_integrand(const std::string& name,
                                             const std::vector<double>& params) {
    auto p = [&](std::size_t i, double dflt) { return i < params.size() ? params[i] : dflt; };
    if (name == "const") {
        const double c = p(0, 1.0);
        return DeterministicIntegrand{[c](double) { return c; }};
    }
    if (name == "affine") {
        const double c0 = p(0, 1.0), c1 = p(1, 0.0);
        return DeterministicIntegrand{[c0, c1](double t) { return c0 + c1 * t; }};
    }
    if (name == "bump") {
        const double scale = p(0, 1.0);
        return DeterministicIntegrand{[scale](double t) {
            if (t <= 0.4 || t >= 0.6) return 0.0;
            const double u = (t - 0.4) / 0.2;
            return scale * std::exp(-1.0 / (u * (1.0 - u)));
        }};
    }
    if (name == "sin") {
        const double c0 = p(0, 1.0), c1 = p(1, std::numbers::pi);
        return DeterministicIntegrand{[c0, c1](double t) { return c0 * std::sin(c1 * t); }};
    }
    throw error("unknown integrand '" + name + "'");
}

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::driver_max;
    double alpha = 0.5;
    int level = 10;
    long n_paths = 1000;
    std::uint64_t seed = 0;
    std::vector<double> lambda_grid;
    Normalization normalization = Normalization::paper;
    // deterministic integrand (kinds driver_max / deterministic_integrand)
    std::string integrand_name = "const";
    std::vector<double> integrand_params = {1.0};
    // state-dependent integrand f(t, x) = f00 + ft * t + fx * x
    double f00 = 1.0, ft = 0.0, fx = 0.0;
    int threads = 1;

    void validate() const {
        if (n_paths < 100) throw hypothesis_error("ExperimentSpec: need n_paths >= 100");
        if (lambda_grid.empty()) throw hypothesis_error("ExperimentSpec: empty lambda grid");
        if (!std::is_sorted(lambda_grid.begin(), lambda_grid.end()))
            throw hypothesis_error("ExperimentSpec: lambda grid must ascend");
    }
};

inline void to_json(nlohmann::json& j, const ExperimentSpec& s) {
    const char* kind = s.kind == ExperimentKind::driver_max ? "driver-max"
                       : s.kind == ExperimentKind::deterministic_integrand
                           ? "deterministic-integrand"
                           : "state-dependent-integrand";
    j = nlohmann::json{
        {"kind", kind},
        {"alpha", s.alpha},
        {"level", s.level},
        {"n_paths", s.n_paths},
        {"seed", s.seed},
        {"lambda_grid", s.lambda_grid},
        {"normalization", s.normalization == Normalization::paper ? "paper" : "rescaled"},
        {"integrand", {{"name", s.integrand_name}, {"params", s.integrand_params}}},
        {"state_field", {{"f00", s.f00}, {"ft", s.ft}, {"fx", s.fx}}},
        {"threads", s.threads}};
}

inline void from_json(const nlohmann::json& j, ExperimentSpec& s) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "driver-max")
        s.kind = ExperimentKind::driver_max;
    else if (kind == "deterministic-integrand")
        s.kind = ExperimentKind::deterministic_integrand;
    else if (kind == "state-dependent-integrand")
        s.kind = ExperimentKind::state_dependent_integrand;
    else
        throw error("unknown experiment kind '" + kind + "'");
    j.at("alpha").get_to(s.alpha);
    j.at("level").get_to(s.level);
    j.at("n_paths").get_to(s.n_paths);
    j.at("seed").get_to(s.seed);
    j.at("lambda_grid").get_to(s.lambda_grid);
    if (j.contains("normalization")) {
        const auto n = j.at("normalization").get<std::string>();
        if (n == "paper")
            s.normalization = Normalization::paper;
        else if (n == "rescaled")
            s.normalization = Normalization::rescaled;
        else
            throw error("unknown normalization '" + n + "'");
    }
    if (j.contains("integrand")) {
        j.at("integrand").at("name").get_to(s.integrand_name);
        j.at("integrand").at("params").get_to(s.integrand_params);
    }
    if (j.contains("state_field")) {
        j.at("state_field").at("f00").get_to(s.f00);
        j.at("state_field").at("ft").get_to(s.ft);
        j.at("state_field").at("fx").get_to(s.fx);
    }
    if (j.contains("threads")) j.at("threads").get_to(s.threads);
}

/// Per-path running maxima of the experiment's process.
struct PathMaxima {
    std::vector<double> max_signed;  // max_t X(t)
    std::vector<double> max_abs;     // max_t |X(t)|
};

/// One-sided upper 99% Clopper-Pearson bound for a binomial proportion.
inline double clopper_pearson_upper(long successes, long n, double confidence = 0.99) {
    if (successes >= n) return 1.0;
    return boost::math::ibeta_inv(static_cast<double>(successes + 1),
                                  static_cast<double>(n - successes), confidence);
}

/// Simulates every path of the experiment and records running maxima.
/// Deterministic under the spec (per-path counter keys); thread count does
/// not affect results.
inline PathMaxima simulate_maxima(const ExperimentSpec& spec) {
    spec.validate();
    const auto n = static_cast<std::size_t>(spec.n_paths);
    PathMaxima out;
    out.max_signed.assign(n, 0.0);
    out.max_abs.assign(n, 0.0);

    const double scale = spec.normalization == Normalization::rescaled
                             ? 1.0 / std::sqrt(2.0 * kernel_constant(spec.alpha))
                             : 1.0;

    if (spec.kind == ExperimentKind::deterministic_integrand) {
        const auto f = make_integrand(spec.integrand_name, spec.integrand_params);
        DeterministicIntegralSampler sampler(f, spec.level, 1.0, spec.alpha, spec.seed);
        detail::parallel_for(n, spec.threads, [&](std::size_t p) {
            const auto path = sampler.sample(p);
            double ms = -std::numeric_limits<double>::infinity(), ma = 0.0;
            for (double v : path.values()) {
                const double x = v * scale;
                ms = std::max(ms, x);
                ma = std::max(ma, std::abs(x));
            }
            out.max_signed[p] = ms;
            out.max_abs[p] = ma;
        });
        return out;
    }

    FbmSampler sampler({spec.alpha, 1.0, spec.level, spec.seed});
    detail::parallel_for(n, spec.threads, [&](std::size_t p) {
        const auto path = sampler.sample(p);
        double ms = -std::numeric_limits<double>::infinity(), ma = 0.0;
        if (spec.kind == ExperimentKind::driver_max) {
            for (double v : path.values()) {
                const double x = v * scale;
                ms = std::max(ms, x);
                ma = std::max(ma, std::abs(x));
            }
        } else {
            // running integral of f(t, xi) dxi as full-resolution prefix sums
            pathcalc::detail::CompensatedSum acc;
            ms = 0.0;
            ma = 0.0;
            for (std::size_t i = 0; i + 1 < path.size(); ++i) {
                const double t = path.node_time(i);
                const double x = path[i] * scale;
                const double dxi = (path[i + 1] - path[i]) * scale;
                acc.add((spec.f00 + spec.ft * t + spec.fx * x) * dxi);
                const double v = acc.value();
                ms = std::max(ms, v);
                ma = std::max(ma, std::abs(v));
            }
        }
        out.max_signed[p] = ms;
        out.max_abs[p] = ma;
    });
    return out;
}

/// Analytic-bound selection for dominance reports.
struct BoundSpec {
    std::string kind;  // "slepian" | "fernique" | "maxf"
    double r = 1.0;    // slepian split
    bool optimize_r = false;
    int m = 2;           // fernique
    double gamma = 0.0;  // maxf
    int quad_level = 12;
};

struct TailBoundReport {
    nlohmann::json spec_json;
    std::string bound_kind;
    std::vector<double> lambdas;
    std::vector<double> analytic;
    std::vector<double> empirical;
    std::vector<double> ci_upper;
    std::vector<int> verdict;  // 1 pass, 0 fail, -1 precondition skipped
    bool overall_pass = true;
    long n_paths = 0;
    std::uint64_t seed = 0;

    nlohmann::json to_json() const {
        nlohmann::json entries = nlohmann::json::array();
        for (std::size_t i = 0; i < lambdas.size(); ++i)
            entries.push_back({{"lambda", lambdas[i]},
                               {"analytic", analytic[i]},
                               {"empirical", empirical[i]},
                               {"ci_upper", ci_upper[i]},
                               {"verdict", verdict[i] == 1   ? "pass"
                                           : verdict[i] == 0 ? "fail"
                                                             : "skipped"}});
        return {{"spec", spec_json},
                {"bound_kind", bound_kind},
                {"entries", entries},
                {"n_paths", n_paths},
                {"seed", seed},
                {"overall_pass", overall_pass}};
    }

    std::string to_csv() const {
        std::ostringstream os;
        os.precision(12);
        os << "lambda,analytic,empirical,ci_upper,verdict\n";
        for (std::size_t i = 0; i < lambdas.size(); ++i)
            os << lambdas[i] << ',' << analytic[i] << ',' << empirical[i] << ',' << ci_upper[i]
               << ','
               << (verdict[i] == 1   ? "pass"
                   : verdict[i] == 0 ? "fail"
                                     : "skipped")
               << '\n';
        return os.str();
    }
};

/// Empirical maxima tail over the lambda grid, with exact one-sided 99% upper
/// confidence bounds.  Uses the signed running maximum.
inline TailBoundReport empirical_max_tail(const ExperimentSpec& spec) {
    const auto maxima = simulate_maxima(spec);
    TailBoundReport rep;
    to_json(rep.spec_json, spec);
    rep.bound_kind = "none";
    rep.n_paths = spec.n_paths;
    rep.seed = spec.seed;
    std::vector<double> sorted = maxima.max_signed;
    std::sort(sorted.begin(), sorted.end());
    for (double lam : spec.lambda_grid) {
        const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), lam);
        const long k = static_cast<long>(above);
        rep.lambdas.push_back(lam);
        rep.analytic.push_back(0.0);
        rep.empirical.push_back(static_cast<double>(k) / static_cast<double>(spec.n_paths));
        rep.ci_upper.push_back(clopper_pearson_upper(k, spec.n_paths));
        rep.verdict.push_back(1);
    }
    return rep;
}

/// Full dominance comparison: analytic bound vs the 99% upper confidence
/// bound of the empirical tail, per lambda.  Lambdas violating a bound's
/// precondition are flagged skipped, not failed.  overall_pass is true iff
/// every non-skipped verdict passes.
inline TailBoundReport dominance_report(const ExperimentSpec& spec, const BoundSpec& bound) {
    const auto maxima = simulate_maxima(spec);
    const bool use_abs = bound.kind == "fernique";
    std::vector<double> sorted = use_abs ? maxima.max_abs : maxima.max_signed;
    std::sort(sorted.begin(), sorted.end());

    TailBoundReport rep;
    to_json(rep.spec_json, spec);
    rep.bound_kind = bound.kind;
    rep.n_paths = spec.n_paths;
    rep.seed = spec.seed;

    std::optional<DeterministicIntegrand> f;
    if (spec.kind != ExperimentKind::state_dependent_integrand)
        f = make_integrand(spec.integrand_name, spec.integrand_params);

    for (double lam : spec.lambda_grid) {
        const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), lam);
        const long k = static_cast<long>(above);
        const double emp = static_cast<double>(k) / static_cast<double>(spec.n_paths);
        const double ci = clopper_pearson_upper(k, spec.n_paths);

        double analytic = std::numeric_limits<double>::quiet_NaN();
        int verdict;
        try {
            if (bound.kind == "slepian") {
                analytic = bound.optimize_r
                               ? slepian_optimize_r(*f, lam, spec.alpha, bound.quad_level).bound
                               : slepian_tail_bound(*f, lam, bound.r, spec.alpha,
                                                    bound.quad_level);
            } else if (bound.kind == "fernique") {
                analytic =
                    fernique_tail_bound(*f, lam, bound.m, spec.alpha, bound.quad_level, true);
            } else if (bound.kind == "maxf") {
                if (spec.kind != ExperimentKind::state_dependent_integrand)
                    throw error("maxf bound applies to state-dependent integrands");
                analytic = maxf_tail_bound(
                    {bound.gamma, std::abs(spec.f00), std::abs(spec.ft), std::abs(spec.fx), lam},
                    spec.alpha);
            } else {
                throw error("unknown bound kind '" + bound.kind + "'");
            }
            verdict = analytic >= ci ? 1 : 0;
        } catch (const hypothesis_error&) {
            verdict = -1;  // precondition not met at this lambda
        }
        rep.lambdas.push_back(lam);
        rep.analytic.push_back(analytic);
        rep.empirical.push_back(emp);
        rep.ci_upper.push_back(ci);
        rep.verdict.push_back(verdict);
        if (verdict == 0) rep.overall_pass = false;
    }
    return rep;
}

}  // namespace pathcalc
