#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pathcalc/detail/fft.hpp"
#include "pathcalc/errors.hpp"
#include "pathcalc/grid_path.hpp"
#include "pathcalc/rng.hpp"

namespace pathcalc {

/// Kernel constant of the fBm covariance,
///   C = -Gamma(1-alpha)/alpha * cos((1+alpha)pi/2) / ((1+alpha)pi/2),
/// evaluated through sin(alpha pi/2) for stability near alpha = 0, where the
/// limit value is 1 (ordinary Brownian motion with variance 2t).
inline double kernel_constant(double alpha) {
    if (!(std::abs(alpha) < 1.0))
        throw hypothesis_error("kernel_constant: need |alpha| < 1");
    if (alpha == 0.0) return 1.0;
    const double half_pi = std::numbers::pi / 2.0;
    return std::tgamma(1.0 - alpha) * std::sin(alpha * half_pi) /
           (alpha * (1.0 + alpha) * half_pi);
}

/// E(xi_alpha(s) xi_alpha(t)) = C (s^(1+a) + t^(1+a) - |s-t|^(1+a)).
inline double covariance(double alpha, double s, double t) {
    if (s < 0.0 || t < 0.0) throw hypothesis_error("covariance: need s, t >= 0");
    const double p = 1.0 + alpha;
    return kernel_constant(alpha) *
           (std::pow(s, p) + std::pow(t, p) - std::pow(std::abs(s - t), p));
}

/// E[(xi(t)-xi(s))(xi(v)-xi(u))], the bilinear expansion of the covariance.
inline double increment_covariance(double alpha, double s, double t, double u, double v) {
    if (!(s < t) || !(u < v))
        throw hypothesis_error("increment_covariance: need s < t and u < v");
    const double p = 1.0 + alpha;
    return kernel_constant(alpha) *
           (std::pow(std::abs(t - u), p) + std::pow(std::abs(s - v), p) -
            std::pow(std::abs(t - v), p) - std::pow(std::abs(s - u), p));
}

enum class FbmMethod {
    automatic,  // cholesky up to level 8, circulant embedding above
    cholesky,
    circulant,
};

struct FbmSpec {
    double alpha = 0.5;
    double horizon = 1.0;
    int level = 10;
    std::uint64_t seed = 0;
    FbmMethod method = FbmMethod::automatic;

    void validate() const {
        if (!(std::abs(alpha) < 1.0)) throw hypothesis_error("FbmSpec: need |alpha| < 1");
        if (!(horizon > 0.0)) throw hypothesis_error("FbmSpec: need horizon > 0");
        if (level < 0 || level > 24) throw hypothesis_error("FbmSpec: level out of range");
    }
};

/// Exact Gaussian sampler for fBm on a dyadic grid.  Stationary increments
/// give a symmetric Toeplitz increment covariance; the default backend is its
/// Cholesky factor, with circulant embedding (same exact distribution,
/// O(n log n) per path) for fine grids.  Paths are deterministic functions of
/// (spec, path_index).
class FbmSampler {
public:
    explicit FbmSampler(const FbmSpec& spec) : spec_(spec) {
        spec_.validate();
        const std::size_t n = std::size_t{1} << spec_.level;
        const double h = spec_.horizon / static_cast<double>(n);
        const double p = 1.0 + spec_.alpha;
        const double scale = kernel_constant(spec_.alpha) * std::pow(h, p);
        std::vector<double> r(n + 1);
        for (std::size_t k = 0; k <= n; ++k) {
            const double kk = static_cast<double>(k);
            r[k] = scale * (std::pow(kk + 1.0, p) - 2.0 * std::pow(kk, p) +
                            std::pow(std::abs(kk - 1.0), p));
        }

        method_ = spec_.method;
        if (method_ == FbmMethod::automatic)
            method_ = spec_.level <= 8 ? FbmMethod::cholesky : FbmMethod::circulant;

        if (method_ == FbmMethod::cholesky)
            build_cholesky(r);
        else
            build_circulant(r);
    }

    FbmMethod method() const { return method_; }
    const FbmSpec& spec() const { return spec_; }

    GridPath sample(std::uint64_t path_index = 0) const {
        const std::size_t n = std::size_t{1} << spec_.level;
        CounterRng rng(spec_.seed, path_index);
        std::vector<double> incs(n);
        if (method_ == FbmMethod::cholesky) {
            Eigen::VectorXd z(static_cast<Eigen::Index>(n));
            for (std::size_t i = 0; i < n; ++i)
                z[static_cast<Eigen::Index>(i)] = rng.next_gaussian();
            Eigen::VectorXd y = chol_ * z;
            for (std::size_t i = 0; i < n; ++i) incs[i] = y[static_cast<Eigen::Index>(i)];
        } else {
            const std::size_t M = 2 * n;
            std::vector<std::complex<double>> z(M);
            for (std::size_t k = 0; k < M; ++k) {
                const double a = rng.next_gaussian();
                const double b = rng.next_gaussian();
                z[k] = sqrt_lambda_[k] * std::complex<double>(a, b);
            }
            detail::fft_pow2(z, +1);
            for (std::size_t i = 0; i < n; ++i) incs[i] = z[i].real();
        }
        std::vector<double> vals(n + 1);
        vals[0] = 0.0;
        for (std::size_t i = 0; i < n; ++i) vals[i + 1] = vals[i] + incs[i];
        return GridPath(0.0, spec_.horizon, spec_.level, std::move(vals));
    }

private:
    void build_cholesky(const std::vector<double>& r) {
        const auto n = static_cast<Eigen::Index>(r.size() - 1);
        Eigen::MatrixXd R(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) R(i, j) = r[static_cast<std::size_t>(std::abs(i - j))];
        Eigen::LLT<Eigen::MatrixXd> llt(R);
        if (llt.info() != Eigen::Success) {
            // PD in exact arithmetic; one jitter pass covers roundoff only.
            R.diagonal().array() += 1e-12 * r[0];
            llt.compute(R);
            if (llt.info() != Eigen::Success) {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R, Eigen::EigenvaluesOnly);
                throw factorization_error(
                    "increment covariance not PD after jitter; smallest eigenvalue " +
                    std::to_string(es.eigenvalues().minCoeff()));
            }
        }
        chol_ = llt.matrixL();
    }

    void build_circulant(const std::vector<double>& r) {
        const std::size_t n = r.size() - 1;
        const std::size_t M = 2 * n;
        std::vector<std::complex<double>> c(M);
        for (std::size_t k = 0; k <= n; ++k) c[k] = r[k];
        for (std::size_t k = 1; k < n; ++k) c[M - k] = r[k];
        detail::fft_pow2(c, -1);
        sqrt_lambda_.resize(M);
        double lmax = 0.0;
        for (const auto& v : c) lmax = std::max(lmax, v.real());
        for (std::size_t k = 0; k < M; ++k) {
            double lam = c[k].real();
            if (lam < 0.0) {
                if (lam < -1e-10 * lmax)
                    throw factorization_error(
                        "circulant embedding not PSD; smallest eigenvalue " + std::to_string(lam));
                lam = 0.0;
            }
            sqrt_lambda_[k] = std::sqrt(lam / static_cast<double>(M));
        }
    }

    FbmSpec spec_;
    FbmMethod method_;
    Eigen::MatrixXd chol_;
    std::vector<double> sqrt_lambda_;
};

/// One-shot convenience sampler.
inline GridPath sample_path(const FbmSpec& spec, std::uint64_t path_index = 0) {
    return FbmSampler(spec).sample(path_index);
}

}  // namespace pathcalc
