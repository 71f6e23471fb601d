#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace pathcalc {

namespace detail {

// SplitMix64 finalizer.  Statistically solid as a bijective mixer.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Counter-based generator keyed by (seed, stream).  The n-th output is a
/// pure function of (seed, stream, n), so replicas indexed by stream are
/// independent and order-insensitive; identical keys reproduce bit-identical
/// sequences.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(detail::mix64(seed ^ (0xD1B54A32D192ED03ull * (stream + 1)))) {}

    std::uint64_t next_u64() {
        return detail::mix64(key_ + (++counter_) * 0x9E3779B97F4A7C15ull);
    }

    /// Uniform draw in (0, 1].
    double next_uniform() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller on consecutive uniform pairs.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace pathcalc
