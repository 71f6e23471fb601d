#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pathcalc/errors.hpp"

namespace pathcalc {

/// A real-valued function sampled on a uniform dyadic grid over [t0, t1]:
/// 2^level + 1 nodes, node i at t0 + i*(t1-t0)/2^level.  Values between
/// nodes are deliberately not defined; the dyadic machinery never needs
/// off-grid evaluation.
class GridPath {
public:
    GridPath(double t0, double t1, int level, std::vector<double> values)
        : t0_(t0), t1_(t1), level_(level), values_(std::move(values)) {
        if (!(t1 > t0) || level < 0 || level > 30)
            throw invalid_path_error("GridPath: need t1 > t0 and 0 <= level <= 30");
        if (values_.size() != (std::size_t{1} << level_) + 1)
            throw invalid_path_error("GridPath: values.size() != 2^level + 1");
        for (double v : values_)
            if (!std::isfinite(v))
                throw invalid_path_error("GridPath: non-finite value");
    }

    template <typename Fn>
    static GridPath from_function(double t0, double t1, int level, Fn&& fn) {
        const std::size_t n = (std::size_t{1} << level);
        std::vector<double> vals(n + 1);
        for (std::size_t i = 0; i <= n; ++i)
            vals[i] = fn(t0 + static_cast<double>(i) * (t1 - t0) / static_cast<double>(n));
        return GridPath(t0, t1, level, std::move(vals));
    }

    double t0() const { return t0_; }
    double t1() const { return t1_; }
    int level() const { return level_; }
    std::size_t cells() const { return std::size_t{1} << level_; }
    std::size_t size() const { return values_.size(); }
    double cell_width() const { return (t1_ - t0_) / static_cast<double>(cells()); }
    double node_time(std::size_t i) const {
        return t0_ + static_cast<double>(i) * (t1_ - t0_) / static_cast<double>(cells());
    }
    double operator[](std::size_t i) const { return values_[i]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& mutable_values() { return values_; }

    /// Index of the grid node at time t (relative tolerance 1e-9 of the span).
    std::size_t index_of(double t) const {
        const double x = (t - t0_) / (t1_ - t0_) * static_cast<double>(cells());
        const auto i = static_cast<long long>(std::llround(x));
        if (i < 0 || i > static_cast<long long>(cells()) ||
            std::abs(x - static_cast<double>(i)) > 1e-9 * static_cast<double>(cells()))
            throw grid_error("time " + std::to_string(t) + " is not a grid node");
        return static_cast<std::size_t>(i);
    }

    bool same_grid(const GridPath& other) const {
        return level_ == other.level_ && t0_ == other.t0_ && t1_ == other.t1_;
    }

    /// Restriction to a coarser dyadic sub-grid (every 2^(level-l)-th node).
    GridPath restrict_to_level(int l) const {
        if (l < 0 || l > level_)
            throw depth_error("restrict_to_level: level out of range");
        const std::size_t stride = std::size_t{1} << (level_ - l);
        std::vector<double> vals;
        vals.reserve((std::size_t{1} << l) + 1);
        for (std::size_t i = 0; i < values_.size(); i += stride) vals.push_back(values_[i]);
        return GridPath(t0_, t1_, l, std::move(vals));
    }

    GridPath scaled(double factor) const {
        std::vector<double> vals(values_);
        for (double& v : vals) v *= factor;
        return GridPath(t0_, t1_, level_, std::move(vals));
    }

    /// FNV-1a over the raw value bytes; used to tag artifacts with the driver.
    std::uint64_t content_hash() const {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (double v : values_) {
            std::uint64_t bits;
            static_assert(sizeof(bits) == sizeof(v));
            std::memcpy(&bits, &v, sizeof(bits));
            for (int b = 0; b < 8; ++b) {
                h ^= (bits >> (8 * b)) & 0xffu;
                h *= 0x100000001b3ull;
            }
        }
        return h;
    }

private:
    double t0_, t1_;
    int level_;
    std::vector<double> values_;
};

/// CSV format: header "t,value", one row per node, times ascending.
inline void write_csv(const GridPath& path, std::ostream& os) {
    os << "t,value\n";
    os.precision(17);
    for (std::size_t i = 0; i < path.size(); ++i)
        os << path.node_time(i) << ',' << path[i] << '\n';
}

inline void write_csv(const GridPath& path, const std::string& filename) {
    std::ofstream os(filename);
    if (!os) throw error("cannot open " + filename + " for writing");
    write_csv(path, os);
}

/// Reads a GridPath CSV, verifying uniform dyadic spacing within relative
/// tolerance 1e-9 and a node count of the form 2^n + 1.
inline GridPath read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw invalid_path_error("empty CSV");
    std::vector<double> times, vals;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw invalid_path_error("CSV row without comma: " + line);
        times.push_back(std::stod(line.substr(0, comma)));
        vals.push_back(std::stod(line.substr(comma + 1)));
    }
    const std::size_t n = times.size();
    if (n < 2) throw invalid_path_error("CSV needs at least two nodes");
    int level = -1;
    for (int l = 0; l <= 30; ++l)
        if ((std::size_t{1} << l) + 1 == n) { level = l; break; }
    if (level < 0) throw invalid_path_error("CSV node count is not 2^n + 1");
    const double span = times.back() - times.front();
    if (!(span > 0)) throw invalid_path_error("CSV times must be ascending");
    const double h = span / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double expect = times.front() + static_cast<double>(i) * h;
        if (std::abs(times[i] - expect) > 1e-9 * std::max(1.0, std::abs(span)))
            throw invalid_path_error("CSV grid is not uniformly spaced");
    }
    return GridPath(times.front(), times.back(), level, std::move(vals));
}

inline GridPath read_csv(const std::string& filename) {
    std::ifstream is(filename);
    if (!is) throw error("cannot open " + filename);
    return read_csv(is);
}

}  // namespace pathcalc
