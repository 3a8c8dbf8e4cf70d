#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ergocert/error.hpp"
#include "ergocert/kernel.hpp"

namespace ergocert {

/// Maps a state space onto finitely many grid states. Continuous schemes
/// partition [lower, M) into bins of width h represented by their midpoints,
/// optionally with a separate state for the point 0. Countable schemes use
/// the integers 0..N-1.
class GridScheme {
public:
    static GridScheme continuous(double cutoff, double bin_width, double lower = 0.0, bool origin_atom = false,
                                 double origin_weight = 1.0) {
        if (!(bin_width > 0.0) || !std::isfinite(bin_width)) throw ConfigError("grid.bin_width", "must be positive");
        if (!(cutoff > lower) || !std::isfinite(cutoff)) throw ConfigError("grid.cutoff", "must exceed the lower bound");
        const double ratio = (cutoff - lower) / bin_width;
        const double bins = std::round(ratio);
        if (bins < 1.0 || std::abs(ratio - bins) > 1e-9 * std::max(1.0, ratio)) {
            throw ConfigError("grid.bin_width", "cutoff range must be an integer multiple of the bin width");
        }
        GridScheme g;
        g.kind_ = SpaceKind::continuous;
        g.lower_ = lower;
        g.cutoff_ = cutoff;
        g.h_ = bin_width;
        g.bins_ = static_cast<std::size_t>(bins);
        g.origin_ = origin_atom;
        if (origin_atom && !(lower <= 0.0 && 0.0 < cutoff)) throw ConfigError("grid.origin_atom", "0 must lie in the grid");
        if (origin_atom && !(origin_weight > 0.0)) throw ConfigError("grid.origin_weight", "must be positive");
        g.origin_weight_ = origin_weight;
        return g;
    }

    static GridScheme countable(std::size_t n) {
        if (n == 0) throw ConfigError("grid.states", "grid with zero states");
        GridScheme g;
        g.kind_ = SpaceKind::countable;
        g.bins_ = n;
        g.cutoff_ = static_cast<double>(n);
        g.h_ = 1.0;
        return g;
    }

    SpaceKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return bins_ + (origin_ ? 1 : 0); }
    double cutoff() const noexcept { return cutoff_; }
    double bin_width() const noexcept { return h_; }
    double lower() const noexcept { return lower_; }
    bool has_origin() const noexcept { return origin_; }

    /// Representative point of grid state i (the origin state comes first).
    double point(std::size_t i) const {
        if (kind_ == SpaceKind::countable) return static_cast<double>(i);
        if (origin_) {
            if (i == 0) return 0.0;
            --i;
        }
        return lower_ + (static_cast<double>(i) + 0.5) * h_;
    }

    /// Reference-measure weight of grid state i: bin width or counting.
    double weight(std::size_t i) const {
        if (kind_ == SpaceKind::countable) return 1.0;
        if (origin_ && i == 0) return origin_weight_;
        return h_;
    }

    double bin_lo(std::size_t i) const {
        if (origin_) {
            if (i == 0) return 0.0;
            --i;
        }
        return lower_ + static_cast<double>(i) * h_;
    }

    /// Grid state containing y, or nothing when y lies outside [lower, M).
    std::optional<std::size_t> locate(double y) const {
        if (kind_ == SpaceKind::countable) {
            if (y < 0.0 || y >= cutoff_ || y != std::floor(y)) return std::nullopt;
            return static_cast<std::size_t>(y);
        }
        if (origin_ && y == 0.0) return 0;
        if (!(y >= lower_) || !(y < cutoff_)) return std::nullopt;
        auto k = static_cast<std::size_t>(std::floor((y - lower_) / h_));
        if (k >= bins_) k = bins_ - 1;
        return k + (origin_ ? 1 : 0);
    }

    std::vector<double> points() const {
        std::vector<double> out(size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = point(i);
        return out;
    }

    std::vector<double> weights() const {
        std::vector<double> out(size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = weight(i);
        return out;
    }

    std::string describe() const {
        if (kind_ == SpaceKind::countable) return "countable{0.." + std::to_string(bins_ - 1) + "}";
        return "bins[" + std::to_string(lower_) + "," + std::to_string(cutoff_) + ") h=" + std::to_string(h_) +
               (origin_ ? " +origin" : "");
    }

private:
    SpaceKind kind_ = SpaceKind::countable;
    double lower_ = 0.0;
    double cutoff_ = 0.0;
    double h_ = 1.0;
    std::size_t bins_ = 0;
    bool origin_ = false;
    double origin_weight_ = 1.0;
};

struct Entry {
    std::size_t to = 0;
    double p = 0.0;
};

/// Sparse substochastic matrix on grid states. `escape[i]` is the mass of
/// row i that left the grid; it is recorded, never renormalized away.
struct FiniteKernel {
    std::vector<std::vector<Entry>> rows;
    std::vector<double> escape;
    std::vector<double> points;
    std::vector<double> weights;
    std::string provenance;

    std::size_t size() const noexcept { return rows.size(); }

    double row_sum(std::size_t i) const {
        double s = 0.0;
        for (const auto& e : rows[i]) s += e.p;
        return s;
    }

    double at(std::size_t i, std::size_t j) const {
        double s = 0.0;
        for (const auto& e : rows[i])
            if (e.to == j) s += e.p;
        return s;
    }

    /// Largest |row sum + escape - 1| over all rows.
    double max_mass_defect() const {
        double worst = 0.0;
        for (std::size_t i = 0; i < size(); ++i) worst = std::max(worst, std::abs(row_sum(i) + escape[i] - 1.0));
        return worst;
    }

    /// Largest |row sum - 1|, ignoring escape.
    double max_stochastic_deviation() const {
        double worst = 0.0;
        for (std::size_t i = 0; i < size(); ++i) worst = std::max(worst, std::abs(row_sum(i) - 1.0));
        return worst;
    }
};

/// Builds a FiniteKernel from explicit rows on states 0..n-1.
inline FiniteKernel finite_kernel(std::vector<std::vector<Entry>> rows, std::string provenance = "inline") {
    FiniteKernel fk;
    const std::size_t n = rows.size();
    if (n == 0) throw ConfigError("model.inline.rows", "kernel with zero states");
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (const auto& e : rows[i]) {
            if (e.to >= n) throw ConfigError("model.inline.rows", "row " + std::to_string(i) + " targets a missing state");
            if (e.p < 0.0) throw ConfigError("model.inline.rows", "negative probability in row " + std::to_string(i));
            s += e.p;
        }
        fk.escape.push_back(std::max(0.0, 1.0 - s));
        fk.points.push_back(static_cast<double>(i));
        fk.weights.push_back(1.0);
    }
    fk.rows = std::move(rows);
    fk.provenance = std::move(provenance);
    return fk;
}

/// The kernel that a FiniteKernel represents, as a countable Kernel on its
/// state indices.
inline Kernel as_kernel(const FiniteKernel& fk) {
    auto shared = std::make_shared<const FiniteKernel>(fk);
    return Kernel(
        SpaceKind::countable,
        [shared](double x) {
            TransitionRow r;
            const auto i = static_cast<std::size_t>(x);
            if (i >= shared->size()) throw DomainError("state outside the finite kernel");
            for (const auto& e : shared->rows[i]) r.atoms.push_back({static_cast<double>(e.to), e.p});
            return r;
        },
        fk.provenance);
}

namespace detail {

inline std::vector<Entry> merge_entries(std::map<std::size_t, double>& acc) {
    std::vector<Entry> out;
    out.reserve(acc.size());
    for (const auto& [to, p] : acc)
        if (p != 0.0) out.push_back({to, p});
    return out;
}

}  // namespace detail

struct DiscretizeOptions {
    int subpanels = 8;  ///< midpoint sub-panels per bin for density mass
};

/// Atoms are mapped exactly to their containing state; density mass is
/// integrated per bin by composite midpoint quadrature; everything that lands
/// outside the grid is booked as escape.
inline FiniteKernel discretize(const Kernel& k, const GridScheme& grid, const DiscretizeOptions& opt = {}) {
    if (grid.size() == 0) throw ConfigError("grid", "grid with zero bins");
    FiniteKernel fk;
    const std::size_t n = grid.size();
    fk.rows.resize(n);
    fk.escape.assign(n, 0.0);
    fk.points = grid.points();
    fk.weights = grid.weights();
    fk.provenance = k.name() + " on " + grid.describe();

    const std::size_t first_bin = grid.has_origin() ? 1 : 0;
    for (std::size_t i = 0; i < n; ++i) {
        const TransitionRow r = k.row(fk.points[i]);
        std::map<std::size_t, double> acc;
        double escaped = 0.0;
        for (const auto& a : r.atoms) {
            if (auto j = grid.locate(a.at)) acc[*j] += a.mass;
            else escaped += a.mass;
        }
        if (r.tail) {
            const auto& t = *r.tail;
            long j = t.first;
            for (; static_cast<double>(j) < grid.cutoff(); ++j) {
                if (auto s = grid.locate(static_cast<double>(j))) acc[*s] += t.pmf(j);
            }
            escaped += t.mass_from(j);
        }
        if (r.density) {
            const auto& d = *r.density;
            double inside = 0.0;
            for (std::size_t b = first_bin; b < n; ++b) {
                const double lo = std::max(grid.bin_lo(b), d.lo);
                const double hi = std::min(grid.bin_lo(b) + grid.bin_width(), d.hi);
                if (!(hi > lo)) continue;
                const double w = (hi - lo) / opt.subpanels;
                double m = 0.0;
                for (int s = 0; s < opt.subpanels; ++s) m += d.pdf(lo + (s + 0.5) * w);
                m *= w;
                acc[b] += m;
                inside += m;
            }
            escaped += std::max(0.0, d.mass - inside);
        }
        fk.rows[i] = detail::merge_entries(acc);
        fk.escape[i] = escaped;
    }
    return fk;
}

}  // namespace ergocert
