#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ergocert/error.hpp"
#include "ergocert/grid.hpp"
#include "ergocert/hitting.hpp"
#include "ergocert/minsol.hpp"
#include "ergocert/region.hpp"
#include "ergocert/testfn.hpp"

namespace ergocert {

/// A truncated kernel on the states of a compact E, with the map from its
/// local indices back to the base grid.
struct Truncated {
    FiniteKernel kernel;
    std::vector<std::size_t> to_base;
};

/// Augmented kernel on E:
///   x in E \ A : P(x, B) + P(x, E^c) psi(B n A) / psi(A)
///   x in A     : psi(B) / psi(E)
/// with psi the grid reference weights. Escape mass of the base row and mass
/// sent to base states outside E both count as P(x, E^c).
inline Truncated truncate(const FiniteKernel& base, const Region& E, const Region& A) {
    Truncated t;
    std::vector<long> local(base.size(), -1);
    for (std::size_t i = 0; i < base.size(); ++i) {
        if (E.contains(base.points[i])) {
            local[i] = static_cast<long>(t.to_base.size());
            t.to_base.push_back(i);
        }
    }
    const std::size_t n = t.to_base.size();
    if (n == 0) throw ConfigError("truncation.ladder", "compact contains no grid state");

    std::vector<char> in_a(n, 0);
    double psi_a = 0.0;
    double psi_e = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        const std::size_t b = t.to_base[l];
        psi_e += base.weights[b];
        if (A.contains(base.points[b])) {
            in_a[l] = 1;
            psi_a += base.weights[b];
        }
    }
    if (!(psi_a > 0.0)) throw ConfigError("target", "target has zero reference measure on the grid");
    for (std::size_t i = 0; i < base.size(); ++i) {
        if (A.contains(base.points[i]) && local[i] < 0) {
            throw ConfigError("truncation.ladder", "target is not contained in the compact");
        }
    }

    FiniteKernel& k = t.kernel;
    k.rows.resize(n);
    k.escape.assign(n, 0.0);
    k.points.resize(n);
    k.weights.resize(n);
    for (std::size_t l = 0; l < n; ++l) {
        k.points[l] = base.points[t.to_base[l]];
        k.weights[l] = base.weights[t.to_base[l]];
    }
    k.provenance = base.provenance + " truncated to " + E.describe() + " with target " + A.describe();

    for (std::size_t l = 0; l < n; ++l) {
        auto& row = k.rows[l];
        if (in_a[l]) {
            row.reserve(n);
            for (std::size_t j = 0; j < n; ++j) row.push_back({j, k.weights[j] / psi_e});
            continue;
        }
        const std::size_t b = t.to_base[l];
        std::map<std::size_t, double> acc;
        double outside = base.escape[b];
        for (const auto& e : base.rows[b]) {
            if (local[e.to] >= 0) acc[static_cast<std::size_t>(local[e.to])] += e.p;
            else outside += e.p;
        }
        if (outside > 0.0) {
            for (std::size_t j = 0; j < n; ++j)
                if (in_a[j]) acc[j] += outside * k.weights[j] / psi_a;
        }
        row = detail::merge_entries(acc);
    }
    return t;
}

/// Routes each row's escape mass into A in proportion to the reference
/// weights and keeps every other entry, including the rows on A.
inline FiniteKernel route_escape(const FiniteKernel& base, const Region& A) {
    FiniteKernel k = base;
    double psi_a = 0.0;
    std::vector<std::size_t> targets;
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (A.contains(k.points[i])) {
            targets.push_back(i);
            psi_a += k.weights[i];
        }
    }
    if (!(psi_a > 0.0)) throw ConfigError("target", "target has zero reference measure on the grid");
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (k.escape[i] <= 0.0) continue;
        std::map<std::size_t, double> acc;
        for (const auto& e : k.rows[i]) acc[e.to] += e.p;
        for (std::size_t j : targets) acc[j] += k.escape[i] * k.weights[j] / psi_a;
        k.rows[i] = detail::merge_entries(acc);
        k.escape[i] = 0.0;
    }
    k.provenance += " with escape routed to " + A.describe();
    return k;
}

/// Base kernel on the largest compact, the target A, and the increasing
/// ladder E_1 < E_2 < ... of compacts.
struct TruncationFamily {
    FiniteKernel base;
    Region target;
    std::vector<Region> ladder;
    std::vector<std::string> labels;
    std::function<std::optional<std::size_t>(double)> locate;  ///< point to base state; exact match when unset
};

struct HittingSequence {
    std::vector<Truncated> rungs;
    std::vector<MinSolResult> solutions;       ///< E^(m)_x tau^(m)+_A on each rung, local indices
    std::vector<double> sup_off_target;        ///< sup over E_m \ A, per rung
    std::vector<double> stochastic_deviation;  ///< max |row sum - 1| per rung
    double worst_monotonicity = 0.0;           ///< most negative step between consecutive rungs

    /// Value of rung m at base state b, if b lies in E_m.
    std::optional<double> value(std::size_t m, std::size_t b) const {
        const auto& map = rungs[m].to_base;
        auto it = std::lower_bound(map.begin(), map.end(), b);
        if (it == map.end() || *it != b) return std::nullopt;
        return solutions[m].solution[static_cast<std::size_t>(it - map.begin())];
    }
};

/// Solves E^(m) tau_A^+ on every rung and asserts monotonicity in m on the
/// shared states off A.
inline HittingSequence hitting_sequence(const TruncationFamily& fam, const SolverSettings& s = {}) {
    if (fam.ladder.empty()) throw ConfigError("truncation.ladder", "ladder is empty");
    HittingSequence hs;
    for (const auto& E : fam.ladder) {
        Truncated t = truncate(fam.base, E, fam.target);
        if (!hs.rungs.empty() && t.to_base.size() <= hs.rungs.back().to_base.size()) {
            throw ConfigError("truncation.ladder", "ladder must be strictly increasing");
        }
        hs.stochastic_deviation.push_back(t.kernel.max_stochastic_deviation());
        MinSolResult r = expected_return_time(t.kernel, fam.target, s);
        double sup = 0.0;
        for (std::size_t l = 0; l < t.to_base.size(); ++l)
            if (!fam.target.contains(t.kernel.points[l])) sup = std::max(sup, r.solution[l]);
        hs.sup_off_target.push_back(sup);
        hs.rungs.push_back(std::move(t));
        hs.solutions.push_back(std::move(r));
    }
    for (std::size_t m = 1; m < hs.rungs.size(); ++m) {
        const auto& prev = hs.rungs[m - 1];
        for (std::size_t l = 0; l < prev.to_base.size(); ++l) {
            const std::size_t b = prev.to_base[l];
            if (fam.target.contains(fam.base.points[b])) continue;
            const double lo = hs.solutions[m - 1].solution[l];
            const auto hi = hs.value(m, b);
            if (!hi) throw ConfigError("truncation.ladder", "ladder must be nested");
            if (std::isinf(lo)) continue;
            const double step = *hi - lo;
            hs.worst_monotonicity = std::min(hs.worst_monotonicity, step);
            if (step < -(s.tol * 100.0) * std::max(1.0, std::abs(lo))) {
                throw InternalConsistencyError("rung " + std::to_string(m) + " decreased at x = " +
                                               std::to_string(fam.base.points[b]) + " by " + std::to_string(-step));
            }
        }
    }
    return hs;
}

struct LowerBoundFunctions {
    TestFunctionSequence sequence;
    bool verified = true;
    double worst_margin = 0.0;
    std::vector<double> witnesses;  ///< states where PW >= W - 1 failed beyond slack
};

/// W^(m)(x) = 1{x in E_m \ A} E^(m)_x tau^(m)+_A, checked against the base
/// kernel: PW^(m) >= W^(m) - 1 at every base state off A.
inline LowerBoundFunctions lower_bound_functions(const TruncationFamily& fam, const HittingSequence& hs,
                                                 double slack = 1e-9) {
    LowerBoundFunctions out;
    auto& seq = out.sequence;
    seq.target = "non-strong";
    seq.region = fam.target;
    seq.note = "truncation lower-bound functions";

    std::function<std::optional<std::size_t>(double)> locate = fam.locate;
    if (!locate) {
        auto pts = std::make_shared<const std::vector<double>>(fam.base.points);
        locate = [pts](double x) -> std::optional<std::size_t> {
            auto it = std::lower_bound(pts->begin(), pts->end(), x);
            if (it == pts->end() || *it != x) return std::nullopt;
            return static_cast<std::size_t>(it - pts->begin());
        };
    }

    for (std::size_t m = 0; m < hs.rungs.size(); ++m) {
        auto table = std::make_shared<std::vector<double>>(fam.base.size(), 0.0);
        for (std::size_t l = 0; l < hs.rungs[m].to_base.size(); ++l) {
            const std::size_t b = hs.rungs[m].to_base[l];
            if (!fam.target.contains(fam.base.points[b])) (*table)[b] = hs.solutions[m].solution[l];
        }
        for (std::size_t b = 0; b < fam.base.size(); ++b) {
            if (fam.target.contains(fam.base.points[b])) continue;
            double pw = 0.0;
            for (const auto& e : fam.base.rows[b]) pw += e.p * (*table)[e.to];
            const double margin = pw - ((*table)[b] - 1.0);
            out.worst_margin = std::min(out.worst_margin, margin);
            if (margin < -slack * std::max(1.0, std::abs(pw))) {
                out.verified = false;
                out.witnesses.push_back(fam.base.points[b]);
            }
        }
        TestFunction w;
        const Region target = fam.target;
        w.fn = [table, locate, target](double x) {
            if (target.contains(x)) return 0.0;
            const auto b = locate(x);
            return b ? (*table)[*b] : 0.0;
        };
        w.label = "W^(" + std::to_string(m + 1) + ")";
        double hi = 0.0;
        for (std::size_t b : hs.rungs[m].to_base) hi = std::max(hi, fam.base.points[b]);
        w.support_hi = hi;
        seq.functions.push_back(std::move(w));
        seq.rungs.push_back(static_cast<double>(m + 1));
    }
    return out;
}

}  // namespace ergocert
