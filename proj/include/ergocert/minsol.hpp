#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ergocert/error.hpp"
#include "ergocert/grid.hpp"
#include "ergocert/region.hpp"

namespace ergocert {

/// Values beyond the divergence cap are stored as this sentinel.
inline constexpr double exceeds_cap = std::numeric_limits<double>::infinity();

struct ValueFunction {
    std::vector<double> values;
    std::string domain;

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    bool capped(std::size_t i) const { return std::isinf(values[i]); }

    double sup_finite() const {
        double m = 0.0;
        for (double v : values)
            if (std::isfinite(v)) m = std::max(m, std::abs(v));
        return m;
    }
};

/// f = rate * (kernel restricted to the complement of the restriction) f + forcing
struct ConeEquation {
    const FiniteKernel* base = nullptr;
    std::vector<char> restricted;  ///< 1 where the state lies in the restriction region
    double rate = 1.0;
    std::vector<double> forcing;

    std::size_t size() const noexcept { return forcing.size(); }
};

inline std::vector<char> resolve(const FiniteKernel& k, const Region& region) {
    std::vector<char> mask(k.size(), 0);
    for (std::size_t i = 0; i < k.size(); ++i) mask[i] = region.contains(k.points[i]) ? 1 : 0;
    return mask;
}

inline ConeEquation make_equation(const FiniteKernel& k, const Region& restriction, double rate,
                                  std::vector<double> forcing) {
    if (!(rate >= 1.0)) throw DomainError("rate must be at least 1");
    if (forcing.size() != k.size()) throw DomainError("forcing has the wrong length");
    for (double g : forcing)
        if (!(g >= 0.0)) throw DomainError("forcing must be nonnegative");
    return ConeEquation{&k, resolve(k, restriction), rate, std::move(forcing)};
}

inline ConeEquation make_equation(const FiniteKernel& k, const Region& restriction, double rate, double constant) {
    return make_equation(k, restriction, rate, std::vector<double>(k.size(), constant));
}

enum class SolveStatus { converged, diverged, iteration_cap };

inline std::string to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::diverged: return "exceeds-cap";
    case SolveStatus::iteration_cap: return "iteration-cap";
    }
    return "unknown";
}

enum class Scheme { gauss_seidel, jacobi };

struct SolverSettings {
    double tol = 1e-11;   ///< relative to max(1, sup of the finite iterate)
    double cap = 1e12;
    long max_iter = 1'000'000;
    Scheme scheme = Scheme::gauss_seidel;
};

struct MinSolResult {
    ValueFunction solution;
    long iterations = 0;
    double increment = 0.0;
    double residual = 0.0;
    SolveStatus status = SolveStatus::converged;
    std::vector<std::size_t> diverged_at;

    bool converged() const noexcept { return status == SolveStatus::converged; }
    std::string label() const { return to_string(status); }
};

namespace detail {

/// r * sum over unrestricted j of P_ij f_j, optionally leaving out j == i.
inline double apply_row(const ConeEquation& eq, std::size_t i, const std::vector<double>& f, bool skip_self) {
    double s = 0.0;
    for (const auto& e : eq.base->rows[i]) {
        if (eq.restricted[e.to] || (skip_self && e.to == i)) continue;
        if (e.p == 0.0) continue;
        s += e.p * f[e.to];
    }
    return eq.rate * s;
}

inline double self_weight(const ConeEquation& eq, std::size_t i) {
    if (eq.restricted[i]) return 0.0;
    double s = 0.0;
    for (const auto& e : eq.base->rows[i])
        if (e.to == i) s += e.p;
    return eq.rate * s;
}

inline double residual(const ConeEquation& eq, const std::vector<double>& f) {
    double worst = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!std::isfinite(f[i])) continue;
        const double rhs = apply_row(eq, i, f, false) + eq.forcing[i];
        if (!std::isfinite(rhs)) continue;
        worst = std::max(worst, std::abs(f[i] - rhs));
    }
    return worst;
}

}  // namespace detail

/// Minimal nonnegative solution by monotone successive approximation from 0.
/// Gauss-Seidel sweeps (forward then backward, with the self-loop solved in
/// place) are the default; Jacobi is the plain iteration f <- rHf + g. Any
/// value crossing `cap` is frozen at the sentinel and reported.
inline MinSolResult solve_minimal(const ConeEquation& eq, const SolverSettings& s = {}) {
    if (eq.base == nullptr) throw DomainError("equation has no kernel");
    if (!(s.tol > 0.0) || !(s.cap > 0.0)) throw DomainError("tol and cap must be positive");
    const std::size_t n = eq.size();
    if (eq.base->size() != n || eq.restricted.size() != n) throw DomainError("equation size mismatch");

    std::vector<double> self(n);
    for (std::size_t i = 0; i < n; ++i) self[i] = detail::self_weight(eq, i);

    MinSolResult res;
    std::vector<double> f(n, 0.0);
    std::vector<double> next(n, 0.0);

    auto update = [&](std::size_t i, double candidate, double& inc) {
        const double old = f[i];
        if (std::isinf(old)) return;
        if (candidate > s.cap || std::isnan(candidate)) candidate = exceeds_cap;
        const double floor_tol = 1e-12 * std::max(1.0, std::abs(old));
        if (candidate < old - floor_tol) {
            throw InternalConsistencyError("monotone iteration decreased at state " + std::to_string(i));
        }
        candidate = std::max(candidate, old);
        if (std::isfinite(candidate)) inc = std::max(inc, candidate - old);
        f[i] = candidate;
    };

    auto gs_value = [&](std::size_t i) {
        const double num = detail::apply_row(eq, i, f, true) + eq.forcing[i];
        const double den = 1.0 - self[i];
        if (den <= 0.0) return num > 0.0 ? exceeds_cap : 0.0;
        return num / den;
    };

    for (long it = 1; it <= s.max_iter; ++it) {
        double inc = 0.0;
        if (s.scheme == Scheme::gauss_seidel) {
            for (std::size_t i = 0; i < n; ++i) update(i, gs_value(i), inc);
            for (std::size_t i = n; i-- > 0;) update(i, gs_value(i), inc);
        } else {
            for (std::size_t i = 0; i < n; ++i) next[i] = detail::apply_row(eq, i, f, false) + eq.forcing[i];
            for (std::size_t i = 0; i < n; ++i) update(i, next[i], inc);
        }
        res.iterations = it;
        res.increment = inc;
        double scale = 1.0;
        for (double v : f)
            if (std::isfinite(v)) scale = std::max(scale, v);
        if (inc < s.tol * scale) {
            res.residual = detail::residual(eq, f);
            if (res.residual < s.tol * scale) break;
        }
        if (it == s.max_iter) {
            res.residual = detail::residual(eq, f);
            res.status = SolveStatus::iteration_cap;
        }
    }

    for (std::size_t i = 0; i < n; ++i)
        if (std::isinf(f[i])) res.diverged_at.push_back(i);
    if (!res.diverged_at.empty()) res.status = SolveStatus::diverged;
    res.solution.values = std::move(f);
    res.solution.domain = eq.base->provenance;
    return res;
}

inline double margin_slack(double slack, double scale) { return slack * std::max(1.0, std::abs(scale)); }

struct SupersolutionReport {
    bool supersolution = true;
    double worst_margin = std::numeric_limits<double>::infinity();
    std::optional<std::size_t> witness;
    std::vector<std::size_t> violations;
    bool dominates = true;
    double worst_domination = std::numeric_limits<double>::infinity();
};

/// Checks candidate >= r H candidate + g (within slack) at every state and
/// whether candidate dominates the given minimal solution.
inline SupersolutionReport verify_supersolution(const ConeEquation& eq, const ValueFunction& candidate, double slack,
                                                const MinSolResult& fstar) {
    SupersolutionReport rep;
    for (std::size_t i = 0; i < eq.size(); ++i) {
        const double rhs = detail::apply_row(eq, i, candidate.values, false) + eq.forcing[i];
        const double m = candidate[i] - rhs;
        if (m < rep.worst_margin) {
            rep.worst_margin = m;
            rep.witness = i;
        }
        if (m < -margin_slack(slack, rhs)) {
            rep.supersolution = false;
            rep.violations.push_back(i);
        }
        const double d = candidate[i] - fstar.solution[i];
        rep.worst_domination = std::min(rep.worst_domination, d);
        if (d < -margin_slack(slack, fstar.solution[i])) rep.dominates = false;
    }
    return rep;
}

inline SupersolutionReport verify_supersolution(const ConeEquation& eq, const ValueFunction& candidate, double slack,
                                                const SolverSettings& s = {}) {
    return verify_supersolution(eq, candidate, slack, solve_minimal(eq, s));
}

struct SubsolutionReport {
    bool subsolution = true;     ///< candidate <= rH candidate + g
    bool bounded_by_p = true;    ///< candidate <= p f*
    bool vacuous = false;        ///< f* exceeded the cap somewhere, so the bound holds trivially there
    bool conclusion = true;      ///< candidate <= f*
    double worst_sub_margin = std::numeric_limits<double>::infinity();
    double worst_conclusion = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> violations;
};

inline SubsolutionReport verify_subsolution_domination(const ConeEquation& eq, const ValueFunction& candidate, double p,
                                                       const MinSolResult& fstar, double slack = 1e-9) {
    if (!(p >= 0.0)) throw DomainError("p must be nonnegative");
    SubsolutionReport rep;
    for (std::size_t i = 0; i < eq.size(); ++i) {
        const double rhs = detail::apply_row(eq, i, candidate.values, false) + eq.forcing[i];
        const double m = rhs - candidate[i];
        rep.worst_sub_margin = std::min(rep.worst_sub_margin, m);
        if (m < -margin_slack(slack, rhs)) {
            rep.subsolution = false;
            rep.violations.push_back(i);
        }
        const double fs = fstar.solution[i];
        if (std::isinf(fs)) {
            rep.vacuous = true;
        } else {
            if (candidate[i] > p * fs + margin_slack(slack, fs)) rep.bounded_by_p = false;
            const double c = fs - candidate[i];
            rep.worst_conclusion = std::min(rep.worst_conclusion, c);
            if (c < -margin_slack(slack, fs)) rep.conclusion = false;
        }
    }
    return rep;
}

}  // namespace ergocert
