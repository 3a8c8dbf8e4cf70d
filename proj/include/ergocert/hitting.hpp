#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "ergocert/error.hpp"
#include "ergocert/grid.hpp"
#include "ergocert/minsol.hpp"
#include "ergocert/region.hpp"

namespace ergocert {

/// P(x, A) for every grid state, in-grid mass only.
inline std::vector<double> mass_into(const FiniteKernel& k, const std::vector<char>& in_target) {
    std::vector<double> out(k.size(), 0.0);
    for (std::size_t i = 0; i < k.size(); ++i)
        for (const auto& e : k.rows[i])
            if (in_target[e.to]) out[i] += e.p;
    return out;
}

inline void require_target(const FiniteKernel& k, const std::vector<char>& mask) {
    for (char c : mask)
        if (c) return;
    throw ConfigError("target", "target set contains no grid state of " + k.provenance);
}

/// L(x, A) = P_x(first return to A is finite): u = int_{A^c} u dP + P(x, A).
/// Escape mass counts as never returning, so on a truncated grid this is a
/// lower bound for the untruncated chain.
inline MinSolResult return_probability(const FiniteKernel& k, const Region& A, const SolverSettings& s = {}) {
    const auto mask = resolve(k, A);
    require_target(k, mask);
    ConeEquation eq{&k, mask, 1.0, mass_into(k, mask)};
    return solve_minimal(eq, s);
}

/// E_x tau_A^+ 1{tau_A^+ < inf}: V = int_{A^c} V dP + L(x, A), with L
/// solved first.
inline MinSolResult expected_return_time(const FiniteKernel& k, const Region& A, const SolverSettings& s = {}) {
    const MinSolResult L = return_probability(k, A, s);
    ConeEquation eq{&k, resolve(k, A), 1.0, L.solution.values};
    MinSolResult out = solve_minimal(eq, s);
    if (out.status == SolveStatus::converged && L.status != SolveStatus::converged) out.status = L.status;
    return out;
}

/// E_x sum_{n < tau_A^+} r^n: V = r int_{A^c} V dP + 1.
inline MinSolResult geometric_sum(const FiniteKernel& k, const Region& A, double r, const SolverSettings& s = {}) {
    if (!(r > 1.0)) throw DomainError("geometric_sum needs r > 1");
    const auto mask = resolve(k, A);
    require_target(k, mask);
    ConeEquation eq{&k, mask, r, std::vector<double>(k.size(), 1.0)};
    return solve_minimal(eq, s);
}

/// E_x r^{tau_A^+} 1{tau_A^+ < inf}: V = r int_{A^c} V dP + r P(x, A).
/// Solved independently of geometric_sum so the two can be compared.
inline MinSolResult exponential_moment(const FiniteKernel& k, const Region& A, double r, const SolverSettings& s = {}) {
    if (!(r > 1.0)) throw DomainError("exponential_moment needs r > 1");
    const auto mask = resolve(k, A);
    require_target(k, mask);
    auto g = mass_into(k, mask);
    for (double& v : g) v *= r;
    ConeEquation eq{&k, mask, r, std::move(g)};
    return solve_minimal(eq, s);
}

/// min over grid states of L(x, A); 1 up to tolerance on recurrent grids.
inline double recurrence_diagnostic(const MinSolResult& L) {
    double m = 1.0;
    for (double v : L.solution.values) m = std::min(m, v);
    return m;
}

}  // namespace ergocert
