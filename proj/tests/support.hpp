#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's solvers: dense systems go through Eigen's LU.

#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ergocert/grid.hpp"
#include "ergocert/region.hpp"

namespace oracle {

using ergocert::Entry;
using ergocert::FiniteKernel;

inline FiniteKernel three_state() {
    return ergocert::finite_kernel({{{1, 1.0}}, {{0, 0.5}, {2, 0.5}}, {{0, 1.0}}});
}

inline FiniteKernel two_state(double q) {
    return ergocert::finite_kernel({{{1, 1.0}}, {{0, q}, {1, 1.0 - q}}});
}

/// Dense solve of f = r H f + g where H drops the columns inside `restricted`.
inline std::vector<double> dense_solve(const FiniteKernel& k, const std::vector<char>& restricted, double r,
                                       const std::vector<double>& g) {
    const auto n = static_cast<Eigen::Index>(k.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        b(i) = g[static_cast<std::size_t>(i)];
        for (const auto& e : k.rows[static_cast<std::size_t>(i)])
            if (!restricted[e.to]) A(i, static_cast<Eigen::Index>(e.to)) -= r * e.p;
    }
    Eigen::VectorXd x = A.partialPivLu().solve(b);
    return {x.data(), x.data() + n};
}

inline std::vector<char> mask_of(const FiniteKernel& k, const ergocert::Region& A) {
    std::vector<char> m(k.size(), 0);
    for (std::size_t i = 0; i < k.size(); ++i) m[i] = A.contains(k.points[i]) ? 1 : 0;
    return m;
}

/// E tau for an irreducible finite chain: first-step equations with L = 1.
inline std::vector<double> dense_return_time(const FiniteKernel& k, const ergocert::Region& A) {
    return dense_solve(k, mask_of(k, A), 1.0, std::vector<double>(k.size(), 1.0));
}

/// Random sparse substochastic system on n states whose rows outside the
/// restriction carry at most `budget` mass, so r H has norm <= budget * r.
struct RandomSystem {
    FiniteKernel kernel;
    std::vector<char> restricted;
    double rate = 1.0;
    std::vector<double> forcing;
};

inline RandomSystem random_system(std::mt19937_64& g, std::size_t n, double budget) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    RandomSystem s;
    s.restricted.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) s.restricted[i] = u(g) < 0.2 ? 1 : 0;
    s.rate = 1.0 + 0.5 * u(g);
    std::vector<std::vector<Entry>> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t deg = 1 + pick(g) % 6;
        std::vector<double> w(deg);
        double tot = 0.0;
        for (auto& x : w) tot += (x = u(g) + 1e-3);
        const double mass = budget / s.rate * (0.5 + 0.5 * u(g));
        for (std::size_t d = 0; d < deg; ++d) rows[i].push_back({pick(g), mass * w[d] / tot});
    }
    s.kernel = ergocert::finite_kernel(std::move(rows), "random");
    for (std::size_t i = 0; i < n; ++i) s.forcing.push_back(u(g) < 0.1 ? 0.0 : u(g) * 3.0);
    return s;
}

}  // namespace oracle
