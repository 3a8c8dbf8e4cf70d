#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ergocert/error.hpp"
#include "ergocert/kernel.hpp"
#include "ergocert/region.hpp"

namespace ergocert {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent stream for path `path` under master `seed`.
inline std::mt19937_64 path_stream(std::uint64_t seed, std::uint64_t path) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(path + 0x632be59bd9b4e019ULL)));
}

/// Uniform on [0, 1) from the top 53 bits; fixed across standard libraries.
inline double unit_uniform(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

/// Draws one state from a row: atoms in order, then the discrete tail by
/// search on its survival masses, then the density by its quantile.
inline double sample_row(const TransitionRow& r, double u) {
    double acc = 0.0;
    for (const auto& a : r.atoms) {
        acc += a.mass;
        if (u < acc) return a.at;
    }
    if (r.tail) {
        const auto& t = *r.tail;
        const double total = t.mass_from(t.first);
        const double want = u - acc;
        if (want < total || !r.density) {
            // smallest j with mass on [first, j] > want
            auto covered = [&](long j) { return total - t.mass_from(j + 1); };
            long lo = t.first;
            long step = 1;
            long hi = t.first;
            while (covered(hi) <= want) {
                lo = hi + 1;
                hi = t.first + step;
                if (step > (1L << 60)) throw DomainError("discrete tail could not be inverted");
                step *= 2;
            }
            while (lo < hi) {
                const long mid = lo + (hi - lo) / 2;
                if (covered(mid) > want) hi = mid;
                else lo = mid + 1;
            }
            return static_cast<double>(lo);
        }
        acc += total;
    }
    if (r.density) {
        if (!r.density->quantile) throw DomainError("density row has no quantile; cannot sample");
        const double v = (u - acc) / r.density->mass;
        return r.density->quantile(std::clamp(v, 0.0, std::nextafter(1.0, 0.0)));
    }
    if (!r.atoms.empty()) return r.atoms.back().at;  // rounding at u close to 1
    throw DomainError("empty transition row");
}

struct PathSample {
    std::uint64_t seed = 0;
    std::uint64_t path = 0;
    double start = 0.0;
    long horizon = 0;
    long tau = 0;  ///< first n >= 1 with X_n in A; equals horizon when censored
    bool censored = false;
};

inline PathSample simulate(const Kernel& k, double x0, const Region& A, long horizon, std::uint64_t seed,
                           std::uint64_t path = 0) {
    if (horizon <= 0) throw ConfigError("mc.horizon", "must be positive");
    auto g = path_stream(seed, path);
    PathSample ps{seed, path, x0, horizon, horizon, true};
    double x = x0;
    for (long n = 1; n <= horizon; ++n) {
        x = sample_row(k.row(x), unit_uniform(g));
        if (A.contains(x)) {
            ps.tau = n;
            ps.censored = false;
            return ps;
        }
    }
    return ps;
}

struct SurvivalPoint {
    long n = 0;
    double survival = 0.0;
    double se = 0.0;
};

struct TailFit {
    std::string model;  ///< "power" (log S vs log n) or "exponential" (log S vs n)
    double slope = std::nan("");
    double slope_se = std::nan("");
    double r2 = std::nan("");
    int points = 0;
};

struct ReturnTimeStats {
    std::uint64_t seed = 0;
    double start = 0.0;
    long horizon = 0;
    long n_paths = 0;
    long n_censored = 0;
    double mean = std::nan("");  ///< over uncensored paths
    double se = std::nan("");
    bool lower_biased = false;   ///< censoring present
    std::vector<SurvivalPoint> survival;
    TailFit power;
    TailFit exponential;

    double censored_fraction() const { return n_paths > 0 ? static_cast<double>(n_censored) / n_paths : 0.0; }
    std::string tail_shape() const {
        if (std::isnan(power.r2) || std::isnan(exponential.r2)) return "undetermined";
        return power.r2 > exponential.r2 ? "power" : "exponential";
    }
};

namespace detail {

inline TailFit least_squares(const std::vector<double>& x, const std::vector<double>& y, const std::string& model) {
    TailFit f;
    f.model = model;
    f.points = static_cast<int>(x.size());
    if (x.size() < 2) return f;
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0) return f;
    f.slope = sxy / sxx;
    const double sse = std::max(0.0, syy - f.slope * sxy);
    f.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    if (x.size() > 2) f.slope_se = std::sqrt(sse / (n - 2.0) / sxx);
    return f;
}

}  // namespace detail

/// Summary of n_paths independent first-return samples from x0: mean and
/// standard error over uncensored paths, survival at dyadic n, and tail fits
/// on the last decade of dyadic survival points.
inline ReturnTimeStats estimate_return_time(const Kernel& k, const Region& A, double x0, long n_paths, long horizon,
                                            std::uint64_t seed) {
    if (n_paths <= 0) throw ConfigError("mc.paths", "must be positive");
    ReturnTimeStats st;
    st.seed = seed;
    st.start = x0;
    st.horizon = horizon;
    st.n_paths = n_paths;
    std::vector<long> taus;
    taus.reserve(static_cast<std::size_t>(n_paths));
    double sum = 0.0, sumsq = 0.0;
    long done = 0;
    for (long p = 0; p < n_paths; ++p) {
        const PathSample ps = simulate(k, x0, A, horizon, seed, static_cast<std::uint64_t>(p));
        taus.push_back(ps.censored ? horizon + 1 : ps.tau);
        if (ps.censored) {
            ++st.n_censored;
            continue;
        }
        ++done;
        sum += static_cast<double>(ps.tau);
        sumsq += static_cast<double>(ps.tau) * static_cast<double>(ps.tau);
    }
    if (done > 0) {
        st.mean = sum / done;
        const double var = done > 1 ? std::max(0.0, (sumsq - done * st.mean * st.mean) / (done - 1)) : 0.0;
        st.se = std::sqrt(var / done);
    }
    st.lower_biased = st.n_censored > 0;

    std::sort(taus.begin(), taus.end());
    const double N = static_cast<double>(n_paths);
    for (long n = 1; n <= horizon; n *= 2) {
        const auto above = taus.end() - std::upper_bound(taus.begin(), taus.end(), n);
        const double s = static_cast<double>(above) / N;
        st.survival.push_back({n, s, std::sqrt(s * (1.0 - s) / N)});
        if (n > horizon / 2) break;
    }

    // last decade of dyadic points with at least 10 surviving paths
    long nmax = 0;
    for (const auto& sp : st.survival)
        if (sp.survival * N >= 10.0) nmax = sp.n;
    std::vector<double> ln, lin, ls;
    for (const auto& sp : st.survival) {
        if (sp.n * 10 < nmax || sp.n > nmax || sp.survival <= 0.0) continue;
        ln.push_back(std::log(static_cast<double>(sp.n)));
        lin.push_back(static_cast<double>(sp.n));
        ls.push_back(std::log(sp.survival));
    }
    st.power = detail::least_squares(ln, ls, "power");
    st.exponential = detail::least_squares(lin, ls, "exponential");
    return st;
}

inline ReturnTimeStats estimate_tail(const Kernel& k, const Region& A, double x0, long n_paths, long horizon,
                                     std::uint64_t seed) {
    return estimate_return_time(k, A, x0, n_paths, horizon, seed);
}

}  // namespace ergocert
