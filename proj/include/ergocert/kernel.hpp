#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ergocert/error.hpp"
#include "ergocert/quadrature.hpp"
#include "ergocert/region.hpp"

namespace ergocert {

enum class SpaceKind { continuous, countable };

struct Atom {
    double at = 0.0;
    double mass = 0.0;
};

/// Absolutely continuous part of a row. `pdf` already carries the mixture
/// weight, so it integrates to `mass` over (lo, hi).
struct Density {
    std::function<double(double)> pdf;
    double lo = 0.0;
    double hi = 0.0;
    double mass = 1.0;
    std::vector<double> breakpoints;
    std::function<double(double)> cdf;       ///< optional: mass on (lo, y]
    std::function<double(double)> quantile;  ///< optional: inverse of cdf / mass
};

/// Infinitely many integer atoms {first, first+1, ...}, used for rows such as
/// the immigration law out of state 0.
struct DiscreteTail {
    long first = 0;
    std::function<double(long)> pmf;
    std::function<double(long)> mass_from;  ///< sum of pmf(j) over j >= k
    double mass = 1.0;
};

struct TransitionRow {
    std::vector<Atom> atoms;
    std::optional<Density> density;
    std::optional<DiscreteTail> tail;

    double atom_mass() const {
        double s = 0.0;
        for (const auto& a : atoms) s += a.mass;
        return s;
    }

    double total_mass() const {
        double s = atom_mass();
        if (density) s += density->mass;
        if (tail) s += tail->mass;
        return s;
    }
};

class Kernel {
public:
    using RowFn = std::function<TransitionRow(double)>;

    Kernel() = default;
    Kernel(SpaceKind space, RowFn fn, std::string name, double lower = 0.0)
        : space_(space), fn_(std::move(fn)), name_(std::move(name)), lower_(lower) {}

    SpaceKind space() const noexcept { return space_; }
    const std::string& name() const noexcept { return name_; }
    double lower() const noexcept { return lower_; }

    bool in_space(double x) const noexcept {
        if (!std::isfinite(x) || x < lower_) return false;
        if (space_ == SpaceKind::countable) return x == std::floor(x);
        return true;
    }

    TransitionRow row(double x) const {
        if (!in_space(x)) {
            throw DomainError("state " + std::to_string(x) + " is outside the state space of kernel " + name_);
        }
        return fn_(x);
    }

private:
    SpaceKind space_ = SpaceKind::countable;
    RowFn fn_;
    std::string name_;
    double lower_ = 0.0;
};

inline TransitionRow row(const Kernel& k, double x) { return k.row(x); }

/// Result of a restricted one-step integral. When `divergent` is set the
/// value is the resolved partial integral, a lower bound for f >= 0.
struct Integral {
    double value = 0.0;
    bool divergent = false;
    double unresolved_mass = 0.0;
};

struct IntegrateOptions {
    QuadratureSettings quad{};
    std::vector<double> f_breakpoints;  ///< jumps or kinks of the integrand
};

inline Integral integrate(const TransitionRow& r, const std::function<double(double)>& f, const Region& region,
                          const IntegrateOptions& opt = {}) {
    Integral out;
    for (const auto& a : r.atoms) {
        if (a.mass == 0.0 || !region.contains(a.at)) continue;
        out.value += a.mass * f(a.at);
    }
    if (r.tail) {
        const auto& t = *r.tail;
        double sum = 0.0;
        long j = t.first;
        std::size_t used = 0;
        long block = 16;
        for (;;) {
            double part = 0.0;
            for (long k = 0; k < block && used < opt.quad.max_terms; ++k, ++j, ++used) {
                const double p = t.pmf(j);
                if (p != 0.0 && region.contains(static_cast<double>(j))) part += p * f(static_cast<double>(j));
            }
            sum += part;
            const double rest = t.mass_from(j);
            if (rest <= 1e-17 && std::abs(part) <= opt.quad.tol * std::max(1.0, std::abs(sum))) break;
            if (used >= opt.quad.max_terms) {
                out.unresolved_mass += rest;
                if (rest > 0.0) out.divergent = true;
                break;
            }
            block *= 2;
        }
        out.value += sum;
    }
    if (r.density) {
        const auto& d = *r.density;
        std::vector<double> bps = d.breakpoints;
        for (double b : region.breakpoints()) bps.push_back(b);
        for (double b : opt.f_breakpoints) bps.push_back(b);
        auto integrand = [&](double y) {
            if (!region.contains(y)) return 0.0;
            const double p = d.pdf(y);
            return p == 0.0 ? 0.0 : p * f(y);
        };
        const QuadResult q = integrate_range(integrand, d.lo, d.hi, std::move(bps), opt.quad);
        out.value += q.value;
        out.divergent = out.divergent || q.divergent;
    }
    if (std::isinf(out.value)) out.divergent = true;
    return out;
}

/// Sum over atoms in `region` of mass times f, plus the quadrature of the
/// density part of P(x, .) times f over `region`.
inline Integral integrate(const Kernel& k, double x, const std::function<double(double)>& f, const Region& region,
                          const IntegrateOptions& opt = {}) {
    return integrate(k.row(x), f, region, opt);
}

struct RowCheck {
    double x = 0.0;
    double mass = 0.0;
    double deviation = 0.0;
    double most_negative = 0.0;
};

struct ValidationReport {
    std::vector<RowCheck> rows;
    double max_deviation = 0.0;
    bool negative_mass = false;
    std::vector<double> negative_at;

    bool ok(double tol = 1e-12) const { return !negative_mass && max_deviation <= tol; }
};

/// Row mass deviation and negative-mass scan at the given probes. Density
/// mass is measured by quadrature, not taken from the declared weight.
inline ValidationReport validate(const Kernel& k, const std::vector<double>& probes, const QuadratureSettings& qs = {}) {
    ValidationReport rep;
    for (double x : probes) {
        const TransitionRow r = k.row(x);
        RowCheck rc;
        rc.x = x;
        double mass = 0.0;
        for (const auto& a : r.atoms) {
            mass += a.mass;
            rc.most_negative = std::min(rc.most_negative, a.mass);
        }
        if (r.tail) {
            mass += r.tail->mass_from(r.tail->first);
        }
        if (r.density) {
            const auto& d = *r.density;
            const QuadResult q =
                d.cdf ? QuadResult{d.cdf(d.hi) - (std::isfinite(d.lo) ? d.cdf(d.lo) : 0.0), true, false}
                      : integrate_range(d.pdf, d.lo, d.hi, d.breakpoints, qs);
            mass += q.value;
        }
        rc.mass = mass;
        rc.deviation = std::abs(mass - 1.0);
        rep.max_deviation = std::max(rep.max_deviation, rc.deviation);
        if (rc.most_negative < 0.0) {
            rep.negative_mass = true;
            rep.negative_at.push_back(x);
        }
        rep.rows.push_back(rc);
    }
    return rep;
}

}  // namespace ergocert
