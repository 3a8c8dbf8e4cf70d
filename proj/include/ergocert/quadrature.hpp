#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace ergocert {

struct QuadratureSettings {
    double tol = 1e-8;                ///< relative to max(1, |integral|)
    int min_panels = 16;
    int max_refinements = 18;         ///< panel count doublings per piece
    double core_span = 64.0;          ///< [-span, span] integrated directly, tails by doubling
    int max_tail_segments = 400;      ///< dyadic tail segments before declaring divergence
    std::size_t max_terms = std::size_t{1} << 22;  ///< discrete tail summation cap
};

struct QuadResult {
    double value = 0.0;
    bool converged = true;
    bool divergent = false;
};

/// Composite midpoint rule on [a, b], doubling the panel count until two
/// successive estimates agree.
inline QuadResult midpoint(const std::function<double(double)>& f, double a, double b,
                           const QuadratureSettings& qs = {}) {
    QuadResult out;
    if (!(b > a)) return out;
    auto rule = [&](long n) {
        const double h = (b - a) / static_cast<double>(n);
        double s = 0.0;
        for (long i = 0; i < n; ++i) s += f(a + (static_cast<double>(i) + 0.5) * h);
        return s * h;
    };
    long n = qs.min_panels;
    double prev = rule(n);
    for (int k = 0; k < qs.max_refinements; ++k) {
        n *= 2;
        const double cur = rule(n);
        if (!std::isfinite(cur)) {
            out.value = cur;
            out.divergent = true;
            return out;
        }
        if (std::abs(cur - prev) <= qs.tol * std::max(1.0, std::abs(cur))) {
            out.value = cur;
            return out;
        }
        prev = cur;
    }
    out.value = prev;
    out.converged = false;
    return out;
}

/// Integral of f over [lo, hi] (either end may be infinite). The indicator
/// pieces between `breakpoints` are integrated separately; unbounded ends are
/// covered by dyadic segments until a segment's contribution is negligible.
/// If that never happens within the segment budget the result is flagged
/// divergent and `value` holds the partial integral.
inline QuadResult integrate_range(const std::function<double(double)>& f, double lo, double hi,
                                  std::vector<double> breakpoints = {}, const QuadratureSettings& qs = {}) {
    QuadResult out;
    if (!(hi > lo)) return out;

    const double span = qs.core_span;
    const double core_lo = std::max(lo, -span);
    const double core_hi = std::min(hi, span);
    std::sort(breakpoints.begin(), breakpoints.end());

    auto absorb = [&out](const QuadResult& piece) {
        out.value += piece.value;
        out.converged = out.converged && piece.converged;
        out.divergent = out.divergent || piece.divergent;
    };
    // midpoint rule on [a, b] split at the breakpoints inside it
    auto pieces = [&](double a, double b) {
        QuadResult acc;
        double left = a;
        for (double bp : breakpoints) {
            if (bp > left && bp < b) {
                const QuadResult q = midpoint(f, left, bp, qs);
                acc.value += q.value;
                acc.converged = acc.converged && q.converged;
                left = bp;
            }
        }
        const QuadResult q = midpoint(f, left, b, qs);
        acc.value += q.value;
        acc.converged = acc.converged && q.converged;
        return acc;
    };

    if (core_hi > core_lo) absorb(pieces(core_lo, core_hi));

    auto tail = [&](double start, double end, double sign) {
        // segments [L, 2L] in |x|, walking outward from `start` toward `end`;
        // no early stop while breakpoints remain ahead
        double a = std::abs(start);
        const double limit = std::abs(end);
        double last_bp = 0.0;
        for (double bp : breakpoints)
            if (sign * bp > 0.0) last_bp = std::max(last_bp, std::abs(bp));
        for (int k = 0; k < qs.max_tail_segments; ++k) {
            if (a >= limit) return;
            const double b = std::min(2.0 * a, limit);
            const QuadResult seg = sign > 0 ? pieces(a, b) : pieces(-b, -a);
            absorb(seg);
            if (std::isinf(out.value)) out.divergent = true;
            if (out.divergent) return;
            if (k >= 1 && b >= last_bp && std::abs(seg.value) <= qs.tol * std::max(1.0, std::abs(out.value))) return;
            a = b;
        }
        if (a < limit) out.divergent = true;
    };
    if (hi > span) tail(std::max(span, lo), hi, +1.0);
    if (lo < -span) tail(std::min(-span, hi), lo, -1.0);
    return out;
}

}  // namespace ergocert
