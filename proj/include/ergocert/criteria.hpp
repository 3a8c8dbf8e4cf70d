#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ergocert/error.hpp"
#include "ergocert/kernel.hpp"
#include "ergocert/region.hpp"
#include "ergocert/testfn.hpp"

namespace ergocert {

struct CheckSettings {
    double slack_abs = 1e-9;
    double slack_rel = 1e-9;
    double div_threshold = 1e6;
    double ratio_tol = 1e-6;  ///< final V/W ratio accepted as vanishing
    double rate_tol = 1e-3;   ///< final r_n - 1 accepted as converged to 1
    IntegrateOptions integrate{};
};

enum class Verdict { valid, invalid, inconclusive };

inline std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::valid: return "certificate-valid";
    case Verdict::invalid: return "certificate-invalid";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "unknown";
}

inline std::ostream& operator<<(std::ostream& os, Verdict v) { return os << to_string(v); }

struct RungMargin {
    double rung = 0.0;
    double worst = std::numeric_limits<double>::infinity();
    double at = std::numeric_limits<double>::quiet_NaN();
};

struct ConditionResult {
    std::string name;
    bool held = true;
    double worst_margin = std::numeric_limits<double>::infinity();
    std::optional<double> witness;
    std::optional<double> witness_rung;
    long checked = 0;
    std::vector<RungMargin> per_rung;
    std::string note;
};

inline ConditionResult named(std::string name) {
    ConditionResult c;
    c.name = std::move(name);
    return c;
}

struct DivergenceEvidence {
    std::vector<double> index;
    std::vector<double> sequence;
    double threshold = 0.0;
    bool threshold_required = true;
    std::optional<std::size_t> crossing;  ///< first position at or above the threshold
    bool growing = false;                 ///< positive growth over the last quarter
    std::optional<double> witness;
    std::string note;

    bool demonstrated() const { return growing && (!threshold_required || crossing.has_value()); }
};

struct CertificateReport {
    std::string criterion;
    std::vector<ConditionResult> conditions;
    std::optional<DivergenceEvidence> divergence;
    Verdict verdict = Verdict::inconclusive;
    std::string domain;
    std::size_t probes = 0;
    CheckSettings settings;
    std::string note;

    bool valid() const noexcept { return verdict == Verdict::valid; }

    const ConditionResult* condition(const std::string& name) const {
        for (const auto& c : conditions)
            if (c.name == name) return &c;
        return nullptr;
    }

    double worst_margin() const {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& c : conditions) m = std::min(m, c.worst_margin);
        return m;
    }
};

namespace detail {

inline double allowance(const CheckSettings& s, double scale) {
    return s.slack_abs + s.slack_rel * (std::isfinite(scale) ? std::abs(scale) : 0.0);
}

/// Records margins of one condition; a margin below -allowance fails it.
class Tracker {
public:
    Tracker(ConditionResult& c, const CheckSettings& s) : c_(c), s_(s) {}

    void begin_rung(double n) { c_.per_rung.push_back({n, std::numeric_limits<double>::infinity(), std::nan("")}); }

    void observe(double margin, double scale, double x, double rung = std::nan("")) {
        ++c_.checked;
        if (std::isnan(margin)) margin = -std::numeric_limits<double>::infinity();
        if (!c_.per_rung.empty() && margin < c_.per_rung.back().worst) {
            c_.per_rung.back().worst = margin;
            c_.per_rung.back().at = x;
        }
        if (margin < c_.worst_margin) {
            c_.worst_margin = margin;
            c_.witness = x;
            if (!std::isnan(rung)) c_.witness_rung = rung;
        }
        if (margin < -allowance(s_, scale)) c_.held = false;
    }

    void fail(double x, const std::string& why) {
        c_.held = false;
        c_.witness = x;
        c_.worst_margin = -std::numeric_limits<double>::infinity();
        if (c_.note.empty()) c_.note = why;
    }

private:
    ConditionResult& c_;
    const CheckSettings& s_;
};

inline IntegrateOptions options_for(const CheckSettings& s, const TestFunction& f) {
    IntegrateOptions o = s.integrate;
    o.f_breakpoints.insert(o.f_breakpoints.end(), f.breakpoints.begin(), f.breakpoints.end());
    return o;
}

inline std::vector<double> probes_for(const ProbeDomain& d, const TestFunction& f) {
    std::vector<double> pts = d.points;
    pts.insert(pts.end(), f.focus.begin(), f.focus.end());
    return pts;
}

inline DivergenceEvidence divergence_of(std::vector<double> index, std::vector<double> seq, double threshold) {
    DivergenceEvidence ev;
    ev.threshold = threshold;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (seq[i] >= threshold) {
            ev.crossing = i;
            break;
        }
    }
    if (seq.size() >= 2) {
        const std::size_t q = std::max<std::size_t>(1, seq.size() / 4);
        const std::size_t start = seq.size() - 1 - q;
        ev.growing = seq.back() > seq[start];
    }
    ev.index = std::move(index);
    ev.sequence = std::move(seq);
    return ev;
}

inline void finish(CertificateReport& r) {
    for (const auto& c : r.conditions) {
        if (!c.held) {
            r.verdict = Verdict::invalid;
            return;
        }
    }
    if (r.divergence && !r.divergence->demonstrated()) {
        r.verdict = Verdict::inconclusive;
        return;
    }
    r.verdict = Verdict::valid;
}

inline CertificateReport start(const std::string& name, const ProbeDomain& d, const CheckSettings& s) {
    CertificateReport r;
    r.criterion = name;
    r.domain = d.label;
    r.probes = d.size();
    r.settings = s;
    return r;
}

inline bool is_finite(double v) { return std::isfinite(v); }

}  // namespace detail

/// PV <= V off C, inf V > -inf, and {V < inf_C V} of positive reference
/// measure. Lower boundedness is judged from the running minimum along the
/// domain: it must settle (relative change <= 1e-2 over the last quarter of
/// the range) above -div_threshold.
inline CertificateReport check_transient(const Kernel& k, const TestFunction& V, const Region& C,
                                         const ProbeDomain& dom, const CheckSettings& s = {}) {
    auto rep = detail::start("transient", dom, s);
    ConditionResult drift = named("drift PV <= V off C"), lower = named("inf V > -inf"), sublevel = named("{V < inf_C V} has positive measure");
    detail::Tracker td(drift, s);
    const auto opt = detail::options_for(s, V);
    for (double x : detail::probes_for(dom, V)) {
        if (C.contains(x)) continue;
        const double v = V(x);
        const Integral I = integrate(k, x, V.fn, Region::everything(), opt);
        if (I.divergent || !std::isfinite(v)) {
            td.fail(x, "PV(x) or V(x) not finite");
            continue;
        }
        td.observe(v - I.value, std::max(std::abs(v), std::abs(I.value)), x);
    }

    std::vector<std::pair<double, double>> vals;
    for (std::size_t i = 0; i < dom.size(); ++i) vals.emplace_back(dom.points[i], V(dom.points[i]));
    std::sort(vals.begin(), vals.end());
    double running = std::numeric_limits<double>::infinity();
    double at_three_quarters = running;
    const double xmax = vals.empty() ? 0.0 : vals.back().first;
    for (const auto& [x, v] : vals) {
        running = std::min(running, v);
        if (x <= 0.75 * xmax) at_three_quarters = running;
    }
    lower.worst_margin = running;
    lower.checked = static_cast<long>(vals.size());
    if (!std::isfinite(running) || running <= -s.div_threshold) {
        lower.held = false;
        lower.note = "running minimum not finite or below -div_threshold";
    } else if (std::abs(running - at_three_quarters) > 1e-2 * std::max(1.0, std::abs(running))) {
        lower.held = false;
        lower.note = "running minimum still falling over the last quarter of the domain";
    }

    double inf_c = std::numeric_limits<double>::infinity();
    bool any_c = false;
    for (double x : dom.points) {
        if (C.contains(x)) {
            any_c = true;
            inf_c = std::min(inf_c, V(x));
        }
    }
    double measure = 0.0;
    for (std::size_t i = 0; i < dom.size(); ++i) {
        const double v = V(dom.points[i]);
        if (v < inf_c - detail::allowance(s, inf_c)) measure += dom.weights[i];
    }
    sublevel.checked = static_cast<long>(dom.size());
    sublevel.worst_margin = measure - dom.floor;
    if (!any_c || measure < dom.floor || measure <= 0.0) {
        sublevel.held = false;
        sublevel.note = any_c ? "sublevel set below inf over C is null on the domain" : "C contains no probe";
    }
    rep.conditions = {drift, lower, sublevel};
    detail::finish(rep);
    return rep;
}

/// PV - V <= 0 off C with V >= 0 unbounded off petite sets. Unboundedness
/// is judged from the running max M(q) of V: sublevel sets at the levels
/// M(j xmax / 8), j <= 4, must stay clear of the last probe, and M must grow
/// over the last doubling of the range by at least 3/4 of the previous one.
inline CertificateReport check_recurrent_drift(const Kernel& k, const TestFunction& V, const Region& C,
                                               const ProbeDomain& dom, const CheckSettings& s = {}) {
    auto rep = detail::start("recurrent", dom, s);
    ConditionResult drift = named("drift PV <= V off C"), positive = named("V >= 0"), unbounded = named("sublevel sets bounded");
    detail::Tracker td(drift, s), tp(positive, s);
    const auto opt = detail::options_for(s, V);
    for (double x : detail::probes_for(dom, V)) {
        const double v = V(x);
        tp.observe(v, v, x);
        if (C.contains(x)) continue;
        const Integral I = integrate(k, x, V.fn, Region::everything(), opt);
        if (I.divergent || !std::isfinite(v)) {
            td.fail(x, "PV(x) or V(x) not finite");
            continue;
        }
        td.observe(v - I.value, std::max(std::abs(v), std::abs(I.value)), x);
    }

    std::vector<std::pair<double, double>> vals;
    for (double x : dom.points) vals.emplace_back(x, V(x));
    std::sort(vals.begin(), vals.end());
    unbounded.checked = static_cast<long>(vals.size());
    if (vals.size() < 8) {
        unbounded.held = false;
        unbounded.note = "domain too small";
    } else {
        const double xmax = vals.back().first;
        // running max M(q) of V over [.., q]
        std::vector<double> run(vals.size());
        double acc = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < vals.size(); ++i) run[i] = acc = std::max(acc, vals[i].second);
        auto running_at = [&](double q) {
            auto it = std::upper_bound(vals.begin(), vals.end(), std::make_pair(q, std::numeric_limits<double>::infinity()));
            return it == vals.begin() ? 0.0 : run[static_cast<std::size_t>(it - vals.begin()) - 1];
        };
        for (int j = 1; j <= 4 && unbounded.held; ++j) {
            const double q = xmax * j / 8.0;
            const double level = running_at(q);
            double reach = -std::numeric_limits<double>::infinity();
            for (const auto& [x, v] : vals)
                if (v <= level) reach = std::max(reach, x);
            if (reach >= xmax) {
                unbounded.held = false;
                unbounded.witness = q;
                unbounded.note = "sublevel set reaches the end of the domain";
            }
        }
        const double top = running_at(xmax);
        const double half = running_at(xmax / 2.0);
        const double quarter = running_at(xmax / 4.0);
        unbounded.worst_margin = (top - half) - 0.75 * (half - quarter);
        if (unbounded.held && !(top - half > 0.0 && top - half >= 0.75 * (half - quarter))) {
            unbounded.held = false;
            unbounded.note = "growth of V is fading along the domain";
        }
    }
    rep.conditions = {drift, positive, unbounded};
    detail::finish(rep);
    return rep;
}

enum class NonErgodicMode { theorem, corollary };

/// Non-ergodicity through a family V^(n): finite sup off A, the restricted
/// inequality int_{A^c} V dP >= V - 1 at every probe, and divergence of
/// int_A sup_n V^(n) d(psi) (theorem) or of sup_n V^(n) on a set of positive
/// measure (corollary).
inline CertificateReport check_non_ergodic(const Kernel& k, const TestFunctionSequence& seq, const Region& A,
                                           NonErgodicMode mode, const ProbeDomain& dom, const CheckSettings& s = {}) {
    if (seq.size() < 2) throw DomainError("non-ergodic check needs at least two rungs");
    auto rep = detail::start(mode == NonErgodicMode::theorem ? "non-ergodic" : "non-ergodic (corollary)", dom, s);
    ConditionResult finite = named("sup of V^(n) off A finite"), ineq = named("int_{A^c} V^(n) dP >= V^(n) - 1");
    detail::Tracker tf(finite, s), ti(ineq, s);
    const Region Ac = A.complement();

    std::vector<double> running(dom.size(), -std::numeric_limits<double>::infinity());
    std::vector<double> partial;
    std::vector<std::vector<double>> history;
    for (std::size_t n = 0; n < seq.size(); ++n) {
        const auto& V = seq.functions[n];
        const double rung = seq.rungs.empty() ? static_cast<double>(n + 1) : seq.rungs[n];
        ti.begin_rung(rung);
        const auto opt = detail::options_for(s, V);
        double sup_off = 0.0;
        for (double x : detail::probes_for(dom, V)) {
            const double v = V(x);
            if (!A.contains(x)) {
                if (!std::isfinite(v)) tf.fail(x, "V^(n) not finite off A");
                else sup_off = std::max(sup_off, v);
            }
            const Integral I = integrate(k, x, V.fn, Ac, opt);
            if (std::isnan(I.value) || std::isnan(v)) {
                ti.fail(x, "undefined value");
                continue;
            }
            if (I.divergent && I.value >= v - 1.0) {
                ti.observe(std::numeric_limits<double>::infinity(), 0.0, x, rung);
                continue;
            }
            ti.observe(I.value - (v - 1.0), std::max(std::abs(I.value), std::abs(v)), x, rung);
        }
        tf.begin_rung(rung);
        finite.per_rung.back().worst = std::isfinite(sup_off) ? 0.0 : -std::numeric_limits<double>::infinity();

        double J = 0.0;
        for (std::size_t i = 0; i < dom.size(); ++i) {
            running[i] = std::max(running[i], V(dom.points[i]));
            if (mode == NonErgodicMode::theorem && A.contains(dom.points[i])) J += dom.weights[i] * running[i];
        }
        if (mode == NonErgodicMode::theorem) {
            if (!partial.empty() && J < partial.back() - detail::allowance(s, partial.back())) {
                throw InternalConsistencyError("partial integrals of sup V^(n) over A decreased");
            }
            partial.push_back(J);
        } else {
            history.push_back(running);
        }
    }
    if (finite.held) finite.worst_margin = 0.0;

    std::vector<double> index = seq.rungs;
    if (index.empty())
        for (std::size_t n = 0; n < seq.size(); ++n) index.push_back(static_cast<double>(n + 1));

    if (mode == NonErgodicMode::theorem) {
        rep.divergence = detail::divergence_of(index, partial, s.div_threshold);
        rep.divergence->note = "partial integrals over A of the running sup";
    } else {
        // Measure of probes whose running sup crossed the threshold while still
        // growing; the reported sequence is the best witness's running sup.
        std::size_t best = 0;
        double measure = 0.0;
        for (std::size_t i = 0; i < dom.size(); ++i) {
            std::vector<double> path;
            for (const auto& h : history) path.push_back(h[i]);
            auto ev = detail::divergence_of(index, path, s.div_threshold);
            if (ev.demonstrated()) measure += dom.weights[i];
            if (history.back()[i] > history.back()[best]) best = i;
        }
        std::vector<double> path;
        for (const auto& h : history) path.push_back(h[best]);
        rep.divergence = detail::divergence_of(index, path, s.div_threshold);
        rep.divergence->witness = dom.points[best];
        rep.divergence->note = "divergent-set measure " + std::to_string(measure);
        if (measure < dom.floor || measure <= 0.0) rep.divergence->growing = false;
    }
    rep.conditions = {finite, ineq};
    detail::finish(rep);
    return rep;
}

/// Non-strong ergodicity through a family V^(n): V^(n) = 0 on A, finite sup
/// off A, PV^(n) >= V^(n) - 1 off A, and divergence of sup over (n, x off A).
inline CertificateReport check_non_strong(const Kernel& k, const TestFunctionSequence& seq, const Region& A,
                                          const ProbeDomain& dom, const CheckSettings& s = {}) {
    if (seq.size() < 1) throw DomainError("non-strong check needs at least one rung");
    auto rep = detail::start("non-strong", dom, s);
    ConditionResult zero = named("V^(n) = 0 on A"), finite = named("sup of V^(n) off A finite"), ineq = named("PV^(n) >= V^(n) - 1 off A");
    detail::Tracker tz(zero, s), tf(finite, s), ti(ineq, s);
    std::vector<double> index, running;
    double best = -std::numeric_limits<double>::infinity();
    double witness = std::nan("");
    for (std::size_t n = 0; n < seq.size(); ++n) {
        const auto& V = seq.functions[n];
        const double rung = seq.rungs.empty() ? static_cast<double>(n + 1) : seq.rungs[n];
        ti.begin_rung(rung);
        const auto opt = detail::options_for(s, V);
        for (double x : detail::probes_for(dom, V)) {
            const double v = V(x);
            if (A.contains(x)) {
                tz.observe(-std::abs(v), 0.0, x, rung);
                continue;
            }
            if (!std::isfinite(v)) {
                tf.fail(x, "V^(n) not finite off A");
                continue;
            }
            if (v > best) {
                best = v;
                witness = x;
            }
            const Integral I = integrate(k, x, V.fn, Region::everything(), opt);
            if (I.divergent && I.value >= v - 1.0) {
                ti.observe(std::numeric_limits<double>::infinity(), 0.0, x, rung);
                continue;
            }
            ti.observe(I.value - (v - 1.0), std::max(std::abs(I.value), std::abs(v)), x, rung);
        }
        index.push_back(rung);
        running.push_back(best);
    }
    if (finite.held) finite.worst_margin = 0.0;
    rep.divergence = detail::divergence_of(index, running, s.div_threshold);
    rep.divergence->witness = witness;
    rep.divergence->note = "running sup of V^(n) off A";
    rep.conditions = {zero, finite, ineq};
    detail::finish(rep);
    return rep;
}

/// Two-function form: sup_A V < inf, sup_{A^c} V = inf (persistent growth
/// along the ladder), PV >= V - 1 off A, W >= 0 with PW <= W + d 1_A, and
/// sup over x >= E_m cutoff of V/W decreasing to at most ratio_tol.
inline CertificateReport check_non_strong_two_fn(const Kernel& k, const TestFunction& V, const TestFunction& W,
                                                 const Region& A, const std::vector<double>& ladder, double d,
                                                 const ProbeDomain& dom, const CheckSettings& s = {}) {
    if (ladder.size() < 2) throw DomainError("two-function check needs a ladder with at least two compacts");
    auto rep = detail::start("non-strong (two-function)", dom, s);
    ConditionResult bounded_a = named("sup_A V finite"), ineq = named("PV >= V - 1 off A"), wdrift = named("W >= 0 and PW <= W + d 1_A"),
        ratio = named("sup V/W beyond E_m vanishes");
    detail::Tracker tb(bounded_a, s), ti(ineq, s), tw(wdrift, s), tr(ratio, s);
    const auto optv = detail::options_for(s, V);
    const auto optw = detail::options_for(s, W);
    for (double x : detail::probes_for(dom, V)) {
        const double v = V(x);
        const double w = W(x);
        if (A.contains(x)) {
            if (!std::isfinite(v)) tb.fail(x, "V not finite on A");
            else tb.observe(0.0, 0.0, x);
        } else {
            const Integral I = integrate(k, x, V.fn, Region::everything(), optv);
            if (!std::isfinite(v)) ti.fail(x, "V not finite");
            else if (I.divergent && I.value >= v - 1.0) ti.observe(std::numeric_limits<double>::infinity(), 0.0, x);
            else ti.observe(I.value - (v - 1.0), std::max(std::abs(I.value), std::abs(v)), x);
        }
        if (!(w >= 0.0)) {
            tw.fail(x, "W negative");
            continue;
        }
        const Integral J = integrate(k, x, W.fn, Region::everything(), optw);
        if (J.divergent) {
            tw.fail(x, "PW not finite");
            continue;
        }
        const double rhs = w + (A.contains(x) ? d : 0.0);
        tw.observe(rhs - J.value, std::max(std::abs(rhs), std::abs(J.value)), x);
    }

    std::vector<double> sups, ratios;
    for (double cut : ladder) {
        double sup = 0.0;
        double r = 0.0;
        for (double x : dom.points) {
            const double v = V(x);
            if (x < cut && !A.contains(x)) sup = std::max(sup, v);
            if (x >= cut) {
                const double w = W(x);
                if (w <= 0.0 && v > 0.0) {
                    tr.fail(x, "W vanishes where V is positive");
                    continue;
                }
                if (w > 0.0) r = std::max(r, v / w);
            }
        }
        sups.push_back(sup);
        ratios.push_back(r);
    }
    for (std::size_t m = 1; m < ratios.size(); ++m)
        tr.observe(ratios[m - 1] - ratios[m], ratios[m - 1], ladder[m]);
    tr.observe(s.ratio_tol - ratios.back(), 0.0, ladder.back());

    auto ev = detail::divergence_of(ladder, sups, s.div_threshold);
    ev.threshold_required = false;
    const std::size_t q = std::max<std::size_t>(2, sups.size() / 4);
    const std::size_t start = sups.size() > q ? sups.size() - 1 - q : 0;
    bool persistent = true;
    for (std::size_t m = start + 1; m < sups.size(); ++m)
        if (!(sups[m] > sups[m - 1])) persistent = false;
    if (persistent && start + 1 < sups.size()) {
        const double first = sups[start + 1] - sups[start];
        const double last = sups.back() - sups[sups.size() - 2];
        persistent = last >= 0.5 * first;
    }
    ev.growing = persistent;
    ev.note = "sup of V off A along the ladder; growth must persist without fading";
    rep.divergence = ev;
    rep.conditions = {bounded_a, ineq, wdrift, ratio};
    detail::finish(rep);
    return rep;
}

/// Non-geometric ergodicity: r_n > 1 decreasing to 1, V^(n) supported in its
/// declared compact and finite there, V^(n) <= r_n int_{A^c} V^(n) dP + 1 at
/// every probe, and divergence of the running sup over (n, x).
inline CertificateReport check_non_geometric(const Kernel& k, const TestFunctionSequence& seq, const Region& A,
                                             const ProbeDomain& dom, const CheckSettings& s = {}) {
    if (seq.rates.size() != seq.size() || seq.size() < 2) {
        throw DomainError("non-geometric check needs one rate per rung and at least two rungs");
    }
    auto rep = detail::start("non-geometric", dom, s);
    ConditionResult rates = named("r_n > 1 decreasing to 1"), bounded = named("V^(n) finite"), ineq = named("V^(n) <= r_n int_{A^c} V^(n) dP + 1");
    detail::Tracker tr(rates, s), tb(bounded, s), ti(ineq, s);
    for (std::size_t n = 0; n < seq.size(); ++n) {
        if (!(seq.rates[n] > 1.0)) tr.fail(seq.rates[n], "rate not above 1");
        if (n > 0 && !(seq.rates[n] < seq.rates[n - 1])) tr.fail(seq.rates[n], "rates not strictly decreasing");
    }
    tr.observe(s.rate_tol - (seq.rates.back() - 1.0), 0.0, seq.rates.back());

    const Region Ac = A.complement();
    std::vector<double> index, running;
    double best = -std::numeric_limits<double>::infinity();
    double witness = std::nan("");
    for (std::size_t n = 0; n < seq.size(); ++n) {
        const auto& V = seq.functions[n];
        const double rung = seq.rungs.empty() ? static_cast<double>(n + 1) : seq.rungs[n];
        if (!V.support_hi) throw DomainError("V^(" + std::to_string(n + 1) + ") has no declared compact support");
        ti.begin_rung(rung);
        const auto opt = detail::options_for(s, V);
        for (double x : detail::probes_for(dom, V)) {
            const double v = V(x);
            if (x > *V.support_hi && v != 0.0) {
                throw DomainError("V^(" + std::to_string(n + 1) + ") is nonzero outside its declared support at x = " +
                                  std::to_string(x));
            }
            if (!std::isfinite(v)) {
                tb.fail(x, "V^(n) not finite");
                continue;
            }
            if (v > best) {
                best = v;
                witness = x;
            }
            const Integral I = integrate(k, x, V.fn, Ac, opt);
            const double rhs = seq.rates[n] * I.value + 1.0;
            if (I.divergent && rhs >= v) {
                ti.observe(std::numeric_limits<double>::infinity(), 0.0, x, rung);
                continue;
            }
            ti.observe(rhs - v, std::max(std::abs(rhs), std::abs(v)), x, rung);
        }
        index.push_back(rung);
        running.push_back(best);
    }
    if (bounded.held) bounded.worst_margin = 0.0;
    rep.divergence = detail::divergence_of(index, running, s.div_threshold);
    rep.divergence->witness = witness;
    rep.divergence->note = "running sup of V^(n) over rungs and probes";
    rep.conditions = {rates, bounded, ineq};
    detail::finish(rep);
    return rep;
}

/// PV - V <= -1 + b 1_C at every probe, with every PV(x) finite.
inline CertificateReport check_ergodic_drift(const Kernel& k, const TestFunction& V, const Region& C, double b,
                                             const ProbeDomain& dom, const CheckSettings& s = {}) {
    auto rep = detail::start("ergodic", dom, s);
    ConditionResult finite = named("PV finite and V finite"), drift = named("PV - V <= -1 + b 1_C");
    detail::Tracker tf(finite, s), td(drift, s);
    if (!std::isfinite(b)) tf.fail(0.0, "b is not finite");
    const auto opt = detail::options_for(s, V);
    for (double x : detail::probes_for(dom, V)) {
        const double v = V(x);
        const Integral I = integrate(k, x, V.fn, Region::everything(), opt);
        if (I.divergent || !std::isfinite(v) || !std::isfinite(I.value)) {
            tf.fail(x, "divergent integral: PV(x) is not finite");
            continue;
        }
        tf.observe(0.0, 0.0, x);
        const double rhs = v - 1.0 + (C.contains(x) ? b : 0.0);
        td.observe(rhs - I.value, std::max(std::abs(rhs), std::abs(I.value)), x);
    }
    rep.conditions = {finite, drift};
    detail::finish(rep);
    return rep;
}

/// PV - V <= -beta V + b 1_C with bounded V >= 1. V counts as bounded when it
/// is finite on every probe with sup at most div_threshold.
inline CertificateReport check_strong_drift(const Kernel& k, const TestFunction& V, const Region& C, double b,
                                            double beta, const ProbeDomain& dom, const CheckSettings& s = {}) {
    auto rep = detail::start("strongly-ergodic", dom, s);
    ConditionResult params = named("beta > 0 and b finite"), bounded = named("1 <= V bounded"), drift = named("PV - V <= -beta V + b 1_C");
    detail::Tracker tp(params, s), tb(bounded, s), td(drift, s);
    if (!(beta > 0.0)) tp.fail(beta, "beta must be positive");
    if (!std::isfinite(b)) tp.fail(b, "b is not finite");
    if (params.held) params.worst_margin = beta;
    const auto opt = detail::options_for(s, V);
    double sup = 0.0;
    for (double x : detail::probes_for(dom, V)) {
        const double v = V(x);
        if (!std::isfinite(v)) {
            tb.fail(x, "V not finite");
            continue;
        }
        sup = std::max(sup, v);
        tb.observe(v - 1.0, v, x);
        const Integral I = integrate(k, x, V.fn, Region::everything(), opt);
        if (I.divergent || !std::isfinite(I.value)) {
            td.fail(x, "PV(x) is not finite");
            continue;
        }
        const double rhs = (1.0 - beta) * v + (C.contains(x) ? b : 0.0);
        td.observe(rhs - I.value, std::max(std::abs(rhs), std::abs(I.value)), x);
    }
    if (sup > s.div_threshold) {
        bounded.held = false;
        bounded.note = "sup of V exceeds div_threshold on the domain";
    }
    rep.conditions = {params, bounded, drift};
    detail::finish(rep);
    return rep;
}

}  // namespace ergocert
