#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <boost/math/special_functions/polygamma.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include "ergocert/error.hpp"
#include "ergocert/grid.hpp"
#include "ergocert/kernel.hpp"
#include "ergocert/region.hpp"
#include "ergocert/testfn.hpp"

namespace ergocert {

/// Immigration law out of state 0 for the continuous example.
struct BetaLaw {
    enum class Kind { uniform, pareto };
    Kind kind = Kind::uniform;
    double width = 1.0;  ///< uniform on (0, width)
    double delta = 1.0;  ///< pareto: delta/(delta+1) [1_[0,1] + y^(-delta-1) 1_(1,inf)]

    static BetaLaw uniform(double width = 1.0) {
        if (!(width > 0.0) || !std::isfinite(width)) throw ConfigError("model.params.width", "must be positive");
        BetaLaw b;
        b.width = width;
        return b;
    }

    static BetaLaw pareto(double delta) {
        if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("model.params.delta", "must be positive");
        BetaLaw b;
        b.kind = Kind::pareto;
        b.delta = delta;
        return b;
    }

    double hi() const { return kind == Kind::uniform ? width : std::numeric_limits<double>::infinity(); }

    double pdf(double y) const {
        if (!(y > 0.0)) return 0.0;
        if (kind == Kind::uniform) return y < width ? 1.0 / width : 0.0;
        const double c = delta / (delta + 1.0);
        return y <= 1.0 ? c : c * std::pow(y, -delta - 1.0);
    }

    double cdf(double y) const {
        if (!(y > 0.0)) return 0.0;
        if (kind == Kind::uniform) return std::min(1.0, y / width);
        const double c = delta / (delta + 1.0);
        if (y <= 1.0) return c * y;
        return c + (1.0 - std::pow(y, -delta)) / (delta + 1.0);
    }

    double quantile(double u) const {
        u = std::clamp(u, 0.0, 1.0);
        if (kind == Kind::uniform) return u * width;
        const double c = delta / (delta + 1.0);
        if (u <= c) return u / c;
        return std::pow((delta + 1.0) * (1.0 - u), -1.0 / delta);
    }

    std::vector<double> breakpoints() const {
        return kind == Kind::uniform ? std::vector<double>{width} : std::vector<double>{1.0};
    }

    std::string describe() const {
        return kind == Kind::uniform ? "uniform(0," + fmt(width) + ")" : "pareto(" + fmt(delta) + ")";
    }

private:
    static std::string fmt(double v) {
        std::string s = std::to_string(v);
        while (s.size() > 1 && s.back() == '0') s.pop_back();
        if (!s.empty() && s.back() == '.') s.pop_back();
        return s;
    }
};

/// Reset probability gamma, up-step probability b and the law beta, plus the
/// tail envelopes of gamma that the bundled test functions need.
struct Example1Params {
    std::function<double(double)> gamma;
    std::function<double(double)> b;
    BetaLaw beta;
    std::function<double(double)> gamma_sup_from;  ///< sup of gamma over [x, inf)
    std::function<double(double)> gamma_inf_from;  ///< inf of gamma over [x, inf)
    double gamma_liminf = 0.0;
    double gamma_lt_one_after = std::numeric_limits<double>::infinity();  ///< gamma < 1 on (this, inf)
    double exponent = 1.0;  ///< a in the x^a non-geometric family
};

/// Sequences of the countable example: beta_j (j >= 0), gamma_i (i >= 2), p_i (i >= 1).
struct Example2Params {
    std::function<double(long)> beta;
    std::function<double(long)> beta_from;  ///< sum of beta_j over j >= k
    std::function<double(long)> gamma;
    std::function<double(long)> p;
    double exponent = 1.0;
};

struct AR1Params {
    double a = 0.5;
};

enum class Family { example1, example2, ar1, finite };

inline std::string to_string(Family f) {
    switch (f) {
    case Family::example1: return "example1";
    case Family::example2: return "example2";
    case Family::ar1: return "ar1";
    case Family::finite: return "finite";
    }
    return "unknown";
}

struct Model {
    std::string name;
    Family family = Family::finite;
    std::map<std::string, double> params;
    Kernel kernel;
    std::optional<Example1Params> ex1;
    std::optional<Example2Params> ex2;
    std::optional<AR1Params> ar1;
    std::optional<FiniteKernel> table;
    Region target;  ///< default A for hitting functionals
};

inline Kernel build_example1(const Example1Params& prm, const std::string& name = "example1") {
    if (!prm.gamma || !prm.b) throw ConfigError("model.params", "gamma and b must be given");
    auto p = std::make_shared<const Example1Params>(prm);
    auto rowfn = [p](double x) {
        TransitionRow r;
        if (x == 0.0) {
            const BetaLaw law = p->beta;
            Density d;
            d.pdf = [law](double y) { return law.pdf(y); };
            d.lo = 0.0;
            d.hi = law.hi();
            d.mass = 1.0;
            d.breakpoints = law.breakpoints();
            d.cdf = [law](double y) { return law.cdf(y); };
            d.quantile = [law](double u) { return law.quantile(u); };
            r.density = std::move(d);
            return r;
        }
        const double g = p->gamma(x);
        const double up = p->b(x);
        // exact zeros are dropped; a negative stay mass is kept so validate can report it
        if (g != 0.0) r.atoms.push_back({0.0, g});
        if (up != 0.0) r.atoms.push_back({x + 1.0, up});
        double stay = 1.0 - up - g;
        if (std::abs(stay) <= 1e-15) stay = 0.0;  // rounding of 1 - b - gamma when b + gamma = 1
        if (stay != 0.0) r.atoms.push_back({x, stay});
        return r;
    };
    return Kernel(SpaceKind::continuous, rowfn, name, 0.0);
}

inline Kernel build_example2(const Example2Params& prm, const std::string& name = "example2") {
    if (!prm.beta || !prm.beta_from || !prm.gamma || !prm.p) throw ConfigError("model.params", "sequences missing");
    auto p = std::make_shared<const Example2Params>(prm);
    auto rowfn = [p](double xd) {
        TransitionRow r;
        const long i = static_cast<long>(xd);
        if (i == 0) {
            DiscreteTail t;
            t.first = 0;
            t.pmf = p->beta;
            t.mass_from = p->beta_from;
            t.mass = 1.0;
            r.tail = std::move(t);
            return r;
        }
        const double g = i >= 2 ? p->gamma(i) : 0.0;
        const double down = p->p(i);
        if (g != 0.0) r.atoms.push_back({0.0, g});
        if (down != 0.0) r.atoms.push_back({static_cast<double>(i - 1), down});
        double stay = 1.0 - down - g;
        if (std::abs(stay) <= 1e-15) stay = 0.0;
        if (stay != 0.0) r.atoms.push_back({xd, stay});
        return r;
    };
    return Kernel(SpaceKind::countable, rowfn, name, 0.0);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

inline Kernel build_ar1(const AR1Params& prm, const std::string& name = "ar1") {
    const double a = prm.a;
    if (!(std::abs(a) < 1.0) || a == 0.0 || !std::isfinite(a)) throw ConfigError("model.params.a", "need 0 < |a| < 1");
    auto rowfn = [a](double x) {
        TransitionRow r;
        const double m = a * x;
        Density d;
        d.pdf = [m](double y) {
            const double z = y - m;
            return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
        };
        d.lo = -std::numeric_limits<double>::infinity();
        d.hi = std::numeric_limits<double>::infinity();
        d.mass = 1.0;
        d.breakpoints = {m - 10.0, m, m + 10.0};
        d.cdf = [m](double y) { return normal_cdf(y - m); };
        d.quantile = [m](double u) {
            if (u <= 0.0) return -std::numeric_limits<double>::infinity();
            if (u >= 1.0) return std::numeric_limits<double>::infinity();
            return m - std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u);
        };
        r.density = std::move(d);
        return r;
    };
    return Kernel(SpaceKind::continuous, rowfn, name, -std::numeric_limits<double>::infinity());
}

namespace detail {

inline double param(const std::map<std::string, double>& p, const std::string& key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

inline void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw ConfigError("model.params." + field, what);
}

inline Example1Params powerlaw_params(double r, BetaLaw beta) {
    require(r > 0.0 && std::isfinite(r), "r", "must be positive");
    Example1Params p;
    p.gamma = [r](double x) { return x <= 1.0 ? 1.0 : std::pow(x, -r); };
    p.b = [r](double x) { return x <= 1.0 ? 0.0 : 1.0 - std::pow(x, -r); };
    p.beta = beta;
    p.gamma_sup_from = p.gamma;  // nonincreasing
    p.gamma_inf_from = [](double) { return 0.0; };
    p.gamma_liminf = 0.0;
    p.gamma_lt_one_after = 1.0;
    p.exponent = r;
    return p;
}

inline Example2Params geometric_beta(Example2Params p) {
    p.beta = [](long j) { return j < 0 ? 0.0 : std::ldexp(1.0, static_cast<int>(-std::min(j + 1, 2000L))); };
    p.beta_from = [](long k) { return k <= 0 ? 1.0 : std::ldexp(1.0, static_cast<int>(-std::min(k, 2000L))); };
    return p;
}

/// beta_j = j^-3 / zeta(3) for j >= 1; tails through the Hurwitz zeta
/// zeta(3, k) = -psi''(k) / 2.
inline Example2Params cubic_beta(Example2Params p) {
    const double z3 = boost::math::zeta(3.0);
    p.beta = [z3](long j) { return j < 1 ? 0.0 : 1.0 / (std::pow(static_cast<double>(j), 3.0) * z3); };
    p.beta_from = [z3](long k) {
        return k <= 1 ? 1.0 : -0.5 * boost::math::polygamma(2, static_cast<double>(k)) / z3;
    };
    return p;
}

}  // namespace detail

/// Named presets with their parameters; unknown names and invalid values
/// raise ConfigError naming the field.
inline Model preset(const std::string& name, const std::map<std::string, double>& params = {}) {
    using detail::param;
    using detail::require;
    Model m;
    m.name = name;
    m.params = params;
    if (name == "ex1-powerlaw" || name == "ex1-uniform" || name == "ex1-pareto") {
        const double r = param(params, "r", name == "ex1-powerlaw" ? 2.0 : 0.5);
        BetaLaw beta = name == "ex1-pareto" ? BetaLaw::pareto(param(params, "delta", 0.5))
                                            : BetaLaw::uniform(param(params, "width", 1.0));
        Example1Params p = detail::powerlaw_params(r, beta);
        p.exponent = param(params, "a", r);
        require(p.exponent > 0.0, "a", "must be positive");
        m.params["r"] = r;
        m.family = Family::example1;
        m.ex1 = p;
        m.kernel = build_example1(p, name);
        m.target = Region::closed(0.0, 1.0);
        return m;
    }
    if (name == "ex1-sin") {
        const double a = param(params, "a", 2.0);
        require(a > 1.0 && std::isfinite(a), "a", "must exceed 1 so that gamma stays positive");
        Example1Params p;
        p.gamma = [a](double x) {
            const double s = std::sin(x);
            return 1.0 - s * s / a;
        };
        p.b = [a](double x) {
            const double s = std::sin(x);
            return s * s / a;
        };
        p.beta = BetaLaw::uniform(param(params, "width", 1.0));
        // every [x, inf) contains zeros and peaks of sin
        p.gamma_sup_from = [](double) { return 1.0; };
        p.gamma_inf_from = [a](double) { return 1.0 - 1.0 / a; };
        p.gamma_liminf = 1.0 - 1.0 / a;
        p.exponent = param(params, "exponent", 1.0);
        m.params["a"] = a;
        m.family = Family::example1;
        m.ex1 = p;
        m.kernel = build_example1(p, name);
        m.target = Region::closed(0.0, 1.0);
        return m;
    }
    if (name == "ex1-log") {
        Example1Params p;
        p.gamma = [](double x) { return 1.0 / std::log(M_E + x); };
        p.b = [](double x) { return 1.0 - 1.0 / std::log(M_E + x); };
        p.beta = BetaLaw::uniform(param(params, "width", 1.0));
        p.gamma_sup_from = p.gamma;
        p.gamma_inf_from = [](double) { return 0.0; };
        p.gamma_liminf = 0.0;
        p.gamma_lt_one_after = 0.0;
        p.exponent = param(params, "a", 1.0);
        m.family = Family::example1;
        m.ex1 = p;
        m.kernel = build_example1(p, name);
        m.target = Region::closed(0.0, 1.0);
        return m;
    }
    if (name == "ex2-harmonic" || name == "ex2-nongeo" || name == "ex2-constant") {
        Example2Params p;
        if (name == "ex2-harmonic") {
            p.gamma = [](long i) { return 0.5 / static_cast<double>(i); };
            p.p = p.gamma;
            p.exponent = 1.0;
        } else if (name == "ex2-nongeo") {
            const double a = param(params, "a", 1.0);
            require(a > 0.0 && std::isfinite(a), "a", "must be positive");
            p.gamma = [a](long i) { return std::pow(static_cast<double>(i), -a) / (1.0 + a); };
            p.p = p.gamma;
            p.exponent = a;
            m.params["a"] = a;
        } else {
            const double q = param(params, "q", 0.25);
            require(q > 0.0 && q <= 0.5, "q", "need 0 < q <= 1/2");
            p.gamma = [q](long) { return q; };
            p.p = [q](long i) { return i == 1 ? 0.5 : q; };
            p.exponent = 1.0;
            m.params["q"] = q;
        }
        p = name == "ex2-nongeo" ? detail::cubic_beta(std::move(p)) : detail::geometric_beta(std::move(p));
        m.family = Family::example2;
        m.ex2 = p;
        m.kernel = build_example2(p, name);
        m.target = Region::states({0.0});
        return m;
    }
    if (name == "ex2-heavy") {
        const double s = param(params, "s", 2.0);
        require(s > 0.0 && std::isfinite(s), "s", "must be positive");
        const double c = 6.0 / (M_PI * M_PI);
        Example2Params p;
        p.beta = [c](long j) { return j < 1 ? 0.0 : c / (static_cast<double>(j) * static_cast<double>(j)); };
        p.beta_from = [c](long k) { return k <= 1 ? 1.0 : c * boost::math::trigamma(static_cast<double>(k)); };
        p.gamma = [s](long i) { return 0.5 * std::pow(static_cast<double>(i), -s); };
        p.p = p.gamma;
        p.exponent = 1.0;
        m.params["s"] = s;
        m.family = Family::example2;
        m.ex2 = p;
        m.kernel = build_example2(p, name);
        m.target = Region::states({0.0});
        return m;
    }
    if (name == "ar1") {
        AR1Params p{param(params, "a", 0.5)};
        m.kernel = build_ar1(p, name);
        m.family = Family::ar1;
        m.ar1 = p;
        m.params["a"] = p.a;
        m.target = Region::half_open(-1.0, 1.0);
        return m;
    }
    throw ConfigError("model.preset", "unknown preset '" + name + "'");
}

inline Model inline_model(const FiniteKernel& fk, const Region& target, const std::string& name = "inline") {
    Model m;
    m.name = name;
    m.family = Family::finite;
    m.table = fk;
    m.kernel = as_kernel(fk);
    m.target = target;
    return m;
}

inline std::vector<std::string> preset_names() {
    return {"ex1-powerlaw", "ex1-uniform", "ex1-pareto", "ex1-sin", "ex1-log",
            "ex2-harmonic", "ex2-nongeo", "ex2-heavy", "ex2-constant", "ar1"};
}

/// Probe points where a model's certificates are checked. `far` adds
/// weight-zero probes out to 2^46 (continuous) or 2^22 (countable).
inline ProbeDomain probe_domain(const Model& m, bool far = true) {
    ProbeDomain d;
    switch (m.family) {
    case Family::example1: {
        const double h = 1.0 / 16.0;
        d.floor = h;
        d.label = "origin + midpoints and left ends of h=1/16 bins on [0,256)";
        d.add(0.0, 1.0);
        for (int i = 0; i < 4096; ++i) {
            if (i > 0) d.add(i * h, 0.0);
            d.add((i + 0.5) * h, h);
        }
        if (far) {
            for (int k = 8; k <= 46; ++k)
                for (int j = 0; j < 4; ++j) d.add(std::ldexp(1.0 + j / 4.0, k) + h / 2.0, 0.0);
            d.label += " + far probes to 2^46";
        }
        break;
    }
    case Family::example2:
        d.floor = 1.0;
        d.label = "states 0..4095";
        for (int i = 0; i < 4096; ++i) d.add(i, 1.0);
        if (far) {
            for (int k = 12; k <= 22; ++k)
                for (int j = 0; j < 4; ++j) d.add(std::ldexp(1.0 + j / 4.0, k), 0.0);
            d.label += " + far probes to 2^22";
        }
        break;
    case Family::ar1: {
        const double h = 1.0 / 16.0;
        d.floor = h;
        d.label = "midpoints of h=1/16 bins on [-32,32)";
        for (int i = -512; i < 512; ++i) d.add((i + 0.5) * h, h);
        if (far) {
            for (int k = 6; k <= 20; ++k) {
                d.add(std::ldexp(1.0, k) + h / 2.0, 0.0);
                d.add(-std::ldexp(1.0, k) - h / 2.0, 0.0);
            }
            d.label += " + far probes to 2^20";
        }
        break;
    }
    case Family::finite:
        d.floor = 1.0;
        d.label = "all states";
        for (double x : m.table->points) d.add(x, 1.0);
        break;
    }
    return d;
}

/// Grid used to discretize a model for hitting-time solves.
inline GridScheme default_grid(const Model& m, double cutoff = 0.0, double h = 0.0) {
    switch (m.family) {
    case Family::example1:
        return GridScheme::continuous(cutoff > 0.0 ? cutoff : 64.0, h > 0.0 ? h : 1.0 / 16.0, 0.0, true);
    case Family::example2: return GridScheme::countable(static_cast<std::size_t>(cutoff > 0.0 ? cutoff : 1024.0));
    case Family::ar1: {
        const double M = cutoff > 0.0 ? cutoff : 8.0;
        return GridScheme::continuous(M, h > 0.0 ? h : 1.0 / 16.0, -M);
    }
    case Family::finite: return GridScheme::countable(m.table->size());
    }
    throw DomainError("unknown model family");
}

namespace detail {

/// log of the product of 1/(1 - gamma(y)) over the backward orbit
/// y = x-1, x-2, ... restricted to y >= x0 (y > x0 when strict). Partial
/// sums are cached per orbit base point, so consecutive states along an
/// orbit share exactly the same summands.
class OrbitProducts {
public:
    OrbitProducts(std::function<double(double)> gamma, double x0, bool strict)
        : gamma_(std::move(gamma)), x0_(x0), strict_(strict) {}

    double log_product(double x) const {
        long m = 0;
        if (strict_ ? x > x0_ : x >= x0_) {
            m = strict_ ? static_cast<long>(std::ceil(x - x0_)) - 1 : static_cast<long>(std::floor(x - x0_));
        }
        if (m <= 0) return 0.0;
        if (m > (1L << 22)) throw DomainError("orbit product too long at x = " + std::to_string(x));
        const double base = x - static_cast<double>(m);
        std::lock_guard<std::mutex> lock(mu_);
        auto& cum = cache_[base];
        if (cum.empty()) cum.push_back(0.0);
        while (static_cast<long>(cum.size()) <= m) {
            const double y = base + static_cast<double>(cum.size() - 1);
            cum.push_back(cum.back() - std::log1p(-gamma_(y)));
        }
        return cum[static_cast<std::size_t>(m)];
    }

private:
    std::function<double(double)> gamma_;
    double x0_;
    bool strict_;
    mutable std::mutex mu_;
    mutable std::map<double, std::vector<double>> cache_;
};

inline std::vector<double> dyadic_rungs(int from, int to) {
    std::vector<double> r;
    for (int k = from; k <= to; ++k) r.push_back(std::ldexp(1.0, k));
    return r;
}

}  // namespace detail

struct FamilyOptions {
    int first_rung_log2 = 1;
    int last_rung_log2 = 0;  ///< 0 picks 42 for continuous models and 21 for countable ones
};

inline std::vector<std::string> criterion_names() {
    return {"transient", "recurrent", "non-ergodic", "ergodic",
            "non-strong", "non-strong-two-fn", "non-geometric", "strongly-ergodic"};
}

namespace detail {

inline TestFunctionSequence ex1_family(const Model& m, const std::string& crit, const FamilyOptions& fo) {
    const Example1Params& P = *m.ex1;
    const auto gamma = P.gamma;
    const auto G = P.gamma_sup_from;
    const int last = fo.last_rung_log2 > 0 ? fo.last_rung_log2 : 42;
    const double x1 = 1.0;  // A = [0, 1]
    TestFunctionSequence seq;
    seq.target = crit;
    const ProbeDomain dense = probe_domain(m, false);

    auto max_over = [&](const Region& R, const std::function<double(double)>& val) {
        double best = -std::numeric_limits<double>::infinity();
        for (double x : dense.points)
            if (R.contains(x)) best = std::max(best, val(x));
        return best;
    };

    if (crit == "transient" || crit == "recurrent") {
        if (!std::isfinite(P.gamma_lt_one_after)) {
            throw DomainError("product test function needs gamma < 1 eventually; " + m.name + " resets surely infinitely often");
        }
        const bool transient = crit == "transient";
        const double start = transient ? std::floor(P.gamma_lt_one_after) + 1.0 : P.gamma_lt_one_after;
        auto table = std::make_shared<OrbitProducts>(gamma, start, !transient);
        TestFunction V;
        if (transient) {
            V.fn = [table, start](double x) { return x < start ? 0.0 : -std::exp(table->log_product(x)); };
            V.label = "-prod 1/(1-gamma) along the orbit from x1 = " + std::to_string(start);
            seq.region = Region::closed(0.0, start);
            seq.constants["x1"] = start;
        } else {
            V.fn = [table, start](double x) { return x <= start ? 0.0 : std::exp(table->log_product(x)); };
            V.label = "prod 1/(1-gamma) along the orbit above " + std::to_string(start);
            seq.region = Region::closed(0.0, start);
        }
        V.breakpoints = {start};
        seq.functions.push_back(std::move(V));
        seq.rungs = {1.0};
        return seq;
    }

    if (crit == "non-ergodic" || crit == "non-strong") {
        const bool at_zero = crit == "non-ergodic";
        seq.region = Region::closed(0.0, x1);
        const BetaLaw law = P.beta;
        double partial = 0.0;
        double prev = x1;
        for (double n : dyadic_rungs(fo.first_rung_log2, last)) {
            if (at_zero) {
                auto integrand = [&](double y) { return law.pdf(y) / G(y); };
                partial += integrate_range(integrand, prev, n, law.breakpoints()).value;
                prev = n;
            }
            const double v0 = at_zero ? partial : 0.0;
            TestFunction V;
            V.fn = [G, n, v0, x1](double x) {
                if (x == 0.0) return v0;
                if (x <= x1) return 0.0;
                return 1.0 / G(std::min(x, n));
            };
            V.breakpoints = {x1, n};
            V.focus = {n - 0.5, n + 0.5, 2.0 * n};
            V.label = "1/sup gamma over [x ^ n, inf)";
            seq.functions.push_back(std::move(V));
            seq.rungs.push_back(n);
        }
        seq.note = at_zero ? "V(0) = int_{x1}^{n} beta / sup gamma" : "zero on A";
        return seq;
    }

    if (crit == "non-geometric") {
        const double a = P.exponent;
        seq.region = Region::closed(0.0, x1);
        for (double n : dyadic_rungs(std::max(2, fo.first_rung_log2), last)) {
            const double top = std::pow(n, a);
            const double K = n * std::pow(2.0, 1.0 / a);
            const double R = 4.0 * top + 4.0;
            TestFunction V;
            V.fn = [a, n, top, K, R, x1](double x) {
                if (x <= x1) return 0.0;
                if (x <= n) return std::pow(x, a);
                if (x <= K) return top;
                if (x >= K + R) return 0.0;
                return top * (1.0 - (x - K) / R);
            };
            V.breakpoints = {x1, n, K, K + R};
            V.support_hi = K + R;
            V.focus = {n, K, K + 0.5 * R, K + R - 0.5};
            V.label = "x^a on (1,n], flat to n 2^(1/a), ramp to zero";
            seq.functions.push_back(std::move(V));
            seq.rungs.push_back(n);
            seq.rates.push_back(1.0 + 1.0 / n);
        }
        seq.constants["a"] = a;
        return seq;
    }

    if (crit == "ergodic") {
        double s = -std::numeric_limits<double>::infinity();
        auto step = [&](double x) { return 1.0 / gamma(x + 1.0) - 1.0 / gamma(x); };
        for (double x : probe_domain(m, true).points)
            if (x > x1) s = std::max(s, step(x));
        s = std::max(s, step(x1 + 1e-9));
        if (!(s < 1.0)) {
            throw DomainError("sup of 1/gamma(x+1) - 1/gamma(x) is " + std::to_string(s) + " >= 1; no admissible c");
        }
        const double c = std::max(0.0, s) / (1.0 - std::max(0.0, s));
        TestFunction V;
        V.fn = [gamma, c, x1](double x) {
            if (x <= x1) return 0.0;
            const double g = gamma(x);
            return (c * (1.0 - g) + 1.0) / g;
        };
        V.breakpoints = {x1};
        V.label = "(c b + 1)/gamma off C";
        seq.region = Region::closed(0.0, x1);
        double b = -std::numeric_limits<double>::infinity();
        for (double x : dense.points) {
            if (!seq.region.contains(x)) continue;
            const Integral I = integrate(m.kernel, x, V.fn, Region::everything(), IntegrateOptions{{}, V.breakpoints});
            b = I.divergent ? std::numeric_limits<double>::infinity() : std::max(b, I.value - V(x) + 1.0);
        }
        seq.constants["s"] = s;
        seq.constants["c"] = c;
        seq.constants["b"] = std::max(0.0, b);
        seq.functions.push_back(std::move(V));
        seq.rungs = {1.0};
        return seq;
    }

    if (crit == "strongly-ergodic") {
        const double x1s = 0.0;
        const double edge = x1s + 1.0;
        const auto ginf = P.gamma_inf_from;
        const double beta = P.gamma_liminf > 0.0 ? ginf(edge) * (1.0 - P.gamma_liminf) : 0.0;
        TestFunction V;
        V.fn = [ginf, edge](double x) {
            if (x < edge) return 1.0;
            const double g = ginf(x);
            return g > 0.0 ? 1.0 / g : std::numeric_limits<double>::infinity();
        };
        V.breakpoints = {edge};
        V.label = "1/inf gamma over [x v (x1+1), inf)";
        seq.region = Region::half_open(0.0, edge);
        double b = 0.0;
        if (beta > 0.0) {
            b = max_over(seq.region, [&](double x) {
                const Integral I =
                    integrate(m.kernel, x, V.fn, Region::everything(), IntegrateOptions{{}, V.breakpoints});
                return I.value - (1.0 - beta) * V(x);
            });
            b = std::max(0.0, b);
        }
        seq.constants["beta"] = beta;
        seq.constants["b"] = b;
        seq.functions.push_back(std::move(V));
        seq.rungs = {1.0};
        return seq;
    }

    if (crit == "non-strong-two-fn") {
        seq.region = Region::closed(0.0, x1);
        TestFunction V;
        V.fn = [G, x1](double x) { return x <= x1 ? 0.0 : 1.0 / G(x); };
        V.breakpoints = {x1};
        V.label = "1/sup gamma over [x, inf) off A";
        TestFunction W;
        W.fn = [](double x) { return x; };
        W.label = "W(x) = x";
        double d = max_over(seq.region, [&](double x) {
            return integrate(m.kernel, x, W.fn, Region::everything()).value - W(x);
        });
        seq.constants["d"] = std::max(0.0, d);
        seq.ladder = dyadic_rungs(fo.first_rung_log2, last);
        seq.functions.push_back(std::move(V));
        seq.companion = std::move(W);
        seq.rungs = {1.0};
        return seq;
    }
    throw DomainError("criterion '" + crit + "' is not known");
}

inline TestFunctionSequence ex2_family(const Model& m, const std::string& crit, const FamilyOptions& fo) {
    const Example2Params& P = *m.ex2;
    const int last = fo.last_rung_log2 > 0 ? fo.last_rung_log2 : 21;
    auto rate = [P](long i) { return i == 1 ? P.p(1) : P.p(i) + P.gamma(i); };
    TestFunctionSequence seq;
    seq.target = crit;

    if (crit == "recurrent") {
        TestFunction V;
        V.fn = [](double x) { return x; };
        V.label = "v_i = i";
        seq.functions.push_back(std::move(V));
        seq.region = Region::states({0.0});
        seq.rungs = {1.0};
        return seq;
    }
    if (crit == "non-ergodic") {
        seq.region = Region::states({0.0});
        double partial = 0.0;
        long k = 2;
        for (double n : dyadic_rungs(fo.first_rung_log2, last)) {
            for (; k <= static_cast<long>(n); ++k) partial += P.beta(k) / rate(k);
            const double v0 = partial;
            const double p1 = P.p(1);
            const long cap = static_cast<long>(n);
            TestFunction V;
            V.fn = [rate, v0, p1, cap](double x) {
                const long i = static_cast<long>(x);
                if (i == 0) return v0;
                if (i == 1) return 1.0 / p1;
                return 1.0 / rate(std::min(i, cap));
            };
            V.focus = {n, n + 1.0};
            V.label = "1/(p+gamma) capped at n, v_0 = partial sum";
            seq.functions.push_back(std::move(V));
            seq.rungs.push_back(n);
        }
        return seq;
    }
    if (crit == "non-strong") {
        seq.region = Region::states({0.0, 1.0});
        for (double n : dyadic_rungs(fo.first_rung_log2, last)) {
            const long cap = static_cast<long>(n);
            TestFunction V;
            V.fn = [rate, cap](double x) {
                const long i = static_cast<long>(x);
                return i <= 1 ? 0.0 : 1.0 / rate(std::min(i, cap));
            };
            V.focus = {n, n + 1.0};
            V.label = "1/(p+gamma) off {0,1}, capped at n";
            seq.functions.push_back(std::move(V));
            seq.rungs.push_back(n);
        }
        return seq;
    }
    if (crit == "non-geometric") {
        const double a = P.exponent;
        seq.region = Region::states({0.0});
        for (double n : dyadic_rungs(fo.first_rung_log2, last)) {
            TestFunction V;
            V.fn = [a, n](double x) { return x <= n ? std::pow(x, a) : 0.0; };
            V.support_hi = n;
            V.focus = {n, n + 1.0};
            V.label = "i^a 1{i <= n}";
            seq.functions.push_back(std::move(V));
            seq.rungs.push_back(n);
            seq.rates.push_back(1.0 + 1.0 / n);
        }
        seq.constants["a"] = a;
        return seq;
    }
    throw DomainError("criterion '" + crit + "' has no bundled family for " + m.name);
}

inline TestFunctionSequence ar1_family(const Model& m, const std::string& crit) {
    if (crit != "ergodic") throw DomainError("criterion '" + crit + "' has no bundled family for " + m.name);
    const double a = m.ar1->a;
    const double c = std::sqrt(2.0 / (1.0 - a * a));
    TestFunctionSequence seq;
    seq.target = crit;
    TestFunction V;
    V.fn = [](double x) { return 1.0 + x * x; };
    V.label = "1 + x^2";
    seq.functions.push_back(std::move(V));
    seq.region = Region::closed(-c, c);
    seq.constants["b"] = 2.0;
    seq.rungs = {1.0};
    return seq;
}

}  // namespace detail

/// The bundled test functions of a built-in model for one criterion, with the
/// set (A or C) and any constants (b, beta, d, c) resolved. Throws
/// DomainError when the criterion has no family for this model.
inline TestFunctionSequence test_functions_for(const Model& m, const std::string& criterion,
                                               const FamilyOptions& fo = {}) {
    switch (m.family) {
    case Family::example1: return detail::ex1_family(m, criterion, fo);
    case Family::example2: return detail::ex2_family(m, criterion, fo);
    case Family::ar1: return detail::ar1_family(m, criterion);
    case Family::finite: break;
    }
    throw DomainError("inline kernels carry no bundled test functions");
}

}  // namespace ergocert
