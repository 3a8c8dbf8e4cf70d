#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ergocert/criteria.hpp"
#include "ergocert/error.hpp"
#include "ergocert/models.hpp"

namespace ergocert {

/// Probe domain a criterion is checked on. Product-type test functions of
/// the transience/recurrence checks are evaluated along whole orbits, so they
/// stay on the dense part.
inline ProbeDomain domain_for(const Model& m, const std::string& criterion) {
    const bool dense_only = criterion == "transient" || criterion == "recurrent";
    return probe_domain(m, !dense_only || m.family != Family::example1);
}

/// Runs one criterion with a given family on a given domain.
inline CertificateReport run_check(const Model& m, const std::string& criterion, const TestFunctionSequence& seq,
                                   const ProbeDomain& dom, const CheckSettings& s = {}) {
    const Kernel& k = m.kernel;
    auto first = [&]() -> const TestFunction& {
        if (seq.functions.empty()) throw DomainError("criterion '" + criterion + "' needs a test function");
        return seq.functions.front();
    };
    if (criterion == "transient") return check_transient(k, first(), seq.region, dom, s);
    if (criterion == "recurrent") return check_recurrent_drift(k, first(), seq.region, dom, s);
    if (criterion == "non-ergodic") return check_non_ergodic(k, seq, seq.region, NonErgodicMode::theorem, dom, s);
    if (criterion == "non-ergodic-corollary")
        return check_non_ergodic(k, seq, seq.region, NonErgodicMode::corollary, dom, s);
    if (criterion == "non-strong") return check_non_strong(k, seq, seq.region, dom, s);
    if (criterion == "non-geometric") return check_non_geometric(k, seq, seq.region, dom, s);
    if (criterion == "ergodic") return check_ergodic_drift(k, first(), seq.region, seq.constant("b"), dom, s);
    if (criterion == "strongly-ergodic")
        return check_strong_drift(k, first(), seq.region, seq.constant("b"), seq.constant("beta"), dom, s);
    if (criterion == "non-strong-two-fn") {
        if (!seq.companion) throw DomainError("two-function check needs a companion W");
        return check_non_strong_two_fn(k, first(), *seq.companion, seq.region, seq.ladder, seq.constant("d"), dom, s);
    }
    throw ConfigError("criteria", "unknown criterion '" + criterion + "'");
}

struct CheckOutcome {
    std::string criterion;
    bool applicable = true;
    std::string reason;  ///< why the criterion was skipped
    std::optional<CertificateReport> report;
    std::map<std::string, double> constants;
    std::string family;
    double seconds = 0.0;

    bool valid() const { return report && report->valid(); }

    std::string status() const { return report ? to_string(report->verdict) : "not-applicable"; }
};

struct ClassifyOptions {
    CheckSettings settings{};
    std::vector<std::string> criteria;  ///< empty runs every criterion
    FamilyOptions family{};
};

struct Classification {
    std::string model;
    std::vector<CheckOutcome> checks;
    std::vector<std::pair<std::string, bool>> flags;
    double seconds = 0.0;

    const CheckOutcome* find(const std::string& criterion) const {
        for (const auto& c : checks)
            if (c.criterion == criterion) return &c;
        return nullptr;
    }

    bool flag(const std::string& name) const {
        for (const auto& [k, v] : flags)
            if (k == name) return v;
        return false;
    }
};

/// Runs the bundled families of every requested criterion and aggregates the
/// verdicts into stability flags. Contradictory certificates raise
/// InternalConsistencyError.
inline Classification classify(const Model& m, const ClassifyOptions& opt = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    Classification out;
    out.model = m.name;
    const std::vector<std::string> names = opt.criteria.empty() ? criterion_names() : opt.criteria;
    for (const auto& crit : names) {
        CheckOutcome oc;
        oc.criterion = crit;
        const auto t = std::chrono::steady_clock::now();
        std::optional<TestFunctionSequence> seq;
        try {
            seq = test_functions_for(m, crit == "non-ergodic-corollary" ? "non-ergodic" : crit, opt.family);
        } catch (const DomainError& e) {
            oc.applicable = false;
            oc.reason = e.what();
        }
        if (seq) {
            oc.constants = seq->constants;
            oc.family = seq->functions.empty() ? "" : seq->functions.front().label;
            oc.report = run_check(m, crit, *seq, domain_for(m, crit), opt.settings);
        }
        oc.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
        out.checks.push_back(std::move(oc));
    }

    auto ok = [&](const std::string& c) {
        const auto* o = out.find(c);
        return o && o->valid();
    };
    const bool transient = ok("transient");
    const bool recurrent = ok("recurrent");
    const bool ergodic = ok("ergodic");
    const bool non_ergodic = ok("non-ergodic") || ok("non-ergodic-corollary");
    const bool non_strong = ok("non-strong") || ok("non-strong-two-fn");
    const bool non_geo = ok("non-geometric");
    const bool strong = ok("strongly-ergodic");
    out.flags = {{"transient", transient},
                 {"recurrent", recurrent},
                 {"ergodic", ergodic},
                 {"non-ergodic", non_ergodic},
                 {"null-recurrent-evidence", recurrent && non_ergodic},
                 {"non-strongly-ergodic", non_strong},
                 {"non-geometrically-ergodic", non_geo},
                 {"strongly-ergodic", strong}};

    auto clash = [&](bool a, bool b, const std::string& what) {
        if (a && b) throw InternalConsistencyError("contradictory certificates on " + m.name + ": " + what);
    };
    clash(transient, ergodic, "transient and ergodic");
    clash(transient, recurrent, "transient and recurrent");
    clash(ergodic, non_ergodic, "ergodic and non-ergodic");
    clash(strong, non_strong, "strongly ergodic and non-strongly ergodic");
    clash(strong, non_geo, "strongly ergodic and non-geometrically ergodic");
    clash(strong, non_ergodic || transient, "strongly ergodic and not ergodic");
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

}  // namespace ergocert
