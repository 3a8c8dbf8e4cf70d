#include <gtest/gtest.h>

#include <cmath>

#include "ergocert/classify.hpp"
#include "ergocert/criteria.hpp"
#include "ergocert/models.hpp"

using namespace ergocert;

namespace {

TestFunction constant_fn(double c, const std::string& label) {
    TestFunction f;
    f.fn = [c](double) { return c; };
    f.label = label;
    return f;
}

CertificateReport bundled(const Model& m, const std::string& crit) {
    const auto seq = test_functions_for(m, crit == "non-ergodic-corollary" ? "non-ergodic" : crit);
    return run_check(m, crit, seq, domain_for(m, crit));
}

bool not_valid(const CertificateReport& r) { return r.verdict != Verdict::valid; }

}  // namespace

TEST(Transient, PowerLawAboveOneIsCertified) {
    const auto r = bundled(preset("ex1-powerlaw", {{"r", 2.0}}), "transient");
    EXPECT_EQ(r.verdict, Verdict::valid);
    for (const auto& c : r.conditions) EXPECT_TRUE(c.held) << c.name;
}

TEST(Transient, ZeroFunctionHasEmptySublevelSet) {
    const Model m = preset("ex1-powerlaw", {{"r", 2.0}});
    const auto r = check_transient(m.kernel, constant_fn(0.0, "zero"), m.target, probe_domain(m, false));
    EXPECT_EQ(r.verdict, Verdict::invalid);
    EXPECT_FALSE(r.condition("{V < inf_C V} has positive measure")->held);
}

TEST(Transient, RecurrentPresetProductsAreUnboundedBelow) {
    const auto r = bundled(preset("ex1-powerlaw", {{"r", 0.5}}), "transient");
    EXPECT_EQ(r.verdict, Verdict::invalid);
    EXPECT_FALSE(r.condition("inf V > -inf")->held);
}

TEST(Recurrent, PowerLawBelowOneIsCertified) {
    const auto r = bundled(preset("ex1-powerlaw", {{"r", 0.5}}), "recurrent");
    EXPECT_EQ(r.verdict, Verdict::valid);
}

TEST(Recurrent, ConstantFunctionHasUnboundedSublevelSets) {
    const Model m = preset("ex1-powerlaw", {{"r", 0.5}});
    const auto r = check_recurrent_drift(m.kernel, constant_fn(1.0, "one"), m.target, probe_domain(m, true));
    EXPECT_EQ(r.verdict, Verdict::invalid);
    EXPECT_FALSE(r.condition("sublevel sets bounded")->held);
}

TEST(Recurrent, CountableLinearFunction) {
    const auto r = bundled(preset("ex2-harmonic"), "recurrent");
    EXPECT_EQ(r.verdict, Verdict::valid);
}

TEST(Recurrent, TransientPresetIsNotCertified) {
    EXPECT_TRUE(not_valid(bundled(preset("ex1-powerlaw", {{"r", 2.0}}), "recurrent")));
}

TEST(NonErgodic, HeavyImmigrationCountableExample) {
    const auto r = bundled(preset("ex2-heavy", {{"s", 2.0}}), "non-ergodic");
    EXPECT_EQ(r.verdict, Verdict::valid);
    ASSERT_TRUE(r.divergence.has_value());
    EXPECT_TRUE(r.divergence->crossing.has_value());
    EXPECT_TRUE(std::is_sorted(r.divergence->sequence.begin(), r.divergence->sequence.end()));
}

TEST(NonErgodic, ParetoNullRecurrentPreset) {
    const auto r = bundled(preset("ex1-pareto", {{"r", 0.5}, {"delta", 0.5}}), "non-ergodic");
    EXPECT_TRUE(r.condition("sup of V^(n) off A finite")->held);
    EXPECT_TRUE(r.condition("int_{A^c} V^(n) dP >= V^(n) - 1")->held);
    ASSERT_TRUE(r.divergence.has_value());
    EXPECT_TRUE(r.divergence->growing);
    EXPECT_EQ(r.verdict, Verdict::valid) << "partial integrals reach " << r.divergence->sequence.back();
}

TEST(NonErgodic, ErgodicPresetGivesNoFalsePositive) {
    const auto r = bundled(preset("ex1-uniform", {{"r", 0.5}}), "non-ergodic");
    EXPECT_TRUE(not_valid(r));
    ASSERT_TRUE(r.divergence.has_value());
    EXPECT_FALSE(r.divergence->crossing.has_value());
}

TEST(NonErgodic, NeedsTwoRungs) {
    const Model m = preset("ex2-harmonic");
    TestFunctionSequence seq;
    seq.functions = {constant_fn(0.0, "zero")};
    seq.rungs = {1};
    EXPECT_THROW(check_non_ergodic(m.kernel, seq, m.target, NonErgodicMode::theorem, probe_domain(m, false)),
                 DomainError);
}

TEST(NonStrong, UniformPresetIsCertified) {
    EXPECT_EQ(bundled(preset("ex1-uniform", {{"r", 0.5}}), "non-strong").verdict, Verdict::valid);
}

TEST(NonStrong, HarmonicCountablePresetIsCertified) {
    const auto r = bundled(preset("ex2-harmonic"), "non-strong");
    EXPECT_EQ(r.verdict, Verdict::valid);
    ASSERT_TRUE(r.divergence.has_value());
    EXPECT_GE(r.divergence->sequence.back(), 1e6);
}

TEST(NonStrong, BoundedResetProbabilityStabilizes) {
    const auto r = bundled(preset("ex1-sin", {{"a", 2.0}}), "non-strong");
    EXPECT_TRUE(not_valid(r));
    ASSERT_TRUE(r.divergence.has_value());
    EXPECT_LE(r.divergence->sequence.back(), 2.0 + 1e-9);
}

TEST(NonStrongTwoFn, LogarithmicResetPreset) {
    EXPECT_EQ(bundled(preset("ex1-log"), "non-strong-two-fn").verdict, Verdict::valid);
}

TEST(NonStrongTwoFn, BoundedVHasNoGrowth) {
    const Model m = preset("ex1-log");
    auto seq = test_functions_for(m, "non-strong-two-fn");
    TestFunction v;
    v.fn = [A = m.target](double x) { return A.contains(x) ? 0.0 : 1.0; };
    v.breakpoints = {1.0};
    v.label = "indicator";
    const auto r = check_non_strong_two_fn(m.kernel, v, *seq.companion, m.target, seq.ladder, seq.constant("d"),
                                           domain_for(m, "non-strong-two-fn"));
    EXPECT_TRUE(not_valid(r));
}

TEST(NonStrongTwoFn, ConstantWDoesNotDominate) {
    const Model m = preset("ex1-log");
    auto seq = test_functions_for(m, "non-strong-two-fn");
    const auto r = check_non_strong_two_fn(m.kernel, seq.functions.front(), constant_fn(1.0, "one"), m.target,
                                           seq.ladder, seq.constant("d"), domain_for(m, "non-strong-two-fn"));
    EXPECT_TRUE(not_valid(r));
    EXPECT_FALSE(r.condition("sup V/W beyond E_m vanishes")->held);
}

TEST(NonGeometric, CountablePowerFamily) {
    EXPECT_EQ(bundled(preset("ex2-nongeo", {{"a", 1.0}}), "non-geometric").verdict, Verdict::valid);
}

TEST(NonGeometric, TransplantedToUnitStepChain) {
    EXPECT_EQ(bundled(preset("ex1-uniform", {{"r", 0.5}}), "non-geometric").verdict, Verdict::valid);
}

TEST(NonGeometric, GeometricallyContractingPresetFails) {
    EXPECT_TRUE(not_valid(bundled(preset("ex1-sin", {{"a", 2.0}}), "non-geometric")));
}

TEST(NonGeometric, SupportBeyondDeclaredCompactIsRejected) {
    const Model m = preset("ex2-nongeo");
    auto seq = test_functions_for(m, "non-geometric");
    seq.functions[0].support_hi = 1.0;
    EXPECT_THROW(check_non_geometric(m.kernel, seq, seq.region, domain_for(m, "non-geometric")), DomainError);
}

TEST(ErgodicDrift, UniformPresetIsCertified) {
    const Model m = preset("ex1-uniform", {{"r", 0.5}});
    const auto seq = test_functions_for(m, "ergodic");
    EXPECT_GT(seq.constant("c"), 0.0);
    EXPECT_EQ(bundled(m, "ergodic").verdict, Verdict::valid);
}

TEST(ErgodicDrift, ZeroFunctionFailsOffC) {
    const Model m = preset("ex1-uniform", {{"r", 0.5}});
    const auto r = check_ergodic_drift(m.kernel, constant_fn(0.0, "zero"), m.target, 1.0, probe_domain(m, false));
    EXPECT_EQ(r.verdict, Verdict::invalid);
    EXPECT_FALSE(r.condition("PV - V <= -1 + b 1_C")->held);
}

TEST(ErgodicDrift, NullRecurrentPresetDivergesAtOrigin) {
    const auto r = bundled(preset("ex1-pareto", {{"r", 0.5}, {"delta", 0.5}}), "ergodic");
    EXPECT_EQ(r.verdict, Verdict::invalid);
}

TEST(StrongDrift, SinePresetIsCertified) {
    const Model m = preset("ex1-sin", {{"a", 2.0}});
    const auto seq = test_functions_for(m, "strongly-ergodic");
    EXPECT_GT(seq.constant("beta"), 0.0);
    EXPECT_EQ(bundled(m, "strongly-ergodic").verdict, Verdict::valid);
}

TEST(StrongDrift, UnboundedFunctionFailsBoundedness) {
    const Model m = preset("ex1-sin", {{"a", 2.0}});
    TestFunction v;
    v.fn = [](double x) { return 1.0 + x; };
    v.label = "1+x";
    const auto r = check_strong_drift(m.kernel, v, m.target, 10.0, 0.1, probe_domain(m, true));
    EXPECT_EQ(r.verdict, Verdict::invalid);
    EXPECT_FALSE(r.condition("1 <= V bounded")->held);
}

TEST(StrongDrift, VanishingResetPresetIsNotCertified) {
    EXPECT_TRUE(not_valid(bundled(preset("ex1-uniform", {{"r", 0.5}}), "strongly-ergodic")));
}

TEST(Classify, UniformPresetFlags) {
    const auto c = classify(preset("ex1-uniform", {{"r", 0.5}}));
    EXPECT_TRUE(c.flag("recurrent"));
    EXPECT_TRUE(c.flag("ergodic"));
    EXPECT_TRUE(c.flag("non-strongly-ergodic"));
    EXPECT_TRUE(c.flag("non-geometrically-ergodic"));
    EXPECT_FALSE(c.flag("transient"));
    EXPECT_FALSE(c.flag("strongly-ergodic"));
}

TEST(Classify, InapplicableCriterionIsSkippedWithReason) {
    ClassifyOptions opt;
    opt.criteria = {"transient"};
    const auto c = classify(preset("ex1-sin"), opt);
    ASSERT_EQ(c.checks.size(), 1u);
    EXPECT_FALSE(c.checks[0].applicable);
    EXPECT_EQ(c.checks[0].status(), "not-applicable");
    EXPECT_FALSE(c.checks[0].reason.empty());
}

TEST(Classify, ValidVerdictsRespectTheSlack) {
    const auto c = classify(preset("ex1-uniform", {{"r", 0.5}}));
    for (const auto& o : c.checks) {
        if (!o.valid()) continue;
        for (const auto& cond : o.report->conditions) EXPECT_TRUE(cond.held) << o.criterion << " " << cond.name;
    }
}

TEST(Divergence, ThresholdAndGrowthAreBothRequired) {
    const auto slow = detail::divergence_of({1, 2, 3, 4}, {1, 2, 3, 4}, 1e6);
    EXPECT_FALSE(slow.demonstrated());
    const auto flat = detail::divergence_of({1, 2, 3, 4}, {1, 2e6, 2e6, 2e6}, 1e6);
    EXPECT_TRUE(flat.crossing.has_value());
    EXPECT_FALSE(flat.demonstrated());
    const auto ok = detail::divergence_of({1, 2, 3, 4}, {1, 10, 2e6, 3e6}, 1e6);
    EXPECT_TRUE(ok.demonstrated());
    EXPECT_EQ(*ok.crossing, 2u);
}
