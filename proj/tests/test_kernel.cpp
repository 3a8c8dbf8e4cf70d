#include <gtest/gtest.h>

#include <cmath>

#include "ergocert/grid.hpp"
#include "ergocert/kernel.hpp"
#include "ergocert/models.hpp"
#include "ergocert/quadrature.hpp"
#include "ergocert/region.hpp"
#include "support.hpp"

using namespace ergocert;

TEST(Region, MembershipOfIntervalsAndStates) {
    EXPECT_TRUE(Region::closed(0, 1).contains(1.0));
    EXPECT_FALSE(Region::half_open(0, 1).contains(1.0));
    EXPECT_TRUE(Region::half_open(0, 1).contains(0.0));
    EXPECT_FALSE(Region::open(0, 1).contains(0.0));
    EXPECT_TRUE(Region::states({0, 2}).contains(2.0));
    EXPECT_FALSE(Region::states({0, 2}).contains(1.0));
    EXPECT_TRUE(Region::everything().contains(-1e300));
    EXPECT_FALSE(Region::nothing().contains(0.0));
}

TEST(Region, ComplementFlipsMembership) {
    const Region a = Region::closed(0, 1);
    const Region c = a.complement();
    for (double x : {-1.0, 0.0, 0.5, 1.0, 1.5}) EXPECT_NE(a.contains(x), c.contains(x)) << x;
    EXPECT_TRUE(c.complement().contains(0.5));
}

TEST(Region, BreakpointsAreTheEndpoints) {
    const auto bp = Region::intervals({{0, 1, true, true}, {3, 4, false, true}}).breakpoints();
    ASSERT_EQ(bp.size(), 4u);
    EXPECT_EQ(bp.front(), 0.0);
    EXPECT_EQ(bp.back(), 4.0);
}

TEST(Kernel, PowerLawRowAtFour) {
    const Model m = preset("ex1-powerlaw", {{"r", 1.0}});
    const auto r = m.kernel.row(4.0);
    ASSERT_EQ(r.atoms.size(), 2u);
    EXPECT_EQ(r.atoms[0].at, 0.0);
    EXPECT_DOUBLE_EQ(r.atoms[0].mass, 0.25);
    EXPECT_EQ(r.atoms[1].at, 5.0);
    EXPECT_DOUBLE_EQ(r.atoms[1].mass, 0.75);
    EXPECT_FALSE(r.density.has_value());
}

TEST(Kernel, CountableOriginRowIsTheImmigrationLaw) {
    const Model m = preset("ex2-harmonic");
    const auto r = m.kernel.row(0.0);
    ASSERT_TRUE(r.tail.has_value());
    for (long j = 0; j < 10; ++j) EXPECT_DOUBLE_EQ(r.tail->pmf(j), std::ldexp(1.0, static_cast<int>(-(j + 1))));
    EXPECT_NEAR(r.tail->mass_from(0), 1.0, 1e-15);
}

TEST(Kernel, CertainResetRow) {
    Example1Params p;
    p.gamma = [](double) { return 1.0; };
    p.b = [](double) { return 0.0; };
    const Kernel k = build_example1(p);
    const auto r = k.row(3.0);
    ASSERT_EQ(r.atoms.size(), 1u);
    EXPECT_EQ(r.atoms[0].at, 0.0);
    EXPECT_EQ(r.atoms[0].mass, 1.0);
}

TEST(Kernel, DomainMismatchIsRejected) {
    const Model m = preset("ex2-harmonic");
    EXPECT_THROW(m.kernel.row(1.5), DomainError);
    EXPECT_THROW(m.kernel.row(-1.0), DomainError);
}

TEST(Kernel, IntegrateOverAtoms) {
    const Kernel k = as_kernel(oracle::three_state());
    auto f = [](double x) { return 10.0 * x; };
    EXPECT_DOUBLE_EQ(integrate(k, 1.0, [](double) { return 1.0; }, Region::states({0, 1, 2})).value, 1.0);
    EXPECT_DOUBLE_EQ(integrate(k, 1.0, f, Region::states({1, 2})).value, 10.0);
}

TEST(Kernel, IntegrateDensityOfUniformImmigration) {
    const Model m = preset("ex1-uniform");
    const auto I = integrate(m.kernel, 0.0, [](double y) { return y; }, Region::open(0, 1));
    EXPECT_NEAR(I.value, 0.5, 1e-8);
    EXPECT_FALSE(I.divergent);
}

TEST(Kernel, IntegrateIsAdditiveOverDisjointRegions) {
    const Model m = preset("ar1", {{"a", 0.5}});
    auto f = [](double y) { return 1.0 + y * y; };
    const double whole = integrate(m.kernel, 2.0, f, Region::everything()).value;
    const double left = integrate(m.kernel, 2.0, f, Region::half_open(-1e300, 1.3)).value;
    const double right = integrate(m.kernel, 2.0, f, Region::half_open(-1e300, 1.3).complement()).value;
    EXPECT_NEAR(left + right, whole, 1e-7);
    // E(aX + W)^2 + 1 with X = 2
    EXPECT_NEAR(whole, 1.0 + 1.0 + 1.0, 1e-7);
}

TEST(Kernel, UnboundedIntegrandIsDivergent) {
    const Model m = preset("ex1-pareto", {{"delta", 0.5}});
    const auto I = integrate(m.kernel, 0.0, [](double y) { return y; }, Region::everything());
    EXPECT_TRUE(I.divergent);
}

TEST(Kernel, ValidatePresetsAtProbes) {
    EXPECT_TRUE(validate(preset("ex1-powerlaw", {{"r", 1.0}}).kernel, {0, 0.5, 1, 10, 100}).ok());
    EXPECT_TRUE(validate(preset("ex2-harmonic").kernel, {0, 1, 2, 50}).ok());
    EXPECT_TRUE(validate(preset("ex1-sin").kernel, {0, 0.5, 3, 40}).ok());
}

TEST(Kernel, ValidateReportsNegativeResidualMass) {
    Example1Params p;
    p.gamma = [](double x) { return x > 5.0 ? 0.6 : 0.5; };
    p.b = [](double) { return 0.5; };
    p.beta = BetaLaw::uniform(1.0);
    const auto rep = validate(build_example1(p), {1.0, 7.0});
    EXPECT_TRUE(rep.negative_mass);
    ASSERT_EQ(rep.negative_at.size(), 1u);
    EXPECT_EQ(rep.negative_at[0], 7.0);
}

TEST(Quadrature, HalfLineExponential) {
    const auto q = integrate_range([](double x) { return std::exp(-x); }, 0.0, INFINITY);
    EXPECT_NEAR(q.value, 1.0, 1e-7);
    EXPECT_FALSE(q.divergent);
}

TEST(Quadrature, JumpAtBreakpointIsResolved) {
    auto step = [](double x) { return x < 0.3 ? 1.0 : 2.0; };
    EXPECT_NEAR(integrate_range(step, 0.0, 1.0, {0.3}).value, 0.3 + 1.4, 1e-12);
}

TEST(Quadrature, HeavyTailIsFlaggedDivergent) {
    const auto q = integrate_range([](double x) { return 1.0 / (1.0 + x); }, 0.0, INFINITY);
    EXPECT_TRUE(q.divergent);
}

TEST(Grid, ContinuousGridRequiresIntegerBinCount) {
    EXPECT_THROW(GridScheme::continuous(10.0, 0.3), ConfigError);
    EXPECT_THROW(GridScheme::continuous(10.0, 0.0), ConfigError);
    EXPECT_THROW(GridScheme::countable(0), ConfigError);
    const auto g = GridScheme::continuous(10.0, 0.5, 0.0, true);
    EXPECT_EQ(g.size(), 21u);
}

TEST(Grid, CountableIdentityDiscretization) {
    const Model m = preset("ex2-constant");
    const auto fk = discretize(m.kernel, GridScheme::countable(20));
    ASSERT_EQ(fk.size(), 20u);
    EXPECT_DOUBLE_EQ(fk.at(5, 4), 0.25);
    EXPECT_DOUBLE_EQ(fk.at(5, 0), 0.25);
    EXPECT_DOUBLE_EQ(fk.at(5, 5), 0.5);
    EXPECT_NEAR(fk.escape[0], std::ldexp(1.0, -20), 1e-18);
    EXPECT_LE(fk.max_mass_defect(), 1e-12);
}

TEST(Grid, UniformImmigrationStaysInGrid) {
    const Model m = preset("ex1-uniform");
    const auto fk = discretize(m.kernel, GridScheme::continuous(10.0, 0.5, 0.0, true));
    EXPECT_NEAR(fk.row_sum(0), 1.0, 1e-12);
    EXPECT_EQ(fk.escape[0], 0.0);
    EXPECT_LE(fk.max_mass_defect(), 1e-10);
}

TEST(Grid, AutoregressiveEscapeMatchesNormalTail) {
    const Model m = preset("ar1", {{"a", 0.5}});
    const auto grid = GridScheme::continuous(6.0, 0.1, -6.0);
    const auto fk = discretize(m.kernel, grid);
    const auto i = grid.locate(0.05);
    ASSERT_TRUE(i.has_value());
    const double x = fk.points[*i];
    const double tail = 0.5 * std::erfc((6.0 - 0.5 * x) / std::sqrt(2.0)) + 0.5 * std::erfc((6.0 + 0.5 * x) / std::sqrt(2.0));
    EXPECT_NEAR(fk.escape[*i], tail, 1e-6);
    EXPECT_LE(fk.max_mass_defect(), 1e-10);
}

TEST(Grid, DiscretizeConservesMassOnEveryPreset) {
    for (const auto& name : preset_names()) {
        const Model m = preset(name);
        const auto fk = discretize(m.kernel, default_grid(m, m.family == Family::example2 ? 256.0 : 0.0));
        EXPECT_LE(fk.max_mass_defect(), 1e-10) << name;
    }
}
