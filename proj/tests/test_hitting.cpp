#include <gtest/gtest.h>

#include <cmath>

#include "ergocert/grid.hpp"
#include "ergocert/hitting.hpp"
#include "ergocert/models.hpp"
#include "ergocert/truncation.hpp"
#include "support.hpp"

using namespace ergocert;

TEST(Hitting, ThreeStateReturnsSurely) {
    const auto L = return_probability(oracle::three_state(), Region::states({0}));
    for (double v : L.solution.values) EXPECT_NEAR(v, 1.0, 1e-12);
    EXPECT_NEAR(recurrence_diagnostic(L), 1.0, 1e-12);
}

TEST(Hitting, AbsorbingStateNeverReturns) {
    const auto k = finite_kernel({{{0, 1.0}}, {{1, 1.0}}});
    const auto L = return_probability(k, Region::states({0}));
    EXPECT_NEAR(L.solution[0], 1.0, 1e-12);
    EXPECT_EQ(L.solution[1], 0.0);
    EXPECT_EQ(recurrence_diagnostic(L), 0.0);
}

TEST(Hitting, ThreeStateExpectedReturnTime) {
    const auto T = expected_return_time(oracle::three_state(), Region::states({0}));
    EXPECT_NEAR(T.solution[0], 2.5, 1e-10);
    EXPECT_NEAR(T.solution[1], 1.5, 1e-10);
    EXPECT_NEAR(T.solution[2], 1.0, 1e-10);
}

TEST(Hitting, TwoStateGeometricReturn) {
    const auto T = expected_return_time(oracle::two_state(0.5), Region::states({0}));
    EXPECT_NEAR(T.solution[0], 3.0, 1e-10);
}

TEST(Hitting, GeometricSumTwoOutcomeClosedForm) {
    const auto V = geometric_sum(oracle::three_state(), Region::states({0}), 1.1);
    EXPECT_NEAR(V.solution[1], 1.55, 1e-10);
    EXPECT_NEAR(V.solution[2], 1.0, 1e-12);
}

TEST(Hitting, GeometricIdentityAgainstExponentialMoment) {
    for (const auto& k : {oracle::three_state(), oracle::two_state(0.5)}) {
        for (double r : {1.05, 1.2, 1.5}) {
            const auto V = geometric_sum(k, Region::states({0}), r);
            const auto E = exponential_moment(k, Region::states({0}), r);
            ASSERT_TRUE(V.converged());
            for (std::size_t i = 0; i < k.size(); ++i)
                EXPECT_NEAR((E.solution[i] - 1.0) / (r - 1.0), V.solution[i], 1e-8);
        }
    }
}

TEST(Hitting, GeometricSumTendsToReturnTimeAsRateTendsToOne) {
    const auto k = oracle::three_state();
    const auto T = expected_return_time(k, Region::states({0}));
    const auto V = geometric_sum(k, Region::states({0}), 1.0 + 1e-9);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(V.solution[i], T.solution[i], 1e-6);
}

TEST(Hitting, PointwiseOrderings) {
    const Model m = preset("ex2-constant");
    const auto fk = route_escape(discretize(m.kernel, GridScheme::countable(200)), m.target);
    const auto L = return_probability(fk, m.target);
    const auto T = expected_return_time(fk, m.target);
    const auto V1 = geometric_sum(fk, m.target, 1.02);
    const auto V2 = geometric_sum(fk, m.target, 1.04);
    for (std::size_t i = 0; i < fk.size(); ++i) {
        EXPECT_GE(L.solution[i], 0.0);
        EXPECT_LE(L.solution[i], 1.0 + 1e-12);
        EXPECT_GE(T.solution[i], L.solution[i] - 1e-12);
        EXPECT_GE(V1.solution[i], T.solution[i] - 1e-9);
        EXPECT_GE(V2.solution[i], V1.solution[i] - 1e-9);
    }
}

TEST(Hitting, RejectsRatesAtOrBelowOne) {
    EXPECT_THROW(geometric_sum(oracle::three_state(), Region::states({0}), 1.0), DomainError);
    EXPECT_THROW(exponential_moment(oracle::three_state(), Region::states({0}), 0.9), DomainError);
}

TEST(Hitting, EmptyTargetIsAConfigError) {
    EXPECT_THROW(return_probability(oracle::three_state(), Region::states({7})), ConfigError);
}

TEST(Hitting, ConstantExampleMatchesDenseSolve) {
    const Model m = preset("ex2-constant", {{"q", 0.25}});
    const auto fk = route_escape(discretize(m.kernel, GridScheme::countable(500)), m.target);
    const auto T = expected_return_time(fk, m.target);
    ASSERT_TRUE(T.converged());
    const auto want = oracle::dense_return_time(fk, m.target);
    for (std::size_t i = 0; i < fk.size(); ++i) EXPECT_NEAR(T.solution[i], want[i], 1e-8 * std::max(1.0, want[i]));
}

TEST(Hitting, NonGeometricPresetCrossesCap) {
    const Model m = preset("ex2-nongeo", {{"a", 1.0}});
    const auto fk = route_escape(discretize(m.kernel, GridScheme::countable(512)), Region::states({0, 1}));
    const auto V = geometric_sum(fk, Region::states({0, 1}), 1.05);
    EXPECT_EQ(V.status, SolveStatus::diverged);
    EXPECT_FALSE(V.diverged_at.empty());
}

TEST(Hitting, TransientPowerLawMatchesProductFormula) {
    // from x > 1 the chain climbs by one or resets to 0; on the grid it returns
    // unless it survives every reset before leaving [0, M)
    const Model m = preset("ex1-powerlaw", {{"r", 2.0}});
    const double M = 64.0;
    const auto fk = discretize(m.kernel, GridScheme::continuous(M, 0.25, 0.0, true));
    const auto L = return_probability(fk, m.target);
    for (std::size_t i = 0; i < fk.size(); ++i) {
        const double x = fk.points[i];
        if (x <= 1.0) continue;
        double survive = 1.0;
        for (double y = x; y < M; y += 1.0) survive *= 1.0 - std::pow(y, -2.0);
        EXPECT_NEAR(L.solution[i], 1.0 - survive, 1e-10) << "x = " << x;
        if (x > 8.0) {
            EXPECT_LT(L.solution[i], 1.0 - 1e-3);
        }
    }
}
