#include <gtest/gtest.h>

#include <random>

#include "plateau/roots.hpp"

using namespace plateau;

TEST(Newton, IntegerExample) {
    const std::vector<cplx> p{3.0, 5.0};
    const auto P = newton_to_monic(p, 2);
    EXPECT_NEAR(std::abs(P.e[0] - 3.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(P.e[1] - 2.0), 0.0, 1e-15);
    const auto r = fiber_roots(P);
    EXPECT_NEAR(std::abs(r[0] - 1.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(r[1] - 2.0), 0.0, 1e-14);
}

TEST(Newton, TwoSheetExample) {
    const std::vector<cplx> p{0.0, 0.5};
    const auto P = newton_to_monic(p, 2);
    EXPECT_NEAR(std::abs(P.e[0]), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(P.e[1] + 0.25), 0.0, 1e-15);
}

TEST(Newton, DegreeOne) {
    const std::vector<cplx> p{0.09};
    EXPECT_NEAR(std::abs(newton_to_monic(p, 1).e[0] - 0.09), 0.0, 1e-16);
}

TEST(Newton, SurplusMismatchIsNonPositive) {
    // p_k = 1 - 1 for roots {1} with multiplicity +1 and {2} with -1 is not a polynomial fiber
    const std::vector<cplx> p{-1.0, -3.0, -7.0};
    try {
        newton_to_monic(p, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonPositiveChain);
    }
}

TEST(Newton, RoundTripRandomPolynomials) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-0.7, 0.7);
    for (int trial = 0; trial < 200; ++trial) {
        const int d = 1 + trial % 6;
        std::vector<cplx> roots(d);
        for (auto& r : roots) r = {U(rng), U(rng)};
        const auto P = MonicPolynomial::from_roots(roots);
        std::vector<cplx> p(d + 2);
        // direct power sums from the roots
        for (int k = 1; k <= d + 2; ++k)
            for (auto r : roots) p[k - 1] += std::pow(r, k);
        const auto Q = newton_to_monic(p, d);
        for (int k = 0; k < d; ++k) EXPECT_NEAR(std::abs(Q.e[k] - P.e[k]), 0.0, 1e-9);
    }
}

TEST(Newton, DerivativeMatchesFiniteDifference) {
    auto ps = [](cplx z) { return std::vector<cplx>{2.0 * z, 2.0 * z * z + 1.0, 2.0 * z * z * z + 3.0 * z}; };
    // roots z +- 1/sqrt(2): p1 = 2z, p2 = 2z^2 + 1, p3 = 2z^3 + 3z
    const cplx z{0.3, 0.2};
    const auto P = newton_to_monic(ps(z), 2);
    const std::vector<cplx> dp{2.0, 4.0 * z};
    const auto de = newton_derivative(P, dp);
    const double h = 1e-6;
    const auto Pp = newton_to_monic(ps(z + h), 2), Pm = newton_to_monic(ps(z - h), 2);
    for (int k = 0; k < 2; ++k) EXPECT_NEAR(std::abs(de[k] - (Pp.e[k] - Pm.e[k]) / (2 * h)), 0.0, 1e-8);
}

TEST(FiberRoots, Examples) {
    auto r = fiber_roots(MonicPolynomial{{0.0, 0.0, 0.0}});
    ASSERT_EQ(r.size(), 3u);
    for (auto w : r) EXPECT_LT(std::abs(w), 1e-12);
    r = fiber_roots(MonicPolynomial{{0.0, -0.25}});
    EXPECT_NEAR(std::abs(r[0] + 0.5), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(r[1] - 0.5), 0.0, 1e-15);
}

TEST(FiberRoots, BackwardErrorOnRandomPolynomials) {
    std::mt19937 rng(11);
    std::normal_distribution<double> N;
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 1 + trial % 12;
        MonicPolynomial P;
        for (int k = 0; k < d; ++k) P.e.push_back({N(rng), N(rng)});
        for (auto w : fiber_roots(P)) EXPECT_LT(backward_error(P, w), 1e-10);
    }
}

TEST(Discriminant, MatchesClosedForms) {
    // w^2 - zeta has discriminant 4 zeta
    const cplx z{0.3, -0.2};
    EXPECT_NEAR(std::abs(discriminant(MonicPolynomial{{0.0, -z}}) - 4.0 * z), 0.0, 1e-14);
    // product of squared root differences for a cubic
    const std::vector<cplx> roots{1.0, cplx(0, 2), -0.5};
    const auto P = MonicPolynomial::from_roots(roots);
    cplx prod = 1.0;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) prod *= (roots[i] - roots[j]) * (roots[i] - roots[j]);
    EXPECT_NEAR(std::abs(discriminant(P) - prod), 0.0, 1e-12);
    EXPECT_EQ(discriminant(MonicPolynomial{{0.5}}), cplx(1.0));
}
