#include <gtest/gtest.h>

#include <cmath>

#include "plateau/moments.hpp"
#include "support.hpp"

using namespace plateau;
using namespace plateau::testing;

namespace {

std::shared_ptr<const ComponentMap> map_for(const std::vector<ParamCurve>& cs, GridSpec g = {}) {
    const auto ps = project_z1(cs);
    return std::make_shared<const ComponentMap>(classify_components(ps, g));
}

}  // namespace

TEST(PowerSum, FlatCircleHasZeroHigherMoments) {
    const auto c = sample_curve(flat_circle(), 256);
    EXPECT_EQ(power_sum(c, 1, 0.3), cplx{});
}

TEST(PowerSum, GraphGivesCauchyValue) {
    const auto c = sample_curve(graph_power(2), 256);
    EXPECT_NEAR(std::abs(power_sum(c, 1, 0.3) - 0.09), 0.0, 1e-14);
}

TEST(PowerSum, TwoSheetOracle) {
    const auto c = sample_curve(two_sheet(), 256);
    // sum over w = +-sqrt(zeta) of w^2
    EXPECT_NEAR(std::abs(power_sum(c, 2, 0.25) - 0.5), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(power_sum(c, 1, 0.25)), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(power_sum(c, 0, 0.25) - 2.0), 0.0, 1e-13);
}

TEST(PowerSum, LinearInCurveListAndOddUnderReversal) {
    const std::vector<ParamCurve> cs{sample_curve(graph_power(2), 256), sample_curve(graph_power(3), 256)};
    const cplx z{0.2, -0.1};
    for (int k = 0; k <= 4; ++k) {
        const cplx both = power_sum(cs, k, z);
        EXPECT_NEAR(std::abs(both - power_sum(cs[0], k, z) - power_sum(cs[1], k, z)), 0.0, 1e-14);
        EXPECT_NEAR(std::abs(power_sum(reversed(cs[0]), k, z) + power_sum(cs[0], k, z)), 0.0, 1e-15);
    }
}

TEST(PowerSum, DerivativeMatchesAnalytic) {
    const auto c = sample_curve(graph_power(2), 256);
    const auto d = power_sum_derivatives(std::span<const ParamCurve>(&c, 1), 2, cplx(0.2, 0.1));
    const cplx z{0.2, 0.1};
    EXPECT_NEAR(std::abs(d[1] - 2.0 * z), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(d[2] - 4.0 * z * z * z), 0.0, 1e-12);
}

TEST(CauchyEvaluator, AccurateNearTheBoundary) {
    const auto c = sample_curve(graph_power(2), 256);
    CauchyEvaluator ev(std::span<const ParamCurve>(&c, 1));
    for (double r : {0.9, 0.99, 0.999}) {
        const cplx z = std::polar(r, 0.7);
        const auto res = ev(z, 2, true);
        EXPECT_NEAR(std::abs(res.S[0] - 1.0), 0.0, 1e-10) << r;
        EXPECT_NEAR(std::abs(res.S[1] - z * z), 0.0, 1e-10) << r;
        EXPECT_NEAR(std::abs(res.dS[1] - 2.0 * z), 0.0, 1e-8) << r;
    }
}

TEST(MomentTable, GraphTable) {
    const std::vector<ParamCurve> cs{sample_curve(graph_power(2), 256)};
    const auto t = build_moment_table(cs, map_for(cs), 3);
    int inside = 0;
    for (int idx = 0; idx < t.map->grid.count(); ++idx) {
        if (t.values[idx].empty()) continue;
        const cplx z = t.map->grid.point(idx);
        const bool in = t.map->winding_at(idx) == 1;
        inside += in;
        EXPECT_NEAR(std::abs(t.values[idx][1] - (in ? z * z : 0.0)), 0.0, 1e-10);
        EXPECT_NEAR(std::abs(t.values[idx][2] - (in ? std::pow(z, 4) : 0.0)), 0.0, 1e-10);
    }
    EXPECT_GT(inside, 100);
}

TEST(MomentTable, EmptySliceGivesEmptyTable) {
    const std::vector<ParamCurve> none;
    const auto t = build_moment_table(none, nullptr, 3);
    EXPECT_TRUE(t.empty());
    EXPECT_EQ(moment_residual(t), 0.0);
}

TEST(MomentTable, TwoSheetOddSumsVanish) {
    const std::vector<ParamCurve> cs{sample_curve(two_sheet(), 256)};
    const auto t = build_moment_table(cs, map_for(cs), 4);
    for (int idx = 0; idx < t.map->grid.count(); ++idx) {
        if (t.values[idx].empty() || t.map->winding_at(idx) != 2) continue;
        EXPECT_NEAR(std::abs(t.values[idx][0] - 2.0), 0.0, 1e-10);
        EXPECT_NEAR(std::abs(t.values[idx][1]), 0.0, 1e-10);
        EXPECT_NEAR(std::abs(t.values[idx][3]), 0.0, 1e-10);
    }
}

TEST(MomentTable, S0RoundsToWinding) {
    const std::vector<ParamCurve> cs{sample_curve(flat_circle(0.0, 2.0), 256),
                                     sample_curve(flat_circle(0.0, 1.0, -1), 256)};
    const auto t = build_moment_table(cs, map_for(cs, GridSpec{-3, 3, -3, 3, 64, 64}), 2);
    for (int idx = 0; idx < t.map->grid.count(); ++idx)
        if (!t.values[idx].empty()) {
            EXPECT_LT(std::abs(t.values[idx][0] - double(t.map->winding_at(idx))), 1e-6);
        }
}

TEST(MomentTable, AdditiveUnderDisjointUnion) {
    const ParamCurve a = sample_curve(graph_power(2), 256);
    auto bs = graph_power(1);
    bs.z1.terms.push_back({0, {cplx(3.0, 0)}});
    const ParamCurve b = sample_curve(bs, 256);
    const std::vector<ParamCurve> both{a, b};
    const GridSpec g{-2, 5, -3, 3, 40, 40};
    const auto m = map_for(both, g);
    const auto tab = build_moment_table(both, m, 2);
    for (int idx = 0; idx < g.count(); ++idx) {
        if (tab.values[idx].empty()) continue;
        const auto z = g.point(idx);
        for (int k = 0; k <= 2; ++k)
            EXPECT_NEAR(std::abs(tab.values[idx][k] - power_sum(a, k, z, -1) - power_sum(b, k, z, -1)), 0.0, 1e-13);
    }
}

TEST(MomentResidual, GraphAndFlatCircle) {
    const std::vector<ParamCurve> g{sample_curve(graph_power(2), 256)};
    EXPECT_LT(moment_residual(build_moment_table(g, map_for(g), 4)), 1e-10);
    const std::vector<ParamCurve> f{sample_curve(flat_circle(), 256)};
    EXPECT_EQ(moment_residual(build_moment_table(f, map_for(f), 4)), 0.0);
}

TEST(MomentResidual, DetectsNonHolomorphicBoundary) {
    // z2 = conj(z1) on the circle: no holomorphic filling
    const std::vector<ParamCurve> g{sample_curve(spec(series({{1, 1.0}}), series({{-1, 1.0}})), 256)};
    EXPECT_GT(moment_residual(build_moment_table(g, map_for(g), 4)), 0.1);
}

TEST(Poincare, SignFormula) {
    EXPECT_EQ(poincare_form(0.7, 0.2), 0.5);
    EXPECT_EQ(poincare_form(-0.1, 0.2), -0.5);
    try {
        poincare_form(0.2, 0.2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SingularPoint);
    }
}

namespace {

// (e^{i theta}, (1 - t^2) e^{-i theta}) for t in [-1, 1]
CurveFamily shrinking_family(int nt) {
    CurveFamily fam;
    CurveTemplate tpl;
    tpl.spec.z1 = series({{1, 1.0}});
    tpl.spec.z2.terms.push_back({-1, {1.0, 0.0, -1.0}});
    tpl.tmin = -1;
    tpl.tmax = 1;
    fam.templates.push_back(tpl);
    for (int i = 0; i < nt; ++i) {
        const double t = -1.0 + 2.0 * i / (nt - 1);
        fam.tGrid.push_back(t);
        fam.slices.push_back({sample_curve(tpl.spec, 256, t)});
        fam.transverse.push_back(std::abs(t) < 1);
    }
    return fam;
}

HolomorphicTestForm z2dz1() {
    HolomorphicTestForm h;
    h.h1 = BiPolyT(BiPoly::monomial(0, 1));
    return h;
}

}  // namespace

TEST(FamilyMoment, DirectOnShrinkingFamily) {
    const auto fam = shrinking_family(21);
    for (int i = 1; i + 1 < fam.size(); ++i) {
        const double t = fam.tGrid[i];
        EXPECT_NEAR(std::abs(family_moment_direct(fam, z2dz1(), i) - two_pi * I * (1 - t * t)), 0.0, 1e-12);
    }
    try {
        family_moment_direct(fam, z2dz1(), 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::UseAlternative);
    }
}

TEST(FamilyMoment, PoincareAgreesWithDirect) {
    const auto fam = shrinking_family(21);
    for (int i = 1; i + 1 < fam.size(); ++i) {
        const cplx direct = family_moment_direct(fam, z2dz1(), i);
        const cplx viaP = family_moment_poincare(fam, z2dz1(), fam.tGrid[i]);
        EXPECT_LT(std::abs(direct - viaP), 1e-6) << fam.tGrid[i];
    }
    EXPECT_THROW(family_moment_poincare(fam, z2dz1(), 1.5), Error);
}

TEST(FamilyMoment, PoincareFromSlicesConverges) {
    auto fam = shrinking_family(41);
    fam.templates.clear();
    const cplx exact = two_pi * I * (1 - 0.3 * 0.3);
    const double e41 = std::abs(family_moment_poincare(fam, z2dz1(), 0.3) - exact);
    auto fine = shrinking_family(81);
    fine.templates.clear();
    const double e81 = std::abs(family_moment_poincare(fine, z2dz1(), 0.3) - exact);
    EXPECT_LT(e41, 1e-2);
    EXPECT_LT(e81, e41 / 3);
}

TEST(FamilyMoment, ClosedFormGivesZero) {
    const auto fam = shrinking_family(11);
    HolomorphicTestForm h;  // d(z1 z2) = z2 dz1 + z1 dz2
    h.h1 = BiPolyT(BiPoly::monomial(0, 1));
    h.h2 = BiPolyT(BiPoly::monomial(1, 0));
    EXPECT_EQ(family_moment_poincare(fam, h, 0.1), cplx{});
    HolomorphicTestForm dz1;
    dz1.h1 = BiPolyT(BiPoly::monomial(0, 0));
    EXPECT_NEAR(std::abs(family_moment_direct(fam, dz1, 5)), 0.0, 1e-14);
}

TEST(FamilyMoment, EmptySliceIsZero) {
    CurveFamily fam;
    fam.tGrid = {0.0};
    fam.slices = {{}};
    fam.transverse = {true};
    EXPECT_EQ(family_moment_direct(fam, z2dz1(), 0), cplx{});
}

TEST(TestForms, StandardSetSize) {
    EXPECT_EQ(standard_test_forms(3).size(), 20u);
}
