#include <gtest/gtest.h>

#include <cmath>

#include "plateau/family.hpp"
#include "support.hpp"

using namespace plateau;
using namespace plateau::testing;

TEST(Sweep, TorusGivesTwoLinearSheets) {
    const auto fam = torus_family(5);
    const auto set = sweep(fam);
    ASSERT_TRUE(set.failures.empty()) << set.failures[0].message;
    EXPECT_TRUE(set.signsConsistent);
    for (size_t s = 0; s < set.slices.size(); ++s) {
        const auto& sl = set.slices[s];
        const double a = std::sqrt(1 - sl.t * sl.t);
        ASSERT_FALSE(sl.empty());
        EXPECT_EQ(sl.fibers[0].degree, 2);
        for (int idx = 0; idx < set.grid.count(); ++idx)
            for (auto w : sl.roots[idx]) {
                const cplx z = set.grid.point(idx);
                EXPECT_LT(std::min(std::abs(w - a * z), std::abs(w + a * z)), 1e-6);
            }
        EXPECT_LT(sl.stokesResidual, 1e-6);
        // sheets cross over zeta = 0
        for (const auto& c : sl.singular) EXPECT_LT(std::abs(c.center), 2 * set.grid.dx());
    }
}

TEST(Sweep, ConstantFamilyIsPerfectlyContinuous) {
    CurveFamily fam;
    for (int i = 0; i < 3; ++i) {
        fam.tGrid.push_back(0.1 * i);
        fam.slices.push_back({sample_curve(graph_power(2), 256, 0.1 * i)});
        fam.transverse.push_back(true);
    }
    const auto set = sweep(fam);
    ASSERT_TRUE(set.failures.empty());
    EXPECT_FALSE(set.continuity.skipped);
    EXPECT_LT(set.continuity.maxRatio, 1e-8);
    EXPECT_TRUE(collate_singular(set).empty());
}

TEST(Sweep, SingleSliceContinuityIsSkipped) {
    CurveFamily fam;
    fam.tGrid = {0.0};
    fam.slices = {{sample_curve(graph_power(2), 256)}};
    fam.transverse = {true};
    const auto set = sweep(fam);
    EXPECT_TRUE(set.continuity.skipped);
    EXPECT_FALSE(set.continuity.note.empty());
}

TEST(Sweep, EmptySlicesStayEmpty) {
    CurveFamily fam;
    fam.tGrid = {0.0, 1.0, 2.0};
    fam.slices = {{sample_curve(graph_power(2), 256)}, {}, {sample_curve(graph_power(2), 256)}};
    fam.transverse = {true, true, true};
    const auto set = sweep(fam);
    EXPECT_TRUE(set.slices[1].empty());
    EXPECT_FALSE(set.slices[0].empty());
    EXPECT_FALSE(set.slices[2].empty());
    EXPECT_TRUE(set.failures.empty());
}

TEST(Sweep, TinySliceTreatedAsEmpty) {
    CurveFamily fam;
    fam.tGrid = {0.0, 1.0};
    fam.slices = {{sample_curve(graph_power(2), 256)},
                  {sample_curve(spec(series({{1, 1e-5}}), series({})), 256)}};
    fam.transverse = {true, true};
    const auto set = sweep(fam);
    EXPECT_TRUE(set.slices[1].empty());
    EXPECT_EQ(set.warnings.size(), 1u);
}

TEST(Sweep, CorruptedSliceFailsAlone) {
    auto fam = torus_family(5);
    // z2 = a z1 + 0.1 conj(z1) on one circle breaks the moment condition
    auto bad = spec(series({{1, 1.0}}), series({{1, std::sqrt(1 - fam.tGrid[2] * fam.tGrid[2])}, {-1, 0.1}}));
    fam.slices[2][0] = sample_curve(bad, 256, fam.tGrid[2]);
    const auto set = sweep(fam);
    ASSERT_EQ(set.failures.size(), 1u);
    EXPECT_EQ(set.failures[0].index, 2);
    EXPECT_EQ(set.failures[0].kind, ErrorKind::MomentViolation);
    EXPECT_DOUBLE_EQ(set.failures[0].t, fam.tGrid[2]);
    EXPECT_FALSE(set.slices[1].empty());
    EXPECT_FALSE(set.slices[3].empty());
}

TEST(Sweep, ShiftedBranchPointTracked) {
    const auto fam = shifted_branch_family(5);
    const auto set = sweep(fam);
    ASSERT_TRUE(set.failures.empty()) << set.failures[0].message;
    ASSERT_FALSE(set.singularLocus.empty());
    const double step = set.grid.dx();
    for (const auto& e : set.singularLocus) EXPECT_LT(std::abs(e.zeta - e.t), 2 * step);
    for (const auto& sl : set.slices) EXPECT_LT(sl.stokesResidual, 1e-6);
}

TEST(Sweep, RefinementKeepsSharedSlicesIdentical) {
    const auto coarse = torus_family(3);
    const auto fine = torus_family(5);
    SweepOptions opt;
    opt.grid = GridSpec{-1.5, 1.5, -1.5, 1.5, 48, 48};
    opt.recon.validate = false;
    const auto a = sweep(coarse, opt);
    const auto b = sweep(fine, opt);
    for (int s = 0; s < 3; ++s) {
        ASSERT_EQ(a.tGrid[s], b.tGrid[2 * s]);
        EXPECT_EQ(a.slices[s].roots, b.slices[2 * s].roots);
    }
}

TEST(Continuity, TorusBoundedByOracleLipschitz) {
    const auto fam = torus_family(21);
    SweepOptions opt;
    opt.recon.validate = false;
    const auto set = sweep(fam, opt);
    ASSERT_TRUE(set.failures.empty());
    double maxZ = 0.0;
    for (int idx = 0; idx < set.grid.count(); ++idx)
        if (!set.slices[10].roots[idx].empty()) maxZ = std::max(maxZ, std::abs(set.grid.point(idx)));
    for (size_t s = 0; s + 1 < set.slices.size(); ++s) {
        const double t0 = set.tGrid[s], t1 = set.tGrid[s + 1];
        const double oracle = std::abs(std::sqrt(1 - t1 * t1) - std::sqrt(1 - t0 * t0)) / (t1 - t0) * maxZ;
        EXPECT_LE(set.continuity.ratios[s], 2 * oracle + 1e-9) << s;
    }
    EXPECT_TRUE(set.continuity.pass);
}

TEST(Signs, InconsistentSignsDetected) {
    LeviFlatSet set;
    set.signsConsistent = false;
    try {
        check_signs(set);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::OrientationInconsistency);
    }
}
