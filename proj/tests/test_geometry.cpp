#include <gtest/gtest.h>

#include <cmath>

#include "plateau/geometry.hpp"
#include "support.hpp"

using namespace plateau;
using namespace plateau::testing;

TEST(SampleCurve, UnitCircleNodes) {
    const auto c = sample_curve(flat_circle(), 64);
    ASSERT_EQ(c.size(), 64);
    for (int i = 0; i < 64; ++i) {
        EXPECT_NEAR(std::abs(c.nodes[i].z1), 1.0, 1e-15);
        EXPECT_EQ(c.nodes[i].z2, cplx{});
        EXPECT_DOUBLE_EQ(c.params[i], two_pi * i / 64);
    }
    EXPECT_EQ(c.orientation, 1);
}

TEST(SampleCurve, GraphBoundaryLiesOnGraph) {
    const auto c = sample_curve(graph_power(2), 128);
    for (const auto& p : c.nodes) EXPECT_NEAR(std::abs(p.z2 - p.z1 * p.z1), 0.0, 1e-14);
}

TEST(SampleCurve, DoubleCoverClosesAfterFourPi) {
    const auto c = sample_curve(two_sheet(), 256);
    EXPECT_DOUBLE_EQ(c.period, 4 * pi);
    for (const auto& p : c.nodes) EXPECT_NEAR(std::abs(p.z2 * p.z2 - p.z1), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(c.nodes[128].z2 + c.nodes[0].z2), 0.0, 1e-14);
}

TEST(SampleCurve, RejectsBadInput) {
    EXPECT_THROW(sample_curve(flat_circle(), 100), Error);
    EXPECT_THROW(sample_curve(flat_circle(), 8), Error);
    auto bad = flat_circle();
    bad.z1.terms[1].tPoly[0] = cplx(NAN, 0);
    try {
        sample_curve(bad, 64);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidSpec);
    }
    // half-integer degree needs cover 2
    EXPECT_THROW(sample_curve(spec(series({{1, 1.0}}), series({{0.5, 1.0}}), 1), 64), Error);
}

TEST(ProjectZ1, CarriesOrientationAndParams) {
    const auto c = reversed(sample_curve(graph_power(2), 64));
    const auto p = project_z1(c);
    EXPECT_EQ(p.orientation, -1);
    EXPECT_EQ(p.params, c.params);
    for (int i = 0; i < 64; ++i) EXPECT_EQ(p.nodes[i], c.nodes[i].z1);
}

TEST(ProjectZ1, DoubleCoverTracesCircleTwice) {
    const auto p = project_z1(sample_curve(two_sheet(), 256));
    for (int i = 0; i < 128; ++i) EXPECT_NEAR(std::abs(p.nodes[i] - p.nodes[i + 128]), 0.0, 1e-14);
    EXPECT_EQ(winding_number(p, 0.0).value, 2);
}

TEST(Winding, CircleExamples) {
    const auto p = project_z1(sample_curve(flat_circle(), 256));
    EXPECT_EQ(winding_number(p, 0.0).value, 1);
    EXPECT_EQ(winding_number(p, 2.0).value, 0);
    const auto r = project_z1(reversed(sample_curve(flat_circle(), 256)));
    EXPECT_EQ(winding_number(r, 0.0).value, -1);
    EXPECT_LT(winding_number(p, cplx(0.3, 0.2)).residual, 1e-6);
}

TEST(Winding, NearBoundaryIsRejected) {
    const auto p = project_z1(sample_curve(flat_circle(), 64));
    try {
        winding_number(p, 1.001);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NearBoundary);
    }
}

TEST(Winding, GeometricConvergence) {
    // residual of the raw integral at an off-centre point, N and 2N
    const cplx z{0.45, -0.3};
    double prev = -1;
    for (int n : {16, 32, 64}) {
        const auto p = project_z1(sample_curve(spec(series({{1, 1.0}, {-1, 0.2}}), series({})), n));
        const double err = std::abs(winding_number(p, z, -1.0).raw - 1.0);
        if (prev >= 0) {
            EXPECT_LE(err, prev * prev + 64 * 2.2e-16);
        }
        prev = err;
    }
}

TEST(Winding, StableUnderResampling) {
    const auto c = sample_curve(spec(series({{1, 1.0}, {2, 0.3}}), series({})), 256);
    for (cplx z : {cplx(0.1, 0.1), cplx(-0.5, 0.2), cplx(1.9, 0)}) {
        const int a = winding_number(project_z1(c), z).value;
        const int b = winding_number(project_z1(resample(c, 512)), z).value;
        EXPECT_EQ(a, b);
    }
}

TEST(Components, UnitCircle) {
    const auto p = project_z1(sample_curve(flat_circle(), 256));
    GridSpec g;
    const auto m = classify_components(std::span<const PlanarCurve>(&p, 1), g);
    ASSERT_EQ(m.components(), 2);
    EXPECT_EQ(m.winding[0], 0);
    EXPECT_EQ(m.winding[1], 1);
    EXPECT_EQ(m.label[g.index(0, 0)], 0);
    EXPECT_EQ(m.label[g.index(32, 32)], 1);
}

TEST(Components, TwoDisjointCircles) {
    std::vector<PlanarCurve> ps{project_z1(sample_curve(flat_circle(), 256)),
                                project_z1(sample_curve(flat_circle(3.0, 0.5), 256))};
    GridSpec g{-2, 4, -3, 3, 96, 96};
    const auto m = classify_components(ps, g);
    EXPECT_EQ(m.components(), 3);
    EXPECT_EQ(m.winding[1] + m.winding[2], 2);
}

TEST(Components, AnnulusMatchesBruteForce) {
    std::vector<PlanarCurve> ps{project_z1(sample_curve(flat_circle(0.0, 2.0), 256)),
                                project_z1(sample_curve(flat_circle(0.0, 1.0, -1), 256))};
    GridSpec g{-3, 3, -3, 3, 80, 80};
    const auto m = classify_components(ps, g);
    ASSERT_EQ(m.components(), 3);
    for (int idx = 0; idx < g.count(); ++idx) {
        if (m.label[idx] == ComponentMap::BOUNDARY) continue;
        // direct oracle: 1 on the annulus, 0 elsewhere
        const double r = std::abs(g.point(idx));
        EXPECT_EQ(m.winding[m.label[idx]], (r > 1 && r < 2) ? 1 : 0);
    }
}

TEST(Components, StableUnderRefinement) {
    std::vector<PlanarCurve> ps{project_z1(sample_curve(flat_circle(0.0, 2.0), 256)),
                                project_z1(sample_curve(flat_circle(0.0, 1.0, -1), 256))};
    const auto a = classify_components(ps, GridSpec{-3, 3, -3, 3, 64, 64});
    const auto b = classify_components(ps, GridSpec{-3, 3, -3, 3, 127, 127});
    EXPECT_EQ(a.components(), b.components());
    EXPECT_EQ(a.winding, b.winding);
}

TEST(Components, ReversalNegatesWindings) {
    auto c = sample_curve(spec(series({{1, 1.0}, {2, 0.3}}), series({})), 256);
    const auto p = project_z1(c), q = project_z1(reversed(c));
    GridSpec g;
    const auto a = classify_components(std::span<const PlanarCurve>(&p, 1), g);
    const auto b = classify_components(std::span<const PlanarCurve>(&q, 1), g);
    EXPECT_EQ(a.label, b.label);
    for (int i = 0; i < a.components(); ++i) EXPECT_EQ(a.winding[i], -b.winding[i]);
}

TEST(Curve, LengthOfGraphBoundary) {
    const auto c = sample_curve(graph_power(2), 256);
    EXPECT_NEAR(c.length(), two_pi * std::sqrt(5.0), 1e-12);
}

TEST(Curve, SampleResampleFromRawPoints) {
    const auto c = sample_curve(graph_power(3), 64);
    auto raw = curve_from_samples(c.nodes, c.period);
    const auto r = resample(raw, 256);
    for (int i = 0; i < 256; ++i) {
        const C2 exact = c.source->eval(r.params[i], 0.0);
        EXPECT_NEAR(abs(r.nodes[i] - exact), 0.0, 1e-12);
    }
    EXPECT_NEAR(abs(raw.eval(0.123) - c.source->eval(0.123, 0.0)), 0.0, 1e-12);
}
