#pragma once

#include <initializer_list>
#include <utility>
#include <vector>

#include "plateau/geometry.hpp"

namespace plateau::testing {

inline CoordSeries series(std::initializer_list<std::pair<double, cplx>> terms) {
    CoordSeries s;
    for (const auto& [f, c] : terms) s.terms.push_back({f, {c}});
    return s;
}

inline CurveSpec spec(CoordSeries z1, CoordSeries z2, int cover = 1, int orientation = 1) {
    CurveSpec s;
    s.z1 = std::move(z1);
    s.z2 = std::move(z2);
    s.cover = cover;
    s.orientation = orientation;
    return s;
}

/// Boundary of the graph w = z^p over the unit disk.
inline CurveSpec graph_power(int p) { return spec(series({{1, 1.0}}), series({{double(p), 1.0}})); }

/// Boundary of {w^2 = z} over the unit disk, one curve of cover 2.
inline CurveSpec two_sheet() { return spec(series({{1, 1.0}}), series({{0.5, 1.0}}), 2); }

inline CurveSpec flat_circle(cplx center = 0.0, double r = 1.0, int orientation = 1) {
    return spec(series({{0, center}, {1, r}}), series({}), 1, orientation);
}

}  // namespace plateau::testing

#include "plateau/geometry.hpp"

namespace plateau::testing {

/// Two coaxial circles z2 = +-sqrt(1 - t^2) z1 over |z1| = 1 on t in [-0.95, 0.95].
inline CurveFamily torus_family(int nt = 21, int n = 256) {
    CurveFamily fam;
    fam.quadratureN = n;
    for (int i = 0; i < nt; ++i) {
        const double t = -0.95 + 1.9 * i / (nt - 1);
        const double a = std::sqrt(1 - t * t);
        fam.tGrid.push_back(t);
        fam.slices.push_back({sample_curve(spec(series({{1, 1.0}}), series({{1, a}})), n, t),
                              sample_curve(spec(series({{1, 1.0}}), series({{1, -a}})), n, t)});
        fam.transverse.push_back(true);
    }
    return fam;
}

/// Boundary of {w^2 = z - t} over |z - t| = 1.
inline CurveFamily shifted_branch_family(int nt = 11, int n = 256) {
    CurveTemplate tpl;
    tpl.spec.cover = 2;
    tpl.spec.z1.terms = {{0, {0.0, 1.0}}, {1, {1.0}}};
    tpl.spec.z2.terms = {{0.5, {1.0}}};
    CurveFamily fam;
    fam.quadratureN = n;
    fam.templates.push_back(tpl);
    for (int i = 0; i < nt; ++i) {
        const double t = -0.5 + 1.0 * i / (nt - 1);
        fam.tGrid.push_back(t);
        fam.slices.push_back({sample_curve(tpl.spec, n, t)});
        fam.transverse.push_back(true);
    }
    return fam;
}

}  // namespace plateau::testing
