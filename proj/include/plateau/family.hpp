#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "plateau/core.hpp"
#include "plateau/geometry.hpp"
#include "plateau/moments.hpp"
#include "plateau/parallel.hpp"
#include "plateau/reconstruct.hpp"

namespace plateau {

struct SweepOptions {
    ReconstructOptions recon;
    std::optional<GridSpec> grid;  // common zeta-grid; derived from the curves when absent
    int nx = 64;
    int ny = 64;
    int kMax = 0;  // 0 selects 2 * max winding + 2
    double minLength = 1e-3;
    double cutoffFactor = kDefaultCutoffFactor;
};

struct SliceFailure {
    int index = 0;
    double t = 0.0;
    ErrorKind kind = ErrorKind::InvalidSpec;
    std::string message;
};

struct ContinuityReport {
    bool skipped = true;
    double maxRatio = 0.0;
    double bound = 0.0;
    bool pass = true;
    std::vector<double> ratios;  // per adjacent pair, NaN when not comparable
    std::string note;
};

struct SingularEntry {
    int tIndex = 0;
    double t = 0.0;
    int i = 0;
    int j = 0;
    cplx zeta{};
};

/// The filling assembled over the t-grid.
struct LeviFlatSet {
    std::vector<double> tGrid;
    GridSpec grid;
    std::vector<ChainSlice> slices;
    std::vector<MomentTable> tables;
    std::vector<SliceFailure> failures;
    std::vector<std::string> warnings;
    std::vector<SingularEntry> singularLocus;
    ContinuityReport continuity;
    bool signsConsistent = true;

    std::vector<int> signs() const {
        std::vector<int> s;
        for (const auto& sl : slices) s.push_back(sl.empty() ? 0 : sl.sign);
        return s;
    }
};

inline GridSpec family_grid(const CurveFamily& fam, int nx, int ny) {
    std::vector<PlanarCurve> all;
    for (const auto& s : fam.slices)
        for (const auto& c : s) all.push_back(project_z1(c));
    return auto_grid(all, nx, ny);
}

/// Ten times the largest finite-difference t-derivative of the boundary nodes.
inline double default_lipschitz_bound(const CurveFamily& fam) {
    double m = 0.0;
    for (int s = 0; s + 1 < fam.size(); ++s) {
        const auto& A = fam.slices[s];
        const auto& B = fam.slices[s + 1];
        if (A.size() != B.size()) continue;
        const double dt = fam.tGrid[s + 1] - fam.tGrid[s];
        for (size_t c = 0; c < A.size(); ++c) {
            if (A[c].size() != B[c].size()) continue;
            for (int j = 0; j < A[c].size(); ++j) m = std::max(m, abs(B[c].nodes[j] - A[c].nodes[j]) / dt);
        }
    }
    return 10.0 * m;
}

inline void check_signs(const LeviFlatSet& set) {
    if (!set.signsConsistent) fail(ErrorKind::OrientationInconsistency, "boundary sign changes across the t-grid");
}

inline std::vector<SingularEntry> collate_singular(const LeviFlatSet& set) {
    std::vector<SingularEntry> out;
    for (size_t s = 0; s < set.slices.size(); ++s)
        for (const auto& c : set.slices[s].singular)
            out.push_back({static_cast<int>(s), set.tGrid[s], c.i, c.j, c.center});
    return out;
}

namespace detail {

inline double symmetric_displacement(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    auto one_way = [](const std::vector<cplx>& x, const std::vector<cplx>& y) {
        double m = 0.0;
        for (auto p : x) {
            double best = std::numeric_limits<double>::infinity();
            for (auto q : y) best = std::min(best, std::abs(p - q));
            m = std::max(m, best);
        }
        return m;
    };
    return std::max(one_way(a, b), one_way(b, a));
}

}  // namespace detail

/// Largest root displacement per unit t between adjacent nonempty slices.
inline ContinuityReport continuity_check(const LeviFlatSet& set, double lipschitzBound) {
    ContinuityReport r;
    r.bound = lipschitzBound;
    r.ratios.assign(set.slices.size() > 0 ? set.slices.size() - 1 : 0, std::numeric_limits<double>::quiet_NaN());
    int compared = 0;
    for (size_t s = 0; s + 1 < set.slices.size(); ++s) {
        const auto& A = set.slices[s];
        const auto& B = set.slices[s + 1];
        if (A.empty() || B.empty()) continue;
        const double dt = set.tGrid[s + 1] - set.tGrid[s];
        double m = 0.0;
        bool any = false;
        for (size_t idx = 0; idx < A.roots.size() && idx < B.roots.size(); ++idx) {
            if (A.roots[idx].empty() || A.roots[idx].size() != B.roots[idx].size()) continue;
            m = std::max(m, detail::symmetric_displacement(A.roots[idx], B.roots[idx]));
            any = true;
        }
        if (!any) continue;
        r.ratios[s] = m / dt;
        r.maxRatio = std::max(r.maxRatio, m / dt);
        ++compared;
    }
    r.skipped = compared == 0;
    if (r.skipped) r.note = "fewer than two adjacent nonempty slices; nothing to compare";
    r.pass = r.skipped || r.maxRatio <= lipschitzBound;
    return r;
}

inline LeviFlatSet sweep(const CurveFamily& fam, const SweepOptions& opt = {}) {
    fam.validate();
    LeviFlatSet set;
    set.tGrid = fam.tGrid;
    set.grid = opt.grid ? *opt.grid : family_grid(fam, opt.nx, opt.ny);
    const int n = fam.size();
    set.slices.resize(n);
    set.tables.resize(n);
    std::vector<std::optional<SliceFailure>> failures(n);
    std::vector<std::string> warn(n);

    for (int s = 0; s < n; ++s) {
        const double t = fam.tGrid[s];
        const auto& curves = fam.slices[s];
        set.slices[s].t = t;
        double len = 0.0;
        for (const auto& c : curves) len += c.length();
        if (curves.empty()) continue;
        if (len < opt.minLength) {
            warn[s] = "slice at t=" + std::to_string(t) + " has boundary length below " +
                      std::to_string(opt.minLength) + "; treated as empty";
            continue;
        }
        try {
            const auto ps = project_z1(curves);
            auto map = std::make_shared<const ComponentMap>(classify_components(ps, set.grid, opt.cutoffFactor));
            const int kMax = opt.kMax > 0 ? std::max(opt.kMax, map->max_winding()) : 2 * map->max_winding() + 2;
            set.tables[s] = build_moment_table(curves, map, kMax);
            set.slices[s] = reconstruct_slice(curves, set.tables[s], t, opt.recon);
        } catch (const Error& e) {
            failures[s] = SliceFailure{s, t, e.kind(), e.what()};
        }
    }
    for (int s = 0; s < n; ++s) {
        if (failures[s]) set.failures.push_back(*failures[s]);
        if (!warn[s].empty()) set.warnings.push_back(warn[s]);
    }
    int sign = 0;
    for (const auto& sl : set.slices) {
        if (sl.empty()) continue;
        if (sign == 0) sign = sl.sign;
        if (sl.sign != sign) set.signsConsistent = false;
    }
    set.singularLocus = collate_singular(set);
    set.continuity = continuity_check(set, default_lipschitz_bound(fam));
    return set;
}

}  // namespace plateau
