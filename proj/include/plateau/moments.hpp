#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <span>
#include <vector>

#include "plateau/core.hpp"
#include "plateau/geometry.hpp"
#include "plateau/parallel.hpp"
#include "plateau/polynomial.hpp"
#include "plateau/quadrature.hpp"

namespace plateau {

namespace detail {

inline void check_clearance(const ParamCurve& c, cplx zeta, double cutoffFactor) {
    if (cutoffFactor <= 0) return;
    const auto p = project_z1(c);
    if (p.distance(zeta) <= dist_to_curve_cutoff(p, cutoffFactor))
        fail(ErrorKind::NearBoundary, "evaluation point within cutoff of the projected curve");
}

// Adds (1/2 pi i) sum_j z2^k v1 / (z1 - zeta) dtheta to S and, when dS is
// given, the same with (z1 - zeta)^2 to dS, for k = 0..kMax.
inline void accumulate(const std::vector<cplx>& z1, const std::vector<cplx>& v1, const std::vector<cplx>& z2,
                       double period, int orientation, cplx zeta, std::vector<cplx>& S, std::vector<cplx>* dS) {
    const int n = static_cast<int>(z1.size());
    const int kMax = static_cast<int>(S.size()) - 1;
    const cplx scale = (period / n) * static_cast<double>(orientation) / cplx(0.0, two_pi);
    std::vector<cplx> acc(S.size()), dacc(dS ? S.size() : 0);
    for (int j = 0; j < n; ++j) {
        const cplx r = 1.0 / (z1[j] - zeta);
        cplx w = v1[j] * r;
        if (dS) {
            cplx u = w * r;
            for (int k = 0; k <= kMax; ++k) {
                acc[k] += w;
                dacc[k] += u;
                w *= z2[j];
                u *= z2[j];
            }
        } else {
            for (int k = 0; k <= kMax; ++k) {
                acc[k] += w;
                w *= z2[j];
            }
        }
    }
    for (size_t k = 0; k < S.size(); ++k) S[k] += acc[k] * scale;
    if (dS)
        for (size_t k = 0; k < S.size(); ++k) (*dS)[k] += dacc[k] * scale;
}

inline void split(const ParamCurve& c, std::vector<cplx>& z1, std::vector<cplx>& v1, std::vector<cplx>& z2) {
    const int n = c.size();
    z1.resize(n);
    v1.resize(n);
    z2.resize(n);
    for (int j = 0; j < n; ++j) {
        z1[j] = c.nodes[j].z1;
        v1[j] = c.velocity[j].z1;
        z2[j] = c.nodes[j].z2;
    }
}

}  // namespace detail

/// S_k(zeta) for k = 0..kMax, summed over the curves of one slice.
inline std::vector<cplx> power_sums(std::span<const ParamCurve> curves, int kMax, cplx zeta,
                                    double cutoffFactor = kDefaultCutoffFactor) {
    if (kMax < 0) fail(ErrorKind::InvalidSpec, "kMax must be >= 0");
    std::vector<cplx> out(kMax + 1);
    std::vector<cplx> z1, v1, z2;
    for (const auto& c : curves) {
        detail::check_clearance(c, zeta, cutoffFactor);
        detail::split(c, z1, v1, z2);
        detail::accumulate(z1, v1, z2, c.period, c.orientation, zeta, out, nullptr);
    }
    return out;
}

inline cplx power_sum(std::span<const ParamCurve> curves, int k, cplx zeta,
                      double cutoffFactor = kDefaultCutoffFactor) {
    if (k < 0) fail(ErrorKind::InvalidSpec, "k must be >= 0");
    return power_sums(curves, k, zeta, cutoffFactor)[k];
}

inline cplx power_sum(const ParamCurve& c, int k, cplx zeta, double cutoffFactor = kDefaultCutoffFactor) {
    return power_sum(std::span<const ParamCurve>(&c, 1), k, zeta, cutoffFactor);
}

/// Derivatives dS_k/dzeta for k = 0..kMax.
inline std::vector<cplx> power_sum_derivatives(std::span<const ParamCurve> curves, int kMax, cplx zeta,
                                               double cutoffFactor = kDefaultCutoffFactor) {
    std::vector<cplx> S(kMax + 1), out(kMax + 1);
    std::vector<cplx> z1, v1, z2;
    for (const auto& c : curves) {
        detail::check_clearance(c, zeta, cutoffFactor);
        detail::split(c, z1, v1, z2);
        detail::accumulate(z1, v1, z2, c.period, c.orientation, zeta, S, &out);
    }
    return out;
}

/// Power sums evaluated anywhere off the curves: each curve is resampled
/// finely enough for the evaluation point's distance, so accuracy holds
/// arbitrarily close to the boundary up to the finest level.
class CauchyEvaluator {
public:
    struct Result {
        std::vector<cplx> S;
        std::vector<cplx> dS;
    };

    explicit CauchyEvaluator(std::span<const ParamCurve> curves, int maxN = 1 << 16) {
        for (const auto& c : curves) {
            Entry e;
            e.period = c.period;
            e.orientation = c.orientation;
            e.base = project_z1(c);
            for (const auto& v : c.velocity) e.maxSpeed = std::max(e.maxSpeed, std::abs(v.z1));
            for (int n = c.size(); n <= std::max(maxN, c.size()); n *= 2) {
                const ParamCurve r = n == c.size() ? c : resample(c, n);
                Level lv;
                detail::split(r, lv.z1, lv.v1, lv.z2);
                e.levels.push_back(std::move(lv));
            }
            entries_.push_back(std::move(e));
        }
    }

    bool empty() const { return entries_.empty(); }

    Result operator()(cplx zeta, int kMax, bool withDerivatives) const {
        Result r;
        r.S.assign(kMax + 1, cplx{});
        if (withDerivatives) r.dS.assign(kMax + 1, cplx{});
        for (const auto& e : entries_) {
            const Level& lv = e.levels[pick(e, zeta)];
            detail::accumulate(lv.z1, lv.v1, lv.z2, e.period, e.orientation, zeta, r.S,
                               withDerivatives ? &r.dS : nullptr);
        }
        return r;
    }

private:
    struct Level {
        std::vector<cplx> z1, v1, z2;
    };
    struct Entry {
        double period = two_pi;
        int orientation = 1;
        double maxSpeed = 0.0;
        PlanarCurve base;
        std::vector<Level> levels;
    };

    static size_t pick(const Entry& e, cplx zeta) {
        const double d = e.base.distance(zeta);
        if (!(d > 0)) fail(ErrorKind::NearBoundary, "evaluation point on the curve");
        // trapezoid error ~ exp(-N d / (maxSpeed * period / 2 pi))
        const double need = 36.0 * e.maxSpeed * e.period / (two_pi * d);
        size_t l = 0;
        while (l + 1 < e.levels.size() && static_cast<double>(e.levels[l].z1.size()) < need) ++l;
        return l;
    }

    std::vector<Entry> entries_;
};

/// S_k on every non-boundary grid point of a slice.
struct MomentTable {
    std::shared_ptr<const ComponentMap> map;
    int kMax = 0;
    int quadratureN = 0;
    std::vector<std::vector<cplx>> values;  // per grid index, empty on BOUNDARY

    bool empty() const { return !map; }
};

inline MomentTable build_moment_table(std::span<const ParamCurve> curves, std::shared_ptr<const ComponentMap> map,
                                      int kMax) {
    MomentTable t;
    if (curves.empty() || !map) return t;
    if (kMax < map->max_winding()) fail(ErrorKind::InvalidSpec, "kMax below the maximal winding");
    t.map = map;
    t.kMax = kMax;
    t.quadratureN = curves.front().size();
    const int n = map->grid.count();
    t.values.resize(n);
    parallel_for(n, [&](int idx) {
        if (map->label[idx] == ComponentMap::BOUNDARY) return;
        t.values[idx] = power_sums(curves, kMax, map->grid.point(idx), -1.0);
    });
    for (int idx = 0; idx < n; ++idx) {
        if (t.values[idx].empty()) continue;
        const double w = map->winding[map->label[idx]];
        if (std::abs(t.values[idx][0] - w) >= 1e-6)
            fail(ErrorKind::QuadratureFailure, "S0 disagrees with the winding number");
    }
    return t;
}

/// Max |S_k|, 1 <= k <= kMax, over the unbounded component.
inline double moment_residual(const MomentTable& t) {
    double r = 0.0;
    if (t.empty()) return r;
    for (size_t idx = 0; idx < t.values.size(); ++idx) {
        if (t.map->label[idx] != 0 || t.values[idx].empty()) continue;
        for (int k = 1; k <= t.kMax; ++k) r = std::max(r, std::abs(t.values[idx][k]));
    }
    return r;
}

/// h1 dz1 + h2 dz2 with polynomial coefficients.
struct HolomorphicTestForm {
    BiPolyT h1;
    BiPolyT h2;

    /// Coefficient of dz1 ^ dz2 in dh at parameter t.
    cplx dh(const C2& z, double t) const { return h2.at(t).d_z1(z) - h1.at(t).d_z2(z); }
};

/// All monomial forms z1^a z2^b dz_i with a + b <= maxDegree.
inline std::vector<HolomorphicTestForm> standard_test_forms(int maxDegree) {
    std::vector<HolomorphicTestForm> out;
    for (int deg = 0; deg <= maxDegree; ++deg)
        for (int a = deg; a >= 0; --a)
            for (int which = 1; which <= 2; ++which) {
                HolomorphicTestForm f;
                const BiPolyT m(BiPoly::monomial(a, deg - a));
                (which == 1 ? f.h1 : f.h2) = m;
                out.push_back(f);
            }
    return out;
}

/// P_t(theta) for n = 1.
inline double poincare_form(double theta, double t) {
    if (theta == t) fail(ErrorKind::SingularPoint, "Poincare form is singular at theta = t");
    return theta > t ? 0.5 : -0.5;
}

/// Contour integral of h over the curves of one slice.
inline cplx slice_integral(std::span<const ParamCurve> curves, const HolomorphicTestForm& h, double t) {
    const BiPoly h1 = h.h1.at(t), h2 = h.h2.at(t);
    cplx total{};
    for (const auto& c : curves) {
        cplx s{};
        for (int j = 0; j < c.size(); ++j)
            s += h1(c.nodes[j]) * c.velocity[j].z1 + h2(c.nodes[j]) * c.velocity[j].z2;
        total += s * (c.period / c.size()) * static_cast<double>(c.orientation);
    }
    return total;
}

inline cplx family_moment_direct(const CurveFamily& fam, const HolomorphicTestForm& h, int tIndex) {
    if (tIndex < 0 || tIndex >= fam.size()) fail(ErrorKind::OutOfRange, "t index outside the grid");
    if (!fam.transverse[tIndex]) fail(ErrorKind::UseAlternative, "slice is not transverse");
    return slice_integral(fam.slices[tIndex], h, fam.tGrid[tIndex]);
}

namespace detail {

// Integral over theta of dh(z) (z1_theta z2_t - z1_t z2_theta).
inline cplx theta_strip(const CurveSpec& spec, double tp, const HolomorphicTestForm& h, double t, int n) {
    const BiPoly h1 = h.h1.at(t), h2 = h.h2.at(t);
    const double period = spec.period();
    cplx s{};
    for (int j = 0; j < n; ++j) {
        const double th = period * j / n;
        const C2 z = spec.eval(th, tp), zth = spec.d_theta(th, tp), zt = spec.d_t(th, tp);
        s += (h2.d_z1(z) - h1.d_z2(z)) * (zth.z1 * zt.z2 - zt.z1 * zth.z2);
    }
    return s * (period / n) * static_cast<double>(spec.orientation);
}

}  // namespace detail

/// The slice integral at t rewritten as a surface integral of dh against the
/// Poincare form over the whole family, oriented by dtheta ^ dt'.
inline cplx family_moment_poincare(const CurveFamily& fam, const HolomorphicTestForm& h, double t) {
    if (fam.tGrid.empty() || t < fam.tGrid.front() || t > fam.tGrid.back())
        fail(ErrorKind::OutOfRange, "t outside the family's parameter range");
    const int n = fam.quadratureN;
    cplx total{};
    if (!fam.templates.empty()) {
        for (const auto& tpl : fam.templates) {
            const double a = std::max(tpl.tmin, fam.tGrid.front());
            const double b = std::min(tpl.tmax, fam.tGrid.back());
            if (!(b > a)) continue;
            auto piece = [&](double lo, double hi, double sign) {
                if (!(hi > lo)) return;
                for (const auto& q : gauss_legendre<30>(lo, hi))
                    total += sign * 0.5 * q.w * detail::theta_strip(tpl.spec, q.x, h, t, n);
            };
            piece(a, std::min(t, b), -1.0);
            piece(std::max(t, a), b, 1.0);
        }
        return total;
    }

    // Per-slice data: midpoint rule in t' with finite-difference t-derivatives.
    for (int s = 0; s + 1 < fam.size(); ++s) {
        const auto& A = fam.slices[s];
        const auto& B = fam.slices[s + 1];
        if (A.empty() && B.empty()) continue;
        if (A.size() != B.size())
            fail(ErrorKind::QuadratureFailure, "adjacent slices differ in curve count; provide a template family");
        const double t0 = fam.tGrid[s], t1 = fam.tGrid[s + 1], dt = t1 - t0;
        const double weight = t <= t0 ? 0.5 * dt : (t >= t1 ? -0.5 * dt : 0.5 * ((t1 - t) - (t - t0)));
        const BiPoly h1 = h.h1.at(t), h2 = h.h2.at(t);
        for (size_t c = 0; c < A.size(); ++c) {
            const auto& ca = A[c];
            const auto& cb = B[c];
            if (ca.size() != cb.size() || ca.orientation != cb.orientation)
                fail(ErrorKind::QuadratureFailure, "adjacent slices are not sampled compatibly");
            cplx strip{};
            for (int j = 0; j < ca.size(); ++j) {
                const C2 z = (ca.nodes[j] + cb.nodes[j]) * 0.5;
                const C2 zth = (ca.velocity[j] + cb.velocity[j]) * 0.5;
                const C2 zt = (cb.nodes[j] - ca.nodes[j]) * (1.0 / dt);
                strip += (h2.d_z1(z) - h1.d_z2(z)) * (zth.z1 * zt.z2 - zt.z1 * zth.z2);
            }
            total += weight * strip * (ca.period / ca.size()) * static_cast<double>(ca.orientation);
        }
    }
    return total;
}

}  // namespace plateau
