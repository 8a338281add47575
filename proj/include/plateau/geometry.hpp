#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <queue>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "plateau/core.hpp"
#include "plateau/fourier.hpp"

namespace plateau {

/// One Fourier-Laurent term c(t) e^{i f theta}; c is a polynomial in t.
struct FourierTerm {
    double freq = 0.0;
    std::vector<cplx> tPoly;

    cplx coeff(double t) const {
        cplx v{};
        for (size_t j = tPoly.size(); j-- > 0;) v = v * t + tPoly[j];
        return v;
    }
    cplx coeff_dt(double t) const {
        cplx v{};
        for (size_t j = tPoly.size(); j-- > 1;) v = v * t + tPoly[j] * static_cast<double>(j);
        return v;
    }
};

struct CoordSeries {
    std::vector<FourierTerm> terms;

    cplx eval(double theta, double t) const {
        cplx s{};
        for (const auto& term : terms) s += term.coeff(t) * std::polar(1.0, term.freq * theta);
        return s;
    }
    cplx d_theta(double theta, double t) const {
        cplx s{};
        for (const auto& term : terms)
            s += term.coeff(t) * cplx(0.0, term.freq) * std::polar(1.0, term.freq * theta);
        return s;
    }
    cplx d_t(double theta, double t) const {
        cplx s{};
        for (const auto& term : terms) s += term.coeff_dt(t) * std::polar(1.0, term.freq * theta);
        return s;
    }
    bool finite() const {
        for (const auto& term : terms) {
            if (!std::isfinite(term.freq)) return false;
            for (auto c : term.tPoly)
                if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
        }
        return true;
    }
};

/// Closed curve theta -> (z1, z2) over [0, 2 pi cover).
struct CurveSpec {
    int cover = 1;
    int orientation = 1;
    CoordSeries z1;
    CoordSeries z2;

    double period() const { return two_pi * cover; }
    C2 eval(double theta, double t) const { return {z1.eval(theta, t), z2.eval(theta, t)}; }
    C2 d_theta(double theta, double t) const { return {z1.d_theta(theta, t), z2.d_theta(theta, t)}; }
    C2 d_t(double theta, double t) const { return {z1.d_t(theta, t), z2.d_t(theta, t)}; }
};

/// A sampled closed oriented curve in C^2.
struct ParamCurve {
    std::vector<C2> nodes;
    std::vector<C2> velocity;  // d/dtheta at the nodes
    std::vector<double> params;
    double period = two_pi;
    bool closed = true;
    int orientation = 1;
    double t = 0.0;
    std::optional<CurveSpec> source;

    int size() const { return static_cast<int>(nodes.size()); }

    C2 eval(double theta) const {
        if (source) return source->eval(theta, t);
        ensure_interpolants();
        return {(*interp1_)(theta), (*interp2_)(theta)};
    }
    C2 d_theta(double theta) const {
        if (source) return source->d_theta(theta, t);
        ensure_interpolants();
        return {interp1_->derivative(theta), interp2_->derivative(theta)};
    }

    /// Arc length in C^2.
    double length() const {
        double s = 0.0;
        for (const auto& v : velocity) s += abs(v);
        return s * period / static_cast<double>(nodes.size());
    }

    double max_modulus() const {
        double a = 0.0;
        for (const auto& p : nodes) a = std::max(a, abs(p));
        return a;
    }

    void ensure_interpolants() const {
        if (!interp1_) {
            interp1_ = std::make_shared<const TrigInterpolant>(coord(1), period);
            interp2_ = std::make_shared<const TrigInterpolant>(coord(2), period);
        }
    }

private:
    // Built once by curve_from_samples; lazily otherwise.
    mutable std::shared_ptr<const TrigInterpolant> interp1_, interp2_;

    std::vector<cplx> coord(int which) const {
        std::vector<cplx> v(nodes.size());
        for (size_t i = 0; i < nodes.size(); ++i) v[i] = which == 1 ? nodes[i].z1 : nodes[i].z2;
        return v;
    }
};

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

inline ParamCurve sample_curve(const CurveSpec& spec, int n, double t = 0.0) {
    if (n < 16 || !is_power_of_two(n)) fail(ErrorKind::InvalidSpec, "node count must be a power of two >= 16");
    if (spec.cover < 1) fail(ErrorKind::InvalidSpec, "cover must be >= 1");
    if (spec.orientation != 1 && spec.orientation != -1) fail(ErrorKind::InvalidSpec, "orientation must be +1 or -1");
    if (!spec.z1.finite() || !spec.z2.finite()) fail(ErrorKind::InvalidSpec, "non-finite coefficient");
    for (const auto* s : {&spec.z1, &spec.z2})
        for (const auto& term : s->terms) {
            const double m = term.freq * spec.cover;
            if (std::abs(m - std::round(m)) > 1e-12)
                fail(ErrorKind::InvalidSpec, "degree " + std::to_string(term.freq) + " incompatible with cover");
        }

    ParamCurve c;
    c.period = spec.period();
    c.orientation = spec.orientation;
    c.t = t;
    c.source = spec;
    c.nodes.resize(n);
    c.velocity.resize(n);
    c.params.resize(n);
    for (int i = 0; i < n; ++i) {
        const double th = c.period * i / n;
        c.params[i] = th;
        c.nodes[i] = spec.eval(th, t);
        c.velocity[i] = spec.d_theta(th, t);
    }
    const C2 wrap = spec.eval(c.period, t);
    if (abs(wrap - c.nodes[0]) > 1e-12 * std::max(1.0, abs(c.nodes[0])))
        fail(ErrorKind::InvalidSpec, "parametrization is not periodic");
    for (const auto& p : c.nodes)
        if (!std::isfinite(norm2(p))) fail(ErrorKind::InvalidSpec, "non-finite sample");
    return c;
}

/// Curve from raw periodic samples; derivatives come from spectral
/// differentiation.
inline ParamCurve curve_from_samples(std::vector<C2> nodes, double period, int orientation = 1, double t = 0.0) {
    const int n = static_cast<int>(nodes.size());
    if (n < 16) fail(ErrorKind::InvalidSpec, "curve needs at least 16 nodes");
    ParamCurve c;
    c.period = period;
    c.orientation = orientation;
    c.t = t;
    c.nodes = std::move(nodes);
    c.params.resize(n);
    for (int i = 0; i < n; ++i) c.params[i] = period * i / n;
    std::vector<cplx> a(n), b(n);
    for (int i = 0; i < n; ++i) {
        a[i] = c.nodes[i].z1;
        b[i] = c.nodes[i].z2;
    }
    auto da = spectral_derivative(a, period);
    auto db = spectral_derivative(b, period);
    c.ensure_interpolants();
    c.velocity.resize(n);
    for (int i = 0; i < n; ++i) c.velocity[i] = {da[i], db[i]};
    return c;
}

/// Same curve at a different node count; exact when a source spec is held,
/// trigonometric interpolation otherwise.
inline ParamCurve resample(const ParamCurve& c, int n) {
    if (c.source) {
        auto r = sample_curve(*c.source, n, c.t);
        r.orientation = c.orientation;
        return r;
    }
    std::vector<cplx> a(c.size()), b(c.size());
    for (int i = 0; i < c.size(); ++i) {
        a[i] = c.nodes[i].z1;
        b[i] = c.nodes[i].z2;
    }
    auto ua = trig_upsample(a, n);
    auto ub = trig_upsample(b, n);
    std::vector<C2> nodes(n);
    for (int i = 0; i < n; ++i) nodes[i] = {ua[i], ub[i]};
    return curve_from_samples(std::move(nodes), c.period, c.orientation, c.t);
}

inline ParamCurve reversed(const ParamCurve& c) {
    ParamCurve r = c;
    r.orientation = -c.orientation;
    if (r.source) r.source->orientation = r.orientation;
    return r;
}

/// The z1-projection of a curve.
struct PlanarCurve {
    std::vector<cplx> nodes;
    std::vector<cplx> velocity;
    std::vector<double> params;
    double period = two_pi;
    int orientation = 1;

    int size() const { return static_cast<int>(nodes.size()); }

    double max_chord() const {
        double m = 0.0;
        for (int i = 0; i < size(); ++i) m = std::max(m, std::abs(nodes[(i + 1) % size()] - nodes[i]));
        return m;
    }

    double distance(cplx zeta) const {
        double d = std::numeric_limits<double>::infinity();
        for (int i = 0; i < size(); ++i) {
            const cplx a = nodes[i];
            const cplx b = nodes[(i + 1) % size()];
            const cplx ab = b - a;
            const double len2 = std::norm(ab);
            double s = len2 > 0 ? ((zeta - a) * std::conj(ab)).real() / len2 : 0.0;
            s = std::clamp(s, 0.0, 1.0);
            d = std::min(d, std::abs(zeta - (a + s * ab)));
        }
        return d;
    }
};

inline PlanarCurve project_z1(const ParamCurve& c) {
    if (!c.closed) fail(ErrorKind::InvalidSpec, "projection requires a closed curve");
    PlanarCurve p;
    p.period = c.period;
    p.orientation = c.orientation;
    p.params = c.params;
    p.nodes.resize(c.nodes.size());
    p.velocity.resize(c.nodes.size());
    for (size_t i = 0; i < c.nodes.size(); ++i) {
        p.nodes[i] = c.nodes[i].z1;
        p.velocity[i] = c.velocity[i].z1;
    }
    return p;
}

inline std::vector<PlanarCurve> project_z1(std::span<const ParamCurve> cs) {
    std::vector<PlanarCurve> r;
    r.reserve(cs.size());
    for (const auto& c : cs) r.push_back(project_z1(c));
    return r;
}

/// Multiple of the maximum chord below which a point counts as on the curve.
inline constexpr double kDefaultCutoffFactor = 5.0;

inline double dist_to_curve_cutoff(const PlanarCurve& p, double factor = kDefaultCutoffFactor) {
    return factor * p.max_chord();
}

struct WindingResult {
    int value = 0;
    double residual = 0.0;
    cplx raw{};
};

/// Trapezoidal index (1/2 pi i) sum of closed contours of dz/(z - zeta).
/// `cutoffFactor` <= 0 disables the near-boundary guard.
inline WindingResult winding_number(std::span<const PlanarCurve> curves, cplx zeta,
                                    double cutoffFactor = kDefaultCutoffFactor) {
    cplx total{};
    for (const auto& p : curves) {
        if (cutoffFactor > 0 && p.distance(zeta) <= dist_to_curve_cutoff(p, cutoffFactor))
            fail(ErrorKind::NearBoundary, "point within cutoff of the curve");
        cplx s{};
        for (int i = 0; i < p.size(); ++i) s += p.velocity[i] / (p.nodes[i] - zeta);
        total += s * (p.period / p.size()) * static_cast<double>(p.orientation);
    }
    total /= cplx(0.0, two_pi);
    WindingResult r;
    r.raw = total;
    r.value = static_cast<int>(std::lround(total.real()));
    r.residual = std::abs(total - cplx(r.value, 0.0));
    if (r.residual >= 1e-3) fail(ErrorKind::QuadratureFailure, "winding residual " + std::to_string(r.residual));
    return r;
}

inline WindingResult winding_number(const PlanarCurve& p, cplx zeta, double cutoffFactor = kDefaultCutoffFactor) {
    return winding_number(std::span<const PlanarCurve>(&p, 1), zeta, cutoffFactor);
}

/// Rectangular zeta-grid, inclusive of both ends.
struct GridSpec {
    double xmin = -2, xmax = 2, ymin = -2, ymax = 2;
    int nx = 64, ny = 64;

    double dx() const { return (xmax - xmin) / (nx - 1); }
    double dy() const { return (ymax - ymin) / (ny - 1); }
    int count() const { return nx * ny; }
    int index(int i, int j) const { return j * nx + i; }
    cplx point(int i, int j) const { return {xmin + i * dx(), ymin + j * dy()}; }
    cplx point(int idx) const { return point(idx % nx, idx / nx); }
    bool operator==(const GridSpec&) const = default;
};

/// Square grid around the projected curves with half their extent as margin.
inline GridSpec auto_grid(std::span<const PlanarCurve> curves, int nx = 64, int ny = 64, double margin = 0.5) {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& p : curves)
        for (auto z : p.nodes) {
            x0 = std::min(x0, z.real());
            x1 = std::max(x1, z.real());
            y0 = std::min(y0, z.imag());
            y1 = std::max(y1, z.imag());
        }
    GridSpec g;
    g.nx = nx;
    g.ny = ny;
    if (!std::isfinite(x0)) return g;
    const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
    const double h = std::max({0.5 * (x1 - x0), 0.5 * (y1 - y0), 1e-6}) * (1.0 + margin);
    g.xmin = cx - h;
    g.xmax = cx + h;
    g.ymin = cy - h;
    g.ymax = cy + h;
    return g;
}

/// Components of the complement of the projected curves on a grid.
struct ComponentMap {
    static constexpr int BOUNDARY = -1;

    GridSpec grid;
    std::vector<int> label;
    std::vector<int> winding;
    double cutoff = 0.0;
    double cutoffFactor = kDefaultCutoffFactor;

    int components() const { return static_cast<int>(winding.size()); }
    int max_winding() const {
        int m = 0;
        for (int w : winding) m = std::max(m, w);
        return m;
    }
    int min_winding() const {
        int m = 0;
        for (int w : winding) m = std::min(m, w);
        return m;
    }
    int winding_at(int idx) const { return label[idx] == BOUNDARY ? 0 : winding[label[idx]]; }
};

inline ComponentMap classify_components(std::span<const PlanarCurve> curves, const GridSpec& grid,
                                        double cutoffFactor = kDefaultCutoffFactor) {
    for (const auto& p : curves)
        if (p.size() < 3) fail(ErrorKind::InvalidSpec, "degenerate planar curve");
    ComponentMap m;
    m.grid = grid;
    m.cutoffFactor = cutoffFactor;
    const int n = grid.count();
    m.label.assign(n, -2);
    std::vector<double> cut(curves.size());
    for (size_t c = 0; c < curves.size(); ++c) {
        cut[c] = dist_to_curve_cutoff(curves[c], cutoffFactor);
        m.cutoff = std::max(m.cutoff, cut[c]);
    }
    for (int idx = 0; idx < n; ++idx) {
        const cplx z = grid.point(idx);
        for (size_t c = 0; c < curves.size(); ++c)
            if (curves[c].distance(z) <= cut[c]) {
                m.label[idx] = ComponentMap::BOUNDARY;
                break;
            }
    }

    std::vector<std::vector<int>> members;
    auto fill = [&](int seed, int id) {
        std::vector<int> comp;
        std::queue<int> q;
        q.push(seed);
        m.label[seed] = id;
        while (!q.empty()) {
            const int k = q.front();
            q.pop();
            comp.push_back(k);
            const int i = k % grid.nx, j = k / grid.nx;
            const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
            for (const auto& ij : nb) {
                if (ij[0] < 0 || ij[1] < 0 || ij[0] >= grid.nx || ij[1] >= grid.ny) continue;
                const int kk = grid.index(ij[0], ij[1]);
                if (m.label[kk] != -2) continue;
                m.label[kk] = id;
                q.push(kk);
            }
        }
        members.push_back(std::move(comp));
    };

    if (m.label[0] == ComponentMap::BOUNDARY)
        fail(ErrorKind::InvalidSpec, "grid corner lies on the curve; enlarge the grid");
    fill(0, 0);
    for (int idx = 1; idx < n; ++idx)
        if (m.label[idx] == -2) fill(idx, static_cast<int>(members.size()));

    std::mt19937_64 rng(0x5eed);
    m.winding.resize(members.size());
    for (size_t id = 0; id < members.size(); ++id) {
        const auto& comp = members[id];
        const int w = winding_number(curves, grid.point(comp.front()), -1.0).value;
        std::uniform_int_distribution<size_t> pick(0, comp.size() - 1);
        for (int r = 0; r < 3 && comp.size() > 1; ++r) {
            const int other = winding_number(curves, grid.point(comp[pick(rng)]), -1.0).value;
            if (other != w)
                fail(ErrorKind::ResolutionTooCoarse,
                     "winding varies inside component " + std::to_string(id) + "; refine the grid");
        }
        m.winding[id] = w;
    }
    if (!m.winding.empty() && m.winding[0] != 0)
        fail(ErrorKind::InvalidSpec, "grid does not enclose the curves");
    return m;
}

}  // namespace plateau

namespace plateau {

/// A t-polynomial curve spec valid over a closed t-interval.
struct CurveTemplate {
    CurveSpec spec;
    double tmin = -std::numeric_limits<double>::infinity();
    double tmax = std::numeric_limits<double>::infinity();

    bool covers(double t) const { return t >= tmin && t <= tmax; }
};

/// One-parameter family of closed curves sampled on a t-grid.
struct CurveFamily {
    std::vector<double> tGrid;
    std::vector<std::vector<ParamCurve>> slices;
    std::vector<bool> transverse;
    std::vector<CurveTemplate> templates;
    int quadratureN = 256;

    int size() const { return static_cast<int>(tGrid.size()); }

    void validate() const {
        if (slices.size() != tGrid.size() || transverse.size() != tGrid.size())
            fail(ErrorKind::InvalidSpec, "family arrays are not aligned with the t-grid");
        for (size_t i = 1; i < tGrid.size(); ++i)
            if (!(tGrid[i] > tGrid[i - 1])) fail(ErrorKind::InvalidSpec, "t-grid must be strictly increasing");
        for (const auto& s : slices)
            for (const auto& c : s)
                if (!c.closed) fail(ErrorKind::InvalidSpec, "family curves must be closed");
    }
};

}  // namespace plateau
