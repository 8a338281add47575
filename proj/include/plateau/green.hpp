#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <queue>
#include <span>
#include <unordered_map>
#include <vector>

#include "plateau/core.hpp"
#include "plateau/fourier.hpp"
#include "plateau/geometry.hpp"
#include "plateau/parallel.hpp"
#include "plateau/polynomial.hpp"
#include "plateau/roots.hpp"

namespace plateau {

/// F(t; z1, z2) with polynomial t-dependence.
using DefiningFunction = BiPolyT;

inline std::pair<cplx, cplx> hefer(const DefiningFunction& F, double t, const C2& zp, const C2& z) {
    return F.at(t).hefer(zp, z);
}

struct OmegaForm {
    int chart = 1;
    cplx coefficient{};
};

inline OmegaForm omega_form(const BiPoly& F, const C2& z) {
    const cplx p1 = F.d_z1(z), p2 = F.d_z2(z);
    if (std::abs(p1) < 1e-10 && std::abs(p2) < 1e-10)
        fail(ErrorKind::SingularPointOfCurve, "both partial derivatives vanish");
    if (std::abs(p2) >= std::abs(p1)) return {1, -1.0 / p2};
    return {2, 1.0 / p1};
}

inline OmegaForm omega_form(const DefiningFunction& F, double t, const C2& z) { return omega_form(F.at(t), z); }

inline cplx kernel_k(const BiPoly& F, const C2& zp, const C2& z) {
    const C2 d = zp - z;
    const double n2 = norm2(d);
    if (n2 == 0.0) fail(ErrorKind::SingularPoint, "kernel evaluated on the diagonal");
    const auto [q1, q2] = F.hefer(zp, z);
    return (std::conj(d.z1) * q2 - std::conj(d.z2) * q1) / n2;
}

inline cplx kernel_k(const DefiningFunction& F, double t, const C2& zp, const C2& z) {
    return kernel_k(F.at(t), zp, z);
}

/// dz1-coefficient of omega: -1/F_z2. Valid wherever F_z2 != 0.
inline cplx omega_dz1(const BiPoly& F, const C2& z) { return -1.0 / F.d_z2(z); }

/// Area of the axis-aligned rectangle [x0,x1]x[y0,y1] inside the disk |p| <= R.
inline double rect_disk_area(double x0, double x1, double y0, double y1, double R) {
    auto S = [R](double x) { return 0.5 * (x * std::sqrt(std::max(R * R - x * x, 0.0)) + R * R * std::asin(x / R)); };
    auto quad = [&](double X, double Y) {
        // signed area of the disk inside [0,X]x[0,Y]
        const double sx = X < 0 ? -1.0 : 1.0, sy = Y < 0 ? -1.0 : 1.0;
        X = std::min(std::abs(X), R);
        Y = std::min(std::abs(Y), R);
        const double xs = std::min(std::sqrt(std::max(R * R - Y * Y, 0.0)), X);
        return sx * sy * (Y * xs + S(X) - S(xs));
    };
    return quad(x1, y1) - quad(x0, y1) - quad(x1, y0) + quad(x0, y0);
}

/// Roots in z2 of F(z1, .), any leading-coefficient degeneracy dropped.
inline std::vector<cplx> z2_roots(const BiPoly& F, cplx z1) {
    auto b = F.in_z2(z1);
    double scale = 0.0;
    for (auto v : b) scale = std::max(scale, std::abs(v));
    while (b.size() > 1 && std::abs(b.back()) <= 1e-12 * scale) b.pop_back();
    const int d = static_cast<int>(b.size()) - 1;
    if (d < 1) return {};
    MonicPolynomial P;
    for (int k = 1; k <= d; ++k) P.e.push_back(((k % 2) ? -1.0 : 1.0) * b[d - k] / b[d]);
    return fiber_roots(P);
}

struct GreenNode {
    C2 z;
    int i = 0;
    int j = 0;
    int sheet = 0;
    double area = 0.0;  // chart area of the cell inside the domain
    cplx omega{};       // dz1-coefficient of omega
    int chart = 1;
    bool cut = false;       // cell crosses the domain boundary
    bool singular = false;  // F_z2 too small for the z1 chart
};

/// Lattice discretization of the part of {F = 0} lying over a disk of the
/// z1-plane: nodes at center + h (i, j), one per sheet.
struct CurveDiscretization {
    BiPoly F;
    double t = 0.0;
    cplx center{};
    double radius = 1.0;
    double h = 0.1;
    int sheets = 1;
    std::vector<GreenNode> nodes;

    int find(int i, int j, int sheet) const {
        const auto it = index_.find(key(i, j, sheet));
        return it == index_.end() ? -1 : it->second;
    }

    /// Node nearest to z (same sheet by z2 proximity).
    int nearest(const C2& z) const {
        const cplx u = (z.z1 - center) / h;
        const int i = static_cast<int>(std::lround(u.real())), j = static_cast<int>(std::lround(u.imag()));
        int best = -1;
        double bd = std::numeric_limits<double>::infinity();
        for (int s = 0; s < sheets; ++s) {
            const int id = find(i, j, s);
            if (id >= 0 && abs(nodes[id].z - z) < bd) {
                bd = abs(nodes[id].z - z);
                best = id;
            }
        }
        return best;
    }

    int regular_count() const {
        int n = 0;
        for (const auto& nd : nodes) n += !nd.singular;
        return n;
    }

    void insert(GreenNode n) {
        index_[key(n.i, n.j, n.sheet)] = static_cast<int>(nodes.size());
        nodes.push_back(n);
    }

private:
    static std::int64_t key(int i, int j, int s) {
        return (static_cast<std::int64_t>(i + (1 << 20)) << 40) | (static_cast<std::int64_t>(j + (1 << 20)) << 16) | s;
    }
    std::unordered_map<std::int64_t, int> index_;
};

inline CurveDiscretization discretize_curve(const BiPoly& F, double t, cplx center, double radius, double h,
                                            double singularTol = 1e-8) {
    if (!(h > 0) || !(radius > 0)) fail(ErrorKind::InvalidSpec, "mesh size and radius must be positive");
    CurveDiscretization d;
    d.F = F;
    d.t = t;
    d.center = center;
    d.radius = radius;
    d.h = h;
    const int m = static_cast<int>(std::ceil(radius / h + 0.5));

    // fiber roots at every lattice point, matched breadth-first from the centre
    struct Cell {
        int i, j;
        double area;
        std::vector<cplx> roots;
    };
    std::unordered_map<std::int64_t, int> cellIndex;
    std::vector<Cell> cells;
    auto ck = [](int i, int j) { return (static_cast<std::int64_t>(i) << 32) ^ static_cast<std::uint32_t>(j); };
    for (int j = -m; j <= m; ++j)
        for (int i = -m; i <= m; ++i) {
            const double a = rect_disk_area((i - 0.5) * h, (i + 0.5) * h, (j - 0.5) * h, (j + 0.5) * h, radius);
            if (a <= 1e-14 * h * h) continue;
            cellIndex[ck(i, j)] = static_cast<int>(cells.size());
            cells.push_back({i, j, a, z2_roots(F, center + h * cplx(i, j))});
        }
    if (cells.empty()) return d;
    std::vector<char> seen(cells.size(), 0);
    std::queue<int> q;
    const int start = cellIndex.count(ck(0, 0)) ? cellIndex[ck(0, 0)] : 0;
    q.push(start);
    seen[start] = 1;
    while (!q.empty()) {
        const int c = q.front();
        q.pop();
        const int nb[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (const auto& o : nb) {
            const auto it = cellIndex.find(ck(cells[c].i + o[0], cells[c].j + o[1]));
            if (it == cellIndex.end() || seen[it->second]) continue;
            auto& to = cells[it->second].roots;
            const auto& from = cells[c].roots;
            if (to.size() == from.size()) {
                std::vector<cplx> ordered;
                std::vector<char> used(to.size(), 0);
                for (auto w : from) {
                    size_t best = 0;
                    double bd = std::numeric_limits<double>::infinity();
                    for (size_t b = 0; b < to.size(); ++b)
                        if (!used[b] && std::abs(to[b] - w) < bd) {
                            bd = std::abs(to[b] - w);
                            best = b;
                        }
                    used[best] = 1;
                    ordered.push_back(to[best]);
                }
                to = ordered;
            }
            seen[it->second] = 1;
            q.push(it->second);
        }
    }
    for (const auto& c : cells) {
        d.sheets = std::max(d.sheets, static_cast<int>(c.roots.size()));
        for (size_t s = 0; s < c.roots.size(); ++s) {
            GreenNode n;
            n.z = {center + h * cplx(c.i, c.j), c.roots[s]};
            n.i = c.i;
            n.j = c.j;
            n.sheet = static_cast<int>(s);
            n.area = c.area;
            n.cut = c.area < h * h * (1 - 1e-12);
            const cplx p1 = F.d_z1(n.z), p2 = F.d_z2(n.z);
            n.singular = std::abs(p2) < singularTol * std::max(1.0, std::abs(p1));
            n.chart = std::abs(p2) >= std::abs(p1) ? 1 : 2;
            n.omega = n.singular ? cplx{} : -1.0 / p2;
            d.insert(n);
        }
    }
    return d;
}

/// Mesh size giving roughly `target` nodes per sheet over the disk.
inline double mesh_for_nodes(double radius, int target) { return radius * std::sqrt(pi / target); }

inline CurveDiscretization discretize_curve(const DefiningFunction& F, double t, cplx center, double radius,
                                            int targetNodes) {
    return discretize_curve(F.at(t), t, center, radius, mesh_for_nodes(radius, targetNodes));
}

namespace detail {

// Central-difference Wirtinger derivatives of a node function at node id.
// Returns false when a neighbour is missing.
inline bool wirtinger(const CurveDiscretization& d, int id, const std::function<cplx(int)>& f, cplx& dz,
                      cplx& dzbar) {
    const auto& n = d.nodes[id];
    const int e = d.find(n.i + 1, n.j, n.sheet), w = d.find(n.i - 1, n.j, n.sheet);
    const int no = d.find(n.i, n.j + 1, n.sheet), so = d.find(n.i, n.j - 1, n.sheet);
    if (e < 0 || w < 0 || no < 0 || so < 0) return false;
    const cplx fx = (f(e) - f(w)) / (2 * d.h), fy = (f(no) - f(so)) / (2 * d.h);
    dz = 0.5 * (fx - I * fy);
    dzbar = 0.5 * (fx + I * fy);
    return true;
}

inline bool adjacent(const GreenNode& a, const GreenNode& b) {
    return a.sheet == b.sheet && std::abs(a.i - b.i) <= 1 && std::abs(a.j - b.j) <= 1;
}

}  // namespace detail

struct DbarResult {
    std::vector<cplx> values;
    std::vector<bool> flagged;
};

/// Solves dbar u = phi for a (0,1)-form phi = f dz1bar sampled at the nodes:
/// u(z) = (1/pi) sum k(z',z) omega(z') f(z') dA(z') with the self cell
/// replaced by its first-order local expansion.
inline DbarResult dbar_solve(const CurveDiscretization& d, std::span<const cplx> f) {
    const int n = static_cast<int>(d.nodes.size());
    if (static_cast<int>(f.size()) != n) fail(ErrorKind::InvalidSpec, "phi must be sampled on every node");
    DbarResult r;
    r.values.assign(n, cplx{});
    r.flagged.assign(n, false);
    std::vector<int> support;
    for (int k = 0; k < n; ++k)
        if (f[k] != cplx{} && !d.nodes[k].singular) support.push_back(k);
    parallel_for(n, [&](int id) {
        const auto& z = d.nodes[id];
        if (z.singular) {
            r.flagged[id] = true;
            return;
        }
        cplx s{};
        for (int k : support) {
            if (k == id) continue;
            const auto& zp = d.nodes[k];
            s += kernel_k(d.F, zp.z, z.z) * zp.omega * f[k] * zp.area;
        }
        // self cell: G(z') = Q2(z',z) omega(z') f(z') is smooth at z' = z
        auto G = [&](int k) {
            const auto& zp = d.nodes[k];
            return kernel_k(d.F, zp.z, z.z) * (zp.z.z1 - z.z.z1) * zp.omega * f[k];
        };
        cplx gz, gzb;
        if (f[id] != cplx{} || !support.empty()) {
            if (detail::wirtinger(d, id, G, gz, gzb)) s += d.h * d.h * gz;
        }
        r.values[id] = s / pi;
    });
    return r;
}

/// Closed-form dz1-coefficient of the holomorphic derivative of g_{z*} at z.
inline cplx green_dz(const BiPoly& F, const C2& zstar, const C2& z) {
    return kernel_k(F, zstar, z) * omega_dz1(F, z) / two_pi;
}

/// g_{z*} at the chosen target nodes (complex: the real part carries the
/// logarithmic pole, the imaginary part is harmonic) of one discretization level,
/// (1/4 pi^2) sum conj(k(z',z)) k(z*,z') i omega ^ conj(omega), with the two
/// singular cells replaced by their local expansions.
inline std::vector<cplx> green_field(const CurveDiscretization& d, int zstar, std::span<const int> targets) {
    const int n = static_cast<int>(d.nodes.size());
    const auto& zs = d.nodes[zstar];
    if (zs.singular) fail(ErrorKind::SingularPoint, "pole at a singular node");
    std::vector<cplx> ks(n);
    std::vector<double> mu(n);
    for (int k = 0; k < n; ++k) {
        const auto& zp = d.nodes[k];
        if (k == zstar || zp.singular) continue;
        ks[k] = kernel_k(d.F, zs.z, zp.z);
        mu[k] = 2.0 * std::norm(zp.omega) * zp.area / (4 * pi * pi);
    }
    std::vector<cplx> out(targets.size());
    parallel_for(static_cast<int>(targets.size()), [&](int q) {
        const int id = targets[q];
        if (id == zstar) fail(ErrorKind::SingularPoint, "g evaluated at its pole");
        const auto& z = d.nodes[id];
        if (z.singular) {
            out[q] = std::numeric_limits<double>::quiet_NaN();
            return;
        }
        cplx s{};
        for (int k = 0; k < n; ++k) {
            if (k == id || k == zstar || d.nodes[k].singular) continue;
            s += std::conj(kernel_k(d.F, d.nodes[k].z, z.z)) * ks[k] * mu[k];
        }
        if (!detail::adjacent(z, zs)) {
            // integrand per unit area as a function of z'
            auto integrand = [&](int k) {
                const auto& zp = d.nodes[k];
                return std::conj(kernel_k(d.F, zp.z, z.z)) * kernel_k(d.F, zs.z, zp.z) * 2.0 * std::norm(zp.omega) /
                       (4 * pi * pi);
            };
            cplx az, azb, bz, bzb;
            auto A = [&](int k) { return integrand(k) * std::conj(d.nodes[k].z.z1 - z.z.z1); };
            auto B = [&](int k) { return integrand(k) * (zs.z.z1 - d.nodes[k].z.z1); };
            if (detail::wirtinger(d, id, A, az, azb)) s += d.h * d.h * azb;
            if (detail::wirtinger(d, zstar, B, bz, bzb)) s -= d.h * d.h * bz;
        }
        out[q] = s;
    });
    return out;
}

inline cplx green_value(const CurveDiscretization& d, int zstar, int z) {
    const int t[1] = {z};
    return green_field(d, zstar, t)[0];
}

/// Two nested lattices (h and h/2) sharing the coarse nodes.
struct GreenContext {
    CurveDiscretization coarse;
    CurveDiscretization fine;
};

inline GreenContext make_green_context(const BiPoly& F, double t, cplx center, double radius, double h) {
    return {discretize_curve(F, t, center, radius, h), discretize_curve(F, t, center, radius, h / 2)};
}

struct GreenValue {
    cplx value{};
    cplx coarse{};
    cplx fine{};
};

/// Richardson-extrapolated g_{z*}(z); z* and z are coarse node ids.
inline GreenValue green_eval(const GreenContext& ctx, int zstar, int z) {
    if (zstar == z) fail(ErrorKind::SingularPoint, "z equals z*");
    const auto& a = ctx.coarse.nodes[zstar];
    const auto& b = ctx.coarse.nodes[z];
    const int fa = ctx.fine.find(2 * a.i, 2 * a.j, a.sheet), fb = ctx.fine.find(2 * b.i, 2 * b.j, b.sheet);
    if (fa < 0 || fb < 0) fail(ErrorKind::QuadratureFailure, "levels do not share the requested nodes");
    GreenValue v;
    v.coarse = green_value(ctx.coarse, zstar, z);
    v.fine = green_value(ctx.fine, fa, fb);
    v.value = (4.0 * v.fine - v.coarse) / 3.0;
    return v;
}

/// Mean of ln(x^2 + y^2) over the unit square centred at the origin.
inline constexpr double kLogSquareMean = pi / 2 - 3.0 - 0.69314718055994531;

/// Pairing sum g(z) (1/2) lap chi(z) dA with the pole cell replaced by its
/// cell average; `lapChi` is the chart Laplacian of the test function.
inline cplx green_pairing(const CurveDiscretization& d, int zstar, const std::function<double(cplx)>& lapChi) {
    std::vector<int> targets;
    std::vector<double> weights;
    for (int k = 0; k < static_cast<int>(d.nodes.size()); ++k) {
        if (k == zstar || d.nodes[k].singular) continue;
        const double l = lapChi(d.nodes[k].z.z1);
        if (l == 0.0) continue;
        targets.push_back(k);
        weights.push_back(0.5 * l * d.nodes[k].area);
    }
    const auto g = green_field(d, zstar, targets);
    cplx s{};
    for (size_t q = 0; q < targets.size(); ++q) s += g[q] * weights[q];

    const auto& zs = d.nodes[zstar];
    const double l0 = lapChi(zs.z.z1);
    if (l0 != 0.0) {
        // log singularity averaged over the cell plus the neighbours' regular part
        std::vector<int> nb;
        for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
            const int k = d.find(zs.i + di, zs.j + dj, zs.sheet);
            if (k >= 0) nb.push_back(k);
        }
        const auto gn = green_field(d, zstar, nb);
        cplx reg{};
        for (size_t q = 0; q < nb.size(); ++q)
            reg += gn[q] - std::log(std::norm(d.nodes[nb[q]].z.z1 - zs.z.z1)) / two_pi;
        reg /= static_cast<double>(std::max<size_t>(1, nb.size()));
        const cplx cell = (std::log(d.h * d.h) + kLogSquareMean) / two_pi + reg;
        s += cell * 0.5 * l0 * zs.area;
    }
    return s;
}

/// chi(z) = exp(-1/(1 - |z-c|^2/a^2)) (1 + p Re z), a smooth compactly
/// supported test function with closed-form derivatives.
struct BumpFunction {
    cplx c;
    double a = 0.5;
    double p = 0.0;

    double s(cplx z) const { return std::norm(z - c) / (a * a); }
    double phi(double s) const { return s < 1 ? std::exp(-1.0 / (1.0 - s)) : 0.0; }
    double dphi(double s) const { return s < 1 ? -phi(s) / ((1 - s) * (1 - s)) : 0.0; }
    double ddphi(double s) const {
        if (s >= 1) return 0.0;
        const double w = 1 - s;
        return phi(s) * (1.0 / (w * w * w * w) - 2.0 / (w * w * w));
    }

    double operator()(cplx z) const { return phi(s(z)) * (1 + p * z.real()); }

    cplx dbar(cplx z) const {
        const double q = 1 + p * z.real();
        const cplx u = z - c;
        const double fx = dphi(s(z)) * 2 * u.real() / (a * a) * q + phi(s(z)) * p;
        const double fy = dphi(s(z)) * 2 * u.imag() / (a * a) * q;
        return 0.5 * cplx(fx, fy);
    }

    double laplacian(cplx z) const {
        const double sv = s(z), r2 = std::norm(z - c);
        const double lapPhi = ddphi(sv) * 4 * r2 / (a * a * a * a) + dphi(sv) * 4 / (a * a);
        return lapPhi * (1 + p * z.real()) + 4 * dphi(sv) * (z - c).real() / (a * a) * p;
    }
};

/// Three bumps inside the unit disk around the origin, scaled by `scale`.
inline std::vector<BumpFunction> standard_bumps(cplx center = 0.0, double scale = 1.0) {
    return {{center + scale * cplx(0.1, 0.05), 0.5 * scale, 0.0},
            {center + scale * cplx(-0.2, 0.1), 0.4 * scale, 0.5 / scale},
            {center + scale * cplx(0.0, -0.15), 0.6 * scale, -0.3 / scale}};
}

/// Mehrstellen 9-point Laplacian of node values at node id; NaN when the
/// stencil leaves the mesh.
inline cplx laplacian9(const CurveDiscretization& d, const std::function<cplx(int)>& f, int id) {
    const auto& n = d.nodes[id];
    cplx edge{}, corner{};
    for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
        const int k = d.find(n.i + di, n.j + dj, n.sheet);
        if (k < 0 || d.nodes[k].singular) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
        edge += f(k);
    }
    for (auto [di, dj] : {std::pair{1, 1}, {-1, 1}, {1, -1}, {-1, -1}}) {
        const int k = d.find(n.i + di, n.j + dj, n.sheet);
        if (k < 0 || d.nodes[k].singular) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
        corner += f(k);
    }
    return (4.0 * edge + corner - 20.0 * f(id)) / (6.0 * d.h * d.h);
}

/// Boundary values u, normal derivative u' and the (1,0)-form
/// alpha = (1/2)(u' - i Tu)(nu* + i tau*) along a curve in the leaf.
struct CauchyDatum {
    ParamCurve curve;
    std::vector<double> u;
    std::vector<double> uPrime;
    std::vector<double> Tu;
    std::vector<C2> tau;
    std::vector<C2> nu;
    std::vector<cplx> alphaTau;  // alpha(tau)
    std::vector<cplx> alphaDz1;  // alpha as a multiple of dz1 on the leaf

    /// conj(alpha(gamma')) at node j, the integrand of the g alphabar term.
    cplx alpha_bar_dtheta(int j) const {
        return std::conj(alphaTau[j]) * abs(curve.velocity[j]);
    }
};

inline CauchyDatum cauchy_datum(const ParamCurve& curve, std::vector<double> u, std::vector<double> uPrime) {
    const int n = curve.size();
    if (static_cast<int>(u.size()) != n || static_cast<int>(uPrime.size()) != n)
        fail(ErrorKind::InvalidSpec, "boundary samples must match the curve nodes");
    CauchyDatum d;
    d.curve = curve;
    d.u = std::move(u);
    d.uPrime = std::move(uPrime);
    const auto du = spectral_derivative(d.u, curve.period);
    double vmax = 0.0;
    for (const auto& v : curve.velocity) vmax = std::max(vmax, abs(v));
    d.Tu.resize(n);
    d.tau.resize(n);
    d.nu.resize(n);
    d.alphaTau.resize(n);
    d.alphaDz1.resize(n);
    for (int j = 0; j < n; ++j) {
        const double speed = abs(curve.velocity[j]);
        if (!(speed > 1e-12 * std::max(1.0, vmax))) fail(ErrorKind::DegenerateParametrization, "vanishing tangent");
        d.tau[j] = curve.velocity[j] * (static_cast<double>(curve.orientation) / speed);
        d.nu[j] = {-I * d.tau[j].z1, -I * d.tau[j].z2};
        d.Tu[j] = du[j] / speed * curve.orientation;
        d.alphaTau[j] = 0.5 * (d.Tu[j] + I * d.uPrime[j]);
        d.alphaDz1[j] = d.alphaTau[j] / d.tau[j].z1;
    }
    return d;
}

/// Green-potential extension of a Cauchy datum, evaluated off the curve.
class ExtensionSolver {
public:
    ExtensionSolver(BiPoly F, const CauchyDatum& datum, int maxN = 1 << 15) : F_(std::move(F)) {
        const int n0 = datum.curve.size();
        for (int n = n0; n <= std::max(n0, maxN); n *= 2) {
            if (n == n0) {
                levels_.push_back(datum);
                continue;
            }
            const ParamCurve c = resample(datum.curve, n);
            auto up = [&](const std::vector<double>& v) {
                std::vector<cplx> z(v.begin(), v.end());
                auto r = trig_upsample(z, n);
                std::vector<double> out(n);
                for (int j = 0; j < n; ++j) out[j] = r[j].real();
                return out;
            };
            levels_.push_back(cauchy_datum(c, up(datum.u), up(datum.uPrime)));
        }
        for (const auto& v : datum.curve.velocity) maxSpeed_ = std::max(maxSpeed_, abs(v));
        period_ = datum.curve.period;
        for (const auto& z : datum.curve.nodes)
            if (std::abs(F_(z)) > 1e-6 * std::max(1.0, abs(z)))
                fail(ErrorKind::InvalidSpec, "defining function does not vanish on the boundary curve");
    }

    /// (1/i) times the boundary integral of u dg_z + g_z conj(alpha); the real
    /// part is the extension, the full complex value enters the moment test.
    cplx raw(const C2& z) const {
        const CauchyDatum& d = levels_[pick(z)];
        const int n = d.curve.size();
        const double dth = d.curve.period / n;
        std::vector<cplx> dg(n);
        std::vector<cplx> dgReal(n);
        for (int j = 0; j < n; ++j) {
            const C2& p = d.curve.nodes[j];
            const cplx form = kernel_k(F_, z, p) * omega_dz1(F_, p) / two_pi;
            dg[j] = form * d.curve.velocity[j].z1;
            dgReal[j] = 2.0 * dg[j].real();
        }
        // trace of g_z along the curve, up to a harmonic (constant) part
        const auto g = periodic_antiderivative(dgReal, d.curve.period);
        cplx s{};
        for (int j = 0; j < n; ++j) s += d.u[j] * dg[j] + g[j].real() * d.alpha_bar_dtheta(j);
        return s * dth * static_cast<double>(d.curve.orientation) / I;
    }

    double operator()(const C2& z) const { return raw(z).real(); }

    double distance(const C2& z) const {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& p : levels_.front().curve.nodes) m = std::min(m, abs(p - z));
        return m;
    }

private:
    size_t pick(const C2& z) const {
        const double d = std::max(distance(z), 1e-300);
        const double need = 36.0 * maxSpeed_ * period_ / (two_pi * d);
        size_t l = 0;
        while (l + 1 < levels_.size() && static_cast<double>(levels_[l].curve.size()) < need) ++l;
        return l;
    }

    BiPoly F_;
    std::vector<CauchyDatum> levels_;
    double maxSpeed_ = 0.0;
    double period_ = two_pi;
};

inline std::vector<double> harmonic_extend(const ExtensionSolver& ext, std::span<const C2> targets) {
    std::vector<double> out(targets.size());
    parallel_for(static_cast<int>(targets.size()), [&](int q) { out[q] = ext(targets[q]); });
    return out;
}

/// Largest |boundary integral of u dg_z + g_z conj(alpha)| over points outside
/// the filled region.
inline double green_moment_test(const ExtensionSolver& ext, std::span<const C2> exterior) {
    std::vector<double> r(exterior.size());
    parallel_for(static_cast<int>(exterior.size()), [&](int q) { r[q] = std::abs(ext.raw(exterior[q])); });
    double m = 0.0;
    for (double v : r) m = std::max(m, v);
    return m;
}

/// Extension guarded by the univaluedness test on exterior points.
inline std::vector<double> harmonic_extend(const ExtensionSolver& ext, std::span<const C2> targets,
                                           std::span<const C2> exterior, double tol) {
    const double r = green_moment_test(ext, exterior);
    if (r > tol) fail(ErrorKind::ObstructedExtension, "Green moment residual " + std::to_string(r));
    return harmonic_extend(ext, targets);
}

/// Lifts a point of the z1-plane to the sheet of {F = 0} through z2 near `guess`.
inline C2 lift(const BiPoly& F, cplx z1, cplx guess) {
    const auto roots = z2_roots(F, z1);
    if (roots.empty()) fail(ErrorKind::SingularPointOfCurve, "no fiber over the point");
    cplx best = roots[0];
    for (auto w : roots)
        if (std::abs(w - guess) < std::abs(best - guess)) best = w;
    return {z1, best};
}

struct JumpReport {
    double residual = 0.0;
    std::vector<double> theta;
    std::vector<double> uPlus;
    std::vector<double> uMinus;
};

/// u - (U+ - U-) at collocation points, U+- extrapolated linearly from two
/// approach distances along the chart normal.
inline JumpReport jump_check(const BiPoly& F, const ExtensionSolver& ext, const CauchyDatum& datum,
                             int points = 32, double d1 = 0.015) {
    JumpReport r;
    const int n = datum.curve.size();
    for (int q = 0; q < points; ++q) {
        const int j = (q * n) / points;
        const C2 p = datum.curve.nodes[j];
        const cplx v1 = datum.curve.velocity[j].z1 * static_cast<double>(datum.curve.orientation);
        const cplx outward = -I * v1 / std::abs(v1);
        auto U = [&](double s) { return ext(lift(F, p.z1 + s * outward, p.z2)); };
        const double plus = 2.0 * U(-d1) - U(-2 * d1);
        const double minus = 2.0 * U(d1) - U(2 * d1);
        r.theta.push_back(datum.curve.params[j]);
        r.uPlus.push_back(plus);
        r.uMinus.push_back(minus);
        r.residual = std::max(r.residual, std::abs(datum.u[j] - (plus - minus)));
    }
    return r;
}

}  // namespace plateau
