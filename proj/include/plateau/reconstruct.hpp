#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "plateau/core.hpp"
#include "plateau/geometry.hpp"
#include "plateau/moments.hpp"
#include "plateau/parallel.hpp"
#include "plateau/quadrature.hpp"
#include "plateau/roots.hpp"

namespace plateau {

/// Weierstrass polynomial of one bounded component, sampled on its grid points.
struct FiberPolynomial {
    int componentId = 0;
    int degree = 0;
    std::vector<int> points;  // grid indices
    std::vector<MonicPolynomial> coeffs;
    std::vector<cplx> disc;
};

/// Roots and root derivatives of the filling over one zeta.
struct FiberSample {
    std::vector<cplx> roots;
    std::vector<cplx> derivs;
};

using FiberField = std::function<FiberSample(cplx)>;

/// Fiber roots at arbitrary zeta from adaptively refined power sums.
inline FiberField make_fiber_field(std::shared_ptr<const CauchyEvaluator> eval, int kMax) {
    return [eval, kMax](cplx zeta) {
        const auto r = (*eval)(zeta, kMax, true);
        const double s0 = r.S[0].real();
        const int d = static_cast<int>(std::lround(s0));
        if (std::abs(r.S[0] - cplx(d, 0.0)) > 1e-6) fail(ErrorKind::QuadratureFailure, "S0 is not an integer");
        if (d < 0) fail(ErrorKind::NonPositiveChain, "negative winding");
        FiberSample f;
        if (d == 0) return f;
        if (d > kMax) fail(ErrorKind::InvalidSpec, "winding exceeds kMax");
        const auto P = newton_to_monic(std::span<const cplx>(r.S).subspan(1, d), d);
        const auto de = newton_derivative(P, std::span<const cplx>(r.dS).subspan(1, d));
        f.roots = fiber_roots(P);
        for (auto w : f.roots) {
            // dP/dzeta at fixed w from the e_k derivatives
            // the coefficient of w^{d-k} is (-1)^k e_k
            cplx pz{};
            for (int k = 1; k <= d; ++k) pz += ((k % 2) ? -1.0 : 1.0) * de[k - 1] * std::pow(w, d - k);
            f.derivs.push_back(-pz / P.derivative(w));
        }
        return f;
    };
}

struct RegionNode {
    cplx zeta;
    double weight;
};

/// Polar quadrature over {zeta : winding != 0}: trapezoid in the angle,
/// Gauss-Legendre on every radial interval cut out by the projected curves.
/// The rays start at `pole` when given (an integrable singularity of the
/// integrand is then absorbed by the polar measure), else at the centroid.
inline std::vector<RegionNode> region_quadrature(std::span<const ParamCurve> curves, const ComponentMap& map,
                                                 const CauchyEvaluator& eval, int rays = 256,
                                                 std::optional<cplx> pole = std::nullopt) {
    std::vector<RegionNode> nodes;
    if (curves.empty()) return nodes;
    cplx center{};
    double count = 0;
    for (int idx = 0; idx < map.grid.count(); ++idx)
        if (map.winding_at(idx) != 0) {
            center += map.grid.point(idx);
            count += 1;
        }
    if (count == 0) return nodes;
    center = pole ? *pole : center / count;

    struct Dense {
        const ParamCurve* curve;
        std::vector<cplx> z1;
        std::vector<double> params;
    };
    std::vector<Dense> dense;
    for (const auto& c : curves) {
        const ParamCurve r = resample(c, std::max(1024, c.size()));
        Dense d{&c, {}, r.params};
        for (const auto& p : r.nodes) d.z1.push_back(p.z1);
        dense.push_back(std::move(d));
    }
    double scale = 0.0;
    for (const auto& d : dense)
        for (auto z : d.z1) scale = std::max(scale, std::abs(z - center));

    const auto gl = gauss_legendre<30>(0.0, 1.0);
    std::vector<std::vector<RegionNode>> perRay(rays);
    parallel_for(rays, [&](int m) {
        const double phi = two_pi * (m + 0.5) / rays;
        const cplx dir = std::polar(1.0, phi), rot = std::conj(dir);
        std::vector<double> hits;
        for (const auto& d : dense) {
            const int n = static_cast<int>(d.z1.size());
            const double period = d.curve->period;
            auto g = [&](double th) { return (rot * (d.curve->eval(th).z1 - center)).imag(); };
            for (int j = 0; j < n; ++j) {
                const cplx a = rot * (d.z1[j] - center), b = rot * (d.z1[(j + 1) % n] - center);
                if ((a.imag() > 0) == (b.imag() > 0)) continue;
                if (a.real() < 0 && b.real() < 0) continue;
                double lo = d.params[j], hi = j + 1 < n ? d.params[j + 1] : period;
                double glo = a.imag();
                for (int it = 0; it < 60 && hi - lo > 1e-15 * period; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double gm = g(mid);
                    if ((gm > 0) == (glo > 0)) {
                        lo = mid;
                        glo = gm;
                    } else {
                        hi = mid;
                    }
                }
                const double r = (rot * (d.curve->eval(0.5 * (lo + hi)).z1 - center)).real();
                if (r > 0) hits.push_back(r);
            }
        }
        std::sort(hits.begin(), hits.end());
        std::vector<double> cuts{0.0};
        for (double r : hits)
            if (r - cuts.back() > 1e-12 * scale) cuts.push_back(r);
        for (size_t s = 0; s + 1 < cuts.size(); ++s) {
            const double r0 = cuts[s], r1 = cuts[s + 1];
            const cplx mid = center + 0.5 * (r0 + r1) * dir;
            const double w = eval(mid, 0, false).S[0].real();
            if (std::lround(w) == 0) continue;
            for (const auto& q : gl) {
                const double r = r0 + (r1 - r0) * q.x;
                perRay[m].push_back({center + r * dir, q.w * (r1 - r0) * r * two_pi / rays});
            }
        }
    });
    for (auto& v : perRay) nodes.insert(nodes.end(), v.begin(), v.end());
    return nodes;
}

/// Real 1-form sum a_c dx_c over the real coordinates (x1, y1, x2, y2) of C^2
/// with polynomial coefficients.
struct RealOneForm {
    struct Term {
        std::array<int, 4> exp{};
        double coef = 1.0;
        int dir = 0;  // which dx_c
    };
    std::vector<Term> terms;
    std::string name;

    static std::array<double, 4> coords(const C2& z) { return {z.z1.real(), z.z1.imag(), z.z2.real(), z.z2.imag()}; }

    static double mono(const std::array<double, 4>& x, const std::array<int, 4>& e) {
        double v = 1.0;
        for (int c = 0; c < 4; ++c) v *= std::pow(x[c], e[c]);
        return v;
    }

    /// Value of phi on a tangent vector v of C^2.
    double apply(const C2& z, const C2& v) const {
        const auto x = coords(z);
        const std::array<double, 4> dv{v.z1.real(), v.z1.imag(), v.z2.real(), v.z2.imag()};
        double s = 0.0;
        for (const auto& t : terms) s += t.coef * mono(x, t.exp) * dv[t.dir];
        return s;
    }

    /// Coefficient of dx ^ dy of d(phi) pulled back along zeta -> (zeta, w)
    /// with w' = dw/dzeta.
    double d_pullback(const C2& z, cplx wprime) const {
        const auto x = coords(z);
        const std::array<std::array<double, 2>, 4> g{{{1.0, 0.0},
                                                      {0.0, 1.0},
                                                      {wprime.real(), -wprime.imag()},
                                                      {wprime.imag(), wprime.real()}}};
        double s = 0.0;
        for (const auto& t : terms)
            for (int e = 0; e < 4; ++e) {
                if (t.exp[e] == 0) continue;
                auto ex = t.exp;
                ex[e] -= 1;
                const double da = t.coef * t.exp[e] * mono(x, ex);
                s += da * (g[e][0] * g[t.dir][1] - g[e][1] * g[t.dir][0]);
            }
        return s;
    }
};

/// Six polynomial forms with coefficients depending on the fiber coordinate.
inline std::vector<RealOneForm> default_stokes_forms() {
    auto f = [](std::string name, std::array<int, 4> e, int dir) {
        RealOneForm r;
        r.name = std::move(name);
        r.terms.push_back({e, 1.0, dir});
        return r;
    };
    return {
        f("x2 dy2", {0, 0, 1, 0}, 3),      f("x1 x2 dy1", {1, 0, 1, 0}, 1),   f("x2^2 dy1", {0, 0, 2, 0}, 1),
        f("x1 y2 dx2", {1, 0, 0, 1}, 2),   f("x2 y2 dx1", {0, 0, 1, 1}, 0), f("x1 y1 x2 dy2", {1, 1, 1, 0}, 3),
    };
}

struct StokesResult {
    double residual = 0.0;
    int sign = 1;
    std::vector<double> surface;
    std::vector<double> boundary;
};

inline std::vector<FiberSample> sample_field(const FiberField& field, std::span<const RegionNode> region) {
    std::vector<FiberSample> out(region.size());
    parallel_for(static_cast<int>(region.size()), [&](int q) { out[q] = field(region[q].zeta); });
    return out;
}

/// Compares the surface integral of d(phi) over the root graph with the
/// boundary integral of phi, keeping the better global sign.
inline StokesResult stokes_residual(std::span<const FiberSample> samples, std::span<const RegionNode> region,
                                    std::span<const ParamCurve> curves, std::span<const RealOneForm> forms) {
    StokesResult out;
    const size_t nf = forms.size();
    out.surface.assign(nf, 0.0);
    out.boundary.assign(nf, 0.0);
    std::vector<std::vector<double>> partial(region.size(), std::vector<double>(nf, 0.0));
    parallel_for(static_cast<int>(region.size()), [&](int q) {
        const auto& f = samples[q];
        for (size_t r = 0; r < f.roots.size(); ++r) {
            const C2 z{region[q].zeta, f.roots[r]};
            for (size_t k = 0; k < nf; ++k) partial[q][k] += forms[k].d_pullback(z, f.derivs[r]) * region[q].weight;
        }
    });
    for (const auto& p : partial)
        for (size_t k = 0; k < nf; ++k) out.surface[k] += p[k];
    for (const auto& c : curves)
        for (size_t k = 0; k < nf; ++k) {
            double s = 0.0;
            for (int j = 0; j < c.size(); ++j) s += forms[k].apply(c.nodes[j], c.velocity[j]);
            out.boundary[k] += s * c.period / c.size() * c.orientation;
        }
    double best = std::numeric_limits<double>::infinity();
    for (int sign : {1, -1}) {
        double r = 0.0;
        for (size_t k = 0; k < nf; ++k) r = std::max(r, std::abs(out.surface[k] - sign * out.boundary[k]));
        if (r < best) {
            best = r;
            out.sign = sign;
        }
    }
    out.residual = nf ? best : 0.0;
    return out;
}

inline StokesResult stokes_residual(const FiberField& field, std::span<const RegionNode> region,
                                    std::span<const ParamCurve> curves, std::span<const RealOneForm> forms) {
    const auto samples = sample_field(field, region);
    return stokes_residual(samples, region, curves, forms);
}

inline StokesResult validate_boundary(const FiberField& field, std::span<const RegionNode> region,
                                      std::span<const ParamCurve> curves, std::span<const RealOneForm> forms,
                                      double stokesTol) {
    auto r = stokes_residual(field, region, curves, forms);
    if (r.residual > stokesTol)
        fail(ErrorKind::BoundaryMismatch, "Stokes residual " + std::to_string(r.residual) + " under both signs");
    return r;
}

/// Area of the root graph: integral of sum over sheets of (1 + |w'|^2).
inline double mass_estimate(std::span<const FiberSample> samples, std::span<const RegionNode> region) {
    double s = 0.0;
    for (size_t q = 0; q < region.size(); ++q)
        for (auto d : samples[q].derivs) s += (1.0 + std::norm(d)) * region[q].weight;
    return s;
}

inline double mass_estimate(const FiberField& field, std::span<const RegionNode> region) {
    const auto samples = sample_field(field, region);
    return mass_estimate(samples, region);
}

inline double mass_bound(std::span<const ParamCurve> curves, double slack = 0.1) {
    double A = 0.0, H = 0.0;
    for (const auto& c : curves) {
        A = std::max(A, c.max_modulus());
        H += c.length();
    }
    return 2.0 * A * H * (1.0 + slack);
}

struct SingularCell {
    int i = 0;
    int j = 0;
    cplx center{};
};

/// Grid cells of one component where the discriminant vanishes or is tiny.
inline std::vector<SingularCell> discriminant_locus(const FiberPolynomial& fib, const ComponentMap& map,
                                                    double tol = 1e-8) {
    std::vector<SingularCell> out;
    if (fib.degree <= 1) return out;
    const auto& g = map.grid;
    std::vector<int> slot(g.count(), -1);
    for (size_t s = 0; s < fib.points.size(); ++s) slot[fib.points[s]] = static_cast<int>(s);
    auto scale = [&](int s) {
        double r = 0.0;
        for (int k = 1; k <= fib.degree; ++k) r = std::max(r, std::pow(std::abs(fib.coeffs[s].e[k - 1]), 1.0 / k));
        return std::max(1.0, r);
    };
    for (int j = 0; j + 1 < g.ny; ++j)
        for (int i = 0; i + 1 < g.nx; ++i) {
            const int c[4] = {g.index(i, j), g.index(i + 1, j), g.index(i + 1, j + 1), g.index(i, j + 1)};
            bool ok = true;
            for (int k : c) ok = ok && slot[k] >= 0;
            if (!ok) continue;
            bool flag = false;
            double turn = 0.0;
            for (int k = 0; k < 4; ++k) {
                const int s = slot[c[k]];
                const cplx a = fib.disc[s], b = fib.disc[slot[c[(k + 1) % 4]]];
                const double sc = scale(s);
                if (std::abs(a) < tol * std::pow(sc, 2 * fib.degree - 2)) flag = true;
                if (a == cplx{} || b == cplx{}) continue;
                const double dphi = std::arg(b / a);
                if (std::abs(dphi) >= 0.9 * pi) flag = true;
                turn += dphi;
            }
            if (std::abs(turn) > pi) flag = true;
            if (flag) out.push_back({i, j, g.point(i, j) + cplx(0.5 * g.dx(), 0.5 * g.dy())});
        }
    return out;
}

/// Zero of the discriminant near `start`, by Newton's method on the
/// holomorphic function zeta -> disc(P_zeta). Empty when it does not converge.
inline std::optional<cplx> refine_branch_point(const CauchyEvaluator& eval, int kMax, int degree, cplx start,
                                               double radius) {
    auto disc = [&](cplx z) {
        const auto r = eval(z, kMax, false);
        return discriminant(newton_to_monic(std::span<const cplx>(r.S).subspan(1, kMax), degree, 1e-3));
    };
    cplx z = start;
    try {
        for (int it = 0; it < 40; ++it) {
            const double h = 1e-6 * std::max(1.0, radius);
            const cplx f = disc(z);
            const cplx df = (disc(z + h) - disc(z - h) + I * (disc(z - I * h) - disc(z + I * h))) / (4 * h);
            if (df == cplx{}) return std::nullopt;
            const cplx step = f / df;
            z -= step;
            if (std::abs(z - start) > radius) return std::nullopt;
            if (std::abs(step) < 1e-13 * std::max(1.0, std::abs(z))) return z;
        }
    } catch (const Error&) {
        return std::nullopt;
    }
    return std::nullopt;
}

/// One reconstructed slice of the filling.
struct ChainSlice {
    double t = 0.0;
    std::shared_ptr<const ComponentMap> map;
    std::vector<FiberPolynomial> fibers;
    std::vector<std::vector<cplx>> roots;  // per grid index, ordered by sheet
    std::vector<std::vector<int>> sheets;  // per grid index, sheet label per root
    std::vector<int> nearSingular;         // grid indices where sheet matching broke
    std::vector<SingularCell> singular;
    double momentResidual = 0.0;
    double stokesResidual = 0.0;
    int sign = 1;
    double massEstimate = 0.0;
    double massBound = 0.0;
    bool isEmpty = true;
    std::string note;

    bool empty() const { return isEmpty; }
};

struct ReconstructOptions {
    double momentTol = 1e-6;
    double newtonTol = 1e-6;
    double discTol = 1e-8;
    double stokesTol = 1e-6;
    double massSlack = 0.1;
    int rays = 256;
    bool force = false;
    bool validate = true;
    std::vector<RealOneForm> forms = default_stokes_forms();
};

namespace detail {

// Breadth-first sheet labelling with greedy nearest matching.
inline void match_sheets(ChainSlice& s, const FiberPolynomial& fib) {
    const auto& g = s.map->grid;
    const double cap = 4.0 * std::max(g.dx(), g.dy());
    std::vector<char> inComp(g.count(), 0), seen(g.count(), 0);
    for (int idx : fib.points) inComp[idx] = 1;
    for (int seed : fib.points) {
        if (seen[seed]) continue;
        seen[seed] = 1;
        auto& l0 = s.sheets[seed];
        l0.resize(s.roots[seed].size());
        for (size_t r = 0; r < l0.size(); ++r) l0[r] = static_cast<int>(r);
        std::queue<int> q;
        q.push(seed);
        while (!q.empty()) {
            const int k = q.front();
            q.pop();
            const int i = k % g.nx, j = k / g.nx;
            const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
            for (const auto& ij : nb) {
                if (ij[0] < 0 || ij[1] < 0 || ij[0] >= g.nx || ij[1] >= g.ny) continue;
                const int kk = g.index(ij[0], ij[1]);
                if (!inComp[kk] || seen[kk]) continue;
                seen[kk] = 1;
                const auto& from = s.roots[k];
                auto& to = s.roots[kk];
                std::vector<cplx> ordered(to.size());
                std::vector<char> used(to.size(), 0);
                bool broken = false;
                for (size_t a = 0; a < from.size(); ++a) {
                    size_t best = 0;
                    double bd = std::numeric_limits<double>::infinity();
                    for (size_t b = 0; b < to.size(); ++b)
                        if (!used[b] && std::abs(to[b] - from[a]) < bd) {
                            bd = std::abs(to[b] - from[a]);
                            best = b;
                        }
                    used[best] = 1;
                    ordered[a] = to[best];
                    if (bd > cap) broken = true;
                }
                to = ordered;
                s.sheets[kk] = s.sheets[k];
                if (broken) s.nearSingular.push_back(kk);
                q.push(kk);
            }
        }
    }
}

}  // namespace detail

inline ChainSlice reconstruct_slice(std::span<const ParamCurve> curves, const MomentTable& table, double t,
                                    const ReconstructOptions& opt = {}) {
    ChainSlice s;
    s.t = t;
    if (table.empty() || curves.empty()) return s;
    s.map = table.map;
    const auto& map = *table.map;
    for (int id = 1; id < map.components(); ++id)
        if (map.winding[id] < 0)
            fail(ErrorKind::NonPositiveChain,
                 "component " + std::to_string(id) + " has winding " + std::to_string(map.winding[id]));
    s.momentResidual = moment_residual(table);
    if (s.momentResidual >= opt.momentTol && !opt.force)
        fail(ErrorKind::MomentViolation, "moment residual " + std::to_string(s.momentResidual));

    const int n = map.grid.count();
    s.roots.assign(n, {});
    s.sheets.assign(n, {});
    for (int id = 1; id < map.components(); ++id) {
        const int d = map.winding[id];
        if (d == 0) continue;
        FiberPolynomial fib;
        fib.componentId = id;
        fib.degree = d;
        for (int idx = 0; idx < n; ++idx)
            if (map.label[idx] == id) fib.points.push_back(idx);
        fib.coeffs.resize(fib.points.size());
        fib.disc.resize(fib.points.size());
        parallel_for(static_cast<int>(fib.points.size()), [&](int q) {
            const int idx = fib.points[q];
            const auto& v = table.values[idx];
            fib.coeffs[q] = newton_to_monic(std::span<const cplx>(v).subspan(1, table.kMax), d, opt.newtonTol);
            fib.disc[q] = discriminant(fib.coeffs[q]);
            s.roots[idx] = fiber_roots(fib.coeffs[q]);
        });
        detail::match_sheets(s, fib);
        auto cells = discriminant_locus(fib, map, opt.discTol);
        s.singular.insert(s.singular.end(), cells.begin(), cells.end());
        s.fibers.push_back(std::move(fib));
    }
    s.isEmpty = s.fibers.empty();
    if (s.isEmpty || !opt.validate) return s;

    auto eval = std::make_shared<const CauchyEvaluator>(curves);
    const FiberField field = make_fiber_field(eval, std::max(table.kMax, map.max_winding()));
    // a single branch point becomes the pole of the polar quadrature
    std::optional<cplx> pole;
    if (!s.singular.empty()) {
        const double step = std::max(map.grid.dx(), map.grid.dy());
        cplx mean{};
        bool clustered = true;
        for (const auto& c : s.singular) mean += c.center;
        mean /= static_cast<double>(s.singular.size());
        for (const auto& c : s.singular) clustered = clustered && std::abs(c.center - mean) < 3 * step;
        if (clustered) {
            int degree = 0;
            for (const auto& f : s.fibers) degree = std::max(degree, f.degree);
            pole = refine_branch_point(*eval, std::max(table.kMax, degree), degree, mean, 3 * step);
        }
    }
    const auto region = region_quadrature(curves, map, *eval, opt.rays, pole);
    const auto samples = sample_field(field, region);
    const auto st = stokes_residual(samples, region, curves, opt.forms);
    s.stokesResidual = st.residual;
    s.sign = st.sign;
    s.massEstimate = mass_estimate(samples, region);
    s.massBound = mass_bound(curves, opt.massSlack);
    if (s.massEstimate > s.massBound)
        fail(ErrorKind::MassBoundViolation, "mass " + std::to_string(s.massEstimate) + " exceeds bound " +
                                                std::to_string(s.massBound));
    return s;
}

}  // namespace plateau
