#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "plateau/core.hpp"

namespace plateau {

/// w^d - e1 w^{d-1} + ... + (-1)^d e_d, stored as (e1, ..., e_d).
struct MonicPolynomial {
    std::vector<cplx> e;

    int degree() const { return static_cast<int>(e.size()); }

    /// Coefficients a_0..a_d of sum a_j w^j.
    std::vector<cplx> ascending() const {
        const int d = degree();
        std::vector<cplx> a(d + 1);
        a[d] = 1.0;
        for (int k = 1; k <= d; ++k) a[d - k] = (k % 2 ? -1.0 : 1.0) * e[k - 1];
        return a;
    }

    cplx operator()(cplx w) const {
        const auto a = ascending();
        cplx v{};
        for (size_t j = a.size(); j-- > 0;) v = v * w + a[j];
        return v;
    }

    cplx derivative(cplx w) const {
        const auto a = ascending();
        cplx v{};
        for (size_t j = a.size(); j-- > 1;) v = v * w + a[j] * static_cast<double>(j);
        return v;
    }

    static MonicPolynomial from_roots(std::span<const cplx> roots) {
        // e_k accumulate as elementary symmetric polynomials
        std::vector<cplx> e(roots.size() + 1);
        e[0] = 1.0;
        for (size_t r = 0; r < roots.size(); ++r)
            for (size_t k = r + 1; k >= 1; --k) e[k] += e[k - 1] * roots[r];
        return {std::vector<cplx>(e.begin() + 1, e.end())};
    }
};

/// Newton power sums p_1..p_kMax of the roots of a monic polynomial.
inline std::vector<cplx> power_sums_of(const MonicPolynomial& P, int kMax) {
    const int d = P.degree();
    std::vector<cplx> p(kMax + 1);
    p[0] = static_cast<double>(d);
    auto e = [&](int k) -> cplx { return k == 0 ? cplx(1.0) : (k <= d ? P.e[k - 1] : cplx{}); };
    for (int k = 1; k <= kMax; ++k) {
        // k e_k = sum_{i=1}^{k} (-1)^{i-1} e_{k-i} p_i, solved for p_k
        cplx acc = static_cast<double>(k) * e(k);
        for (int i = 1; i < k; ++i) acc -= ((i - 1) % 2 ? -1.0 : 1.0) * e(k - i) * p[i];
        p[k] = ((k - 1) % 2 ? -1.0 : 1.0) * acc;
    }
    return p;
}

/// Elementary symmetric functions from power sums p = (p_1, p_2, ...).
/// Surplus entries beyond d are checked against the returned polynomial.
inline MonicPolynomial newton_to_monic(std::span<const cplx> p, int d, double newtonTol = 1e-6) {
    if (d < 1) fail(ErrorKind::InvalidSpec, "fiber degree must be >= 1");
    if (static_cast<int>(p.size()) < d) fail(ErrorKind::InvalidSpec, "not enough power sums");
    std::vector<cplx> e(d + 1);
    e[0] = 1.0;
    for (int k = 1; k <= d; ++k) {
        cplx s{};
        for (int i = 1; i <= k; ++i) s += ((i - 1) % 2 ? -1.0 : 1.0) * e[k - i] * p[i - 1];
        e[k] = s / static_cast<double>(k);
    }
    MonicPolynomial P{std::vector<cplx>(e.begin() + 1, e.end())};
    const int kMax = static_cast<int>(p.size());
    if (kMax > d) {
        const auto q = power_sums_of(P, kMax);
        for (int k = d + 1; k <= kMax; ++k) {
            const double scale = std::max(1.0, std::abs(p[k - 1]));
            if (std::abs(q[k] - p[k - 1]) >= newtonTol * scale)
                fail(ErrorKind::NonPositiveChain,
                     "surplus power sum p_" + std::to_string(k) + " inconsistent with a degree-" + std::to_string(d) +
                         " polynomial");
        }
    }
    return P;
}

/// Derivative of (e_1..e_d) given power sums and their derivatives.
inline std::vector<cplx> newton_derivative(const MonicPolynomial& P, std::span<const cplx> dp) {
    const int d = P.degree();
    std::vector<cplx> e(d + 1), de(d + 1);
    e[0] = 1.0;
    for (int k = 1; k <= d; ++k) e[k] = P.e[k - 1];
    // p_i themselves from e
    const auto p = power_sums_of(P, d);
    for (int k = 1; k <= d; ++k) {
        cplx s{};
        for (int i = 1; i <= k; ++i) {
            const double sg = (i - 1) % 2 ? -1.0 : 1.0;
            s += sg * (de[k - i] * p[i] + e[k - i] * dp[i - 1]);
        }
        de[k] = s / static_cast<double>(k);
    }
    return std::vector<cplx>(de.begin() + 1, de.end());
}

inline double backward_error(const MonicPolynomial& P, cplx w) {
    return std::abs(P(w)) / std::pow(1.0 + std::abs(w), P.degree());
}

/// All roots via companion-matrix eigenvalues, polished by Newton steps.
inline std::vector<cplx> fiber_roots(const MonicPolynomial& P) {
    const int d = P.degree();
    if (d == 0) return {};
    if (d > 12) fail(ErrorKind::InvalidSpec, "fiber degree above 12");
    const auto a = P.ascending();
    std::vector<cplx> roots;
    if (d == 1) {
        roots = {-a[0]};
    } else {
        Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(d, d);
        for (int i = 1; i < d; ++i) C(i, i - 1) = 1.0;
        for (int i = 0; i < d; ++i) C(i, d - 1) = -a[i];
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
        if (es.info() != Eigen::Success) fail(ErrorKind::RootFailure, "companion eigenvalue solver failed");
        for (int i = 0; i < d; ++i) roots.push_back(es.eigenvalues()[i]);
    }
    for (auto& w : roots) {
        for (int it = 0; it < 3; ++it) {
            const cplx f = P(w), df = P.derivative(w);
            if (df == cplx{}) break;
            const cplx step = f / df;
            const cplx cand = w - step;
            if (!(backward_error(P, cand) < backward_error(P, w))) break;
            w = cand;
        }
        if (!(backward_error(P, w) < 1e-10)) fail(ErrorKind::RootFailure, "root backward error too large");
    }
    std::sort(roots.begin(), roots.end(), [](cplx x, cplx y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    return roots;
}

/// Discriminant (-1)^{d(d-1)/2} Res(P, P'), the resultant taken as a
/// Sylvester determinant.
inline cplx discriminant(const MonicPolynomial& P) {
    const int d = P.degree();
    if (d <= 1) return 1.0;
    const auto a = P.ascending();
    std::vector<cplx> b(d);
    for (int j = 1; j <= d; ++j) b[j - 1] = a[j] * static_cast<double>(j);
    const int n = 2 * d - 1;
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(n, n);
    for (int r = 0; r < d - 1; ++r)
        for (int j = 0; j <= d; ++j) S(r, r + j) = a[d - j];
    for (int r = 0; r < d; ++r)
        for (int j = 0; j < d; ++j) S(d - 1 + r, r + j) = b[d - 1 - j];
    const double sign = ((d * (d - 1) / 2) % 2) ? -1.0 : 1.0;
    return sign * S.fullPivLu().determinant();
}

}  // namespace plateau
