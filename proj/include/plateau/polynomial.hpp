#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "plateau/core.hpp"

namespace plateau {

/// Bivariate polynomial sum c_ij z1^i z2^j, 0 <= i <= d1, 0 <= j <= d2.
class BiPoly {
public:
    BiPoly() : BiPoly(0, 0) {}
    BiPoly(int d1, int d2) : d1_(d1), d2_(d2), c_(static_cast<size_t>((d1 + 1) * (d2 + 1))) {}

    static BiPoly monomial(int i, int j, cplx c = 1.0) {
        BiPoly p(i, j);
        p.at(i, j) = c;
        return p;
    }

    int d1() const { return d1_; }
    int d2() const { return d2_; }
    cplx& at(int i, int j) { return c_[i * (d2_ + 1) + j]; }
    cplx at(int i, int j) const { return c_[i * (d2_ + 1) + j]; }

    bool finite() const {
        for (auto v : c_)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        return true;
    }

    bool is_zero() const {
        for (auto v : c_)
            if (v != cplx{}) return false;
        return true;
    }

    cplx operator()(cplx z1, cplx z2) const {
        cplx s{};
        for (int i = d1_; i >= 0; --i) {
            cplx row{};
            for (int j = d2_; j >= 0; --j) row = row * z2 + at(i, j);
            s = s * z1 + row;
        }
        return s;
    }
    cplx operator()(const C2& z) const { return (*this)(z.z1, z.z2); }

    cplx d_z1(const C2& z) const {
        cplx s{};
        for (int i = d1_; i >= 1; --i) {
            cplx row{};
            for (int j = d2_; j >= 0; --j) row = row * z.z2 + at(i, j);
            s = s * z.z1 + row * static_cast<double>(i);
        }
        return s;
    }
    cplx d_z2(const C2& z) const {
        cplx s{};
        for (int i = d1_; i >= 0; --i) {
            cplx row{};
            for (int j = d2_; j >= 1; --j) row = row * z.z2 + at(i, j) * static_cast<double>(j);
            s = s * z.z1 + row;
        }
        return s;
    }

    /// Hefer components: F(z') - F(z) = Q1 (z1' - z1) + Q2 (z2' - z2), via
    /// exact divided differences of monomials.
    std::pair<cplx, cplx> hefer(const C2& zp, const C2& z) const {
        // Q1 = sum_i a_i dd_i(z1', z1) with a_i = sum_j c_ij z2'^j
        cplx q1{};
        {
            cplx dd{}, pw = 1.0;  // dd_i and z1^{i-1}
            for (int i = 1; i <= d1_; ++i) {
                dd = zp.z1 * dd + pw;
                pw *= z.z1;
                cplx a{};
                for (int j = d2_; j >= 0; --j) a = a * zp.z2 + at(i, j);
                q1 += a * dd;
            }
        }
        // Q2 = sum_j b_j dd_j(z2', z2) with b_j = sum_i c_ij z1^i
        cplx q2{};
        {
            cplx dd{}, pw = 1.0;
            for (int j = 1; j <= d2_; ++j) {
                dd = zp.z2 * dd + pw;
                pw *= z.z2;
                cplx b{};
                for (int i = d1_; i >= 0; --i) b = b * z.z1 + at(i, j);
                q2 += b * dd;
            }
        }
        return {q1, q2};
    }

    /// Coefficients in z2 of F(z1, .), lowest degree first.
    std::vector<cplx> in_z2(cplx z1) const {
        std::vector<cplx> b(d2_ + 1);
        for (int j = 0; j <= d2_; ++j) {
            cplx v{};
            for (int i = d1_; i >= 0; --i) v = v * z1 + at(i, j);
            b[j] = v;
        }
        return b;
    }

    BiPoly operator+(const BiPoly& o) const {
        BiPoly r(std::max(d1_, o.d1_), std::max(d2_, o.d2_));
        for (int i = 0; i <= d1_; ++i)
            for (int j = 0; j <= d2_; ++j) r.at(i, j) += at(i, j);
        for (int i = 0; i <= o.d1_; ++i)
            for (int j = 0; j <= o.d2_; ++j) r.at(i, j) += o.at(i, j);
        return r;
    }

private:
    int d1_, d2_;
    std::vector<cplx> c_;
};

/// Bivariate polynomial whose coefficients are polynomials in a real
/// parameter t.
class BiPolyT {
public:
    BiPolyT() : BiPolyT(0, 0) {}
    BiPolyT(int d1, int d2) : d1_(d1), d2_(d2), c_(static_cast<size_t>((d1 + 1) * (d2 + 1))) {}
    explicit BiPolyT(const BiPoly& p) : BiPolyT(p.d1(), p.d2()) {
        for (int i = 0; i <= d1_; ++i)
            for (int j = 0; j <= d2_; ++j) tpoly(i, j) = {p.at(i, j)};
    }

    int d1() const { return d1_; }
    int d2() const { return d2_; }
    std::vector<cplx>& tpoly(int i, int j) { return c_[i * (d2_ + 1) + j]; }
    const std::vector<cplx>& tpoly(int i, int j) const { return c_[i * (d2_ + 1) + j]; }

    BiPoly at(double t) const {
        BiPoly p(d1_, d2_);
        for (int i = 0; i <= d1_; ++i)
            for (int j = 0; j <= d2_; ++j) {
                const auto& tp = tpoly(i, j);
                cplx v{};
                for (size_t k = tp.size(); k-- > 0;) v = v * t + tp[k];
                p.at(i, j) = v;
            }
        return p;
    }

    bool finite() const {
        for (const auto& tp : c_)
            for (auto v : tp)
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        return true;
    }

private:
    int d1_, d2_;
    std::vector<std::vector<cplx>> c_;
};

}  // namespace plateau
