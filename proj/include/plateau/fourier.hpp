#pragma once

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <vector>

#include "plateau/core.hpp"

namespace plateau {

/// Thin RAII wrapper over a one-dimensional complex FFTW transform.
class Fft {
public:
    Fft(int n, int sign) : n_(n) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        in_ = fftw_alloc_complex(static_cast<size_t>(n));
        out_ = fftw_alloc_complex(static_cast<size_t>(n));
        plan_ = fftw_plan_dft_1d(n, in_, out_, sign, FFTW_ESTIMATE);
    }
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;
    ~Fft() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan_);
        fftw_free(in_);
        fftw_free(out_);
    }

    std::vector<cplx> operator()(const std::vector<cplx>& x) {
        for (int i = 0; i < n_; ++i) {
            in_[i][0] = x[i].real();
            in_[i][1] = x[i].imag();
        }
        fftw_execute(plan_);
        std::vector<cplx> y(n_);
        for (int i = 0; i < n_; ++i) y[i] = {out_[i][0], out_[i][1]};
        return y;
    }

private:
    static std::mutex& planner_mutex() {
        static std::mutex m;
        return m;
    }

    int n_;
    fftw_complex* in_ = nullptr;
    fftw_complex* out_ = nullptr;
    fftw_plan plan_ = nullptr;
};

/// Normalized DFT coefficients c_m with x_j = sum_m c_m e^{2 pi i m j / N};
/// index m in [0, N) is read as the signed frequency m or m - N.
inline std::vector<cplx> dft_coefficients(const std::vector<cplx>& x) {
    const int n = static_cast<int>(x.size());
    Fft fwd(n, FFTW_FORWARD);
    auto c = fwd(x);
    for (auto& v : c) v /= static_cast<double>(n);
    return c;
}

inline std::vector<cplx> from_coefficients(const std::vector<cplx>& c) {
    Fft bwd(static_cast<int>(c.size()), FFTW_BACKWARD);
    return bwd(c);
}

inline int signed_frequency(int m, int n) { return m <= n / 2 ? m : m - n; }

/// Spectral derivative of equispaced periodic samples over one period.
/// The Nyquist mode is dropped, which keeps the derivative of real data real.
inline std::vector<cplx> spectral_derivative(const std::vector<cplx>& x, double period) {
    const int n = static_cast<int>(x.size());
    auto c = dft_coefficients(x);
    const double w = two_pi / period;
    for (int m = 0; m < n; ++m) {
        const int k = signed_frequency(m, n);
        c[m] = (2 * m == n) ? cplx{} : c[m] * cplx(0.0, w * k);
    }
    return from_coefficients(c);
}

inline std::vector<double> spectral_derivative(const std::vector<double>& x, double period) {
    std::vector<cplx> z(x.begin(), x.end());
    auto d = spectral_derivative(z, period);
    std::vector<double> r(d.size());
    for (size_t i = 0; i < d.size(); ++i) r[i] = d[i].real();
    return r;
}

/// Periodic antiderivative with zero mean. The mean of the input is returned
/// through `mean` since a nonzero mean has no periodic primitive.
inline std::vector<cplx> periodic_antiderivative(const std::vector<cplx>& x, double period,
                                                 cplx* mean = nullptr) {
    const int n = static_cast<int>(x.size());
    auto c = dft_coefficients(x);
    if (mean) *mean = c[0];
    const double w = two_pi / period;
    c[0] = 0.0;
    for (int m = 1; m < n; ++m) {
        const int k = signed_frequency(m, n);
        c[m] = (2 * m == n) ? cplx{} : c[m] / cplx(0.0, w * k);
    }
    return from_coefficients(c);
}

/// Trigonometric interpolation of periodic samples onto a finer equispaced
/// grid of size nNew >= x.size(). The Nyquist coefficient is split evenly.
inline std::vector<cplx> trig_upsample(const std::vector<cplx>& x, int nNew) {
    const int n = static_cast<int>(x.size());
    if (nNew == n) return x;
    auto c = dft_coefficients(x);
    std::vector<cplx> d(nNew);
    for (int m = 0; m < n; ++m) {
        const int k = signed_frequency(m, n);
        if (2 * m == n) {
            d[n / 2] += 0.5 * c[m];
            d[nNew - n / 2] += 0.5 * c[m];
        } else {
            d[k >= 0 ? k : nNew + k] += c[m];
        }
    }
    return from_coefficients(d);
}

/// Evaluates the trigonometric interpolant of periodic samples at any
/// parameter value.
class TrigInterpolant {
public:
    TrigInterpolant() = default;
    TrigInterpolant(const std::vector<cplx>& samples, double period)
        : period_(period), n_(static_cast<int>(samples.size())), c_(dft_coefficients(samples)) {}

    cplx operator()(double theta) const { return eval(theta, false); }
    cplx derivative(double theta) const { return eval(theta, true); }

private:
    cplx eval(double theta, bool deriv) const {
        const double w = two_pi / period_;
        cplx sum{};
        for (int m = 0; m < n_; ++m) {
            const int k = signed_frequency(m, n_);
            double weight = 1.0;
            if (2 * m == n_) {
                // split Nyquist term: 0.5 (e^{ik x} + e^{-ik x})
                const double ph = w * k * theta;
                sum += deriv ? c_[m] * (-w * k * std::sin(ph)) : c_[m] * std::cos(ph);
                continue;
            }
            const cplx e = std::polar(weight, w * k * theta);
            sum += deriv ? c_[m] * e * cplx(0.0, w * k) : c_[m] * e;
        }
        return sum;
    }

    double period_ = two_pi;
    int n_ = 0;
    std::vector<cplx> c_;
};

}  // namespace plateau
