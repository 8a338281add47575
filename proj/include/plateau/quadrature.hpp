#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <utility>
#include <vector>

namespace plateau {

struct QuadNode {
    double x;
    double w;
};

/// Gauss-Legendre rule with P points mapped onto [a, b].
template <unsigned P>
std::vector<QuadNode> gauss_legendre(double a, double b) {
    using rule = boost::math::quadrature::gauss<double, P>;
    const auto& xs = rule::abscissa();
    const auto& ws = rule::weights();
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    std::vector<QuadNode> out;
    out.reserve(P);
    for (size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] == 0.0) {
            out.push_back({mid, half * ws[i]});
            continue;
        }
        out.push_back({mid - half * xs[i], half * ws[i]});
        out.push_back({mid + half * xs[i], half * ws[i]});
    }
    return out;
}

}  // namespace plateau
