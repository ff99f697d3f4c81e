#pragma once
// Composite Gauss-Legendre rules built on Boost.Math's fixed-order nodes.

#include <boost/math/quadrature/gauss.hpp>

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace thermoqfi::quad {

/// Nodes and weights of a rule on an interval.
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;

    void append(const Rule& other) {
        nodes.insert(nodes.end(), other.nodes.begin(), other.nodes.end());
        weights.insert(weights.end(), other.weights.begin(), other.weights.end());
    }
    [[nodiscard]] std::size_t size() const { return nodes.size(); }
};

inline constexpr unsigned kOrder = 10;

/// kOrder-point Gauss-Legendre on [a, b].
inline Rule gauss_legendre(double a, double b) {
    using G = boost::math::quadrature::gauss<double, kOrder>;
    const auto& x = G::abscissa();
    const auto& w = G::weights();
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    Rule r;
    // Boost stores the non-negative half of the symmetric rule.
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) {
            r.nodes.push_back(mid);
            r.weights.push_back(half * w[i]);
            continue;
        }
        r.nodes.push_back(mid - half * x[i]);
        r.weights.push_back(half * w[i]);
        r.nodes.push_back(mid + half * x[i]);
        r.weights.push_back(half * w[i]);
    }
    return r;
}

/// `panels` equal Gauss-Legendre panels on [a, b].
inline Rule composite(double a, double b, int panels) {
    if (panels < 1) throw std::invalid_argument("composite rule needs at least one panel");
    Rule r;
    const double h = (b - a) / panels;
    for (int i = 0; i < panels; ++i) r.append(gauss_legendre(a + i * h, i + 1 == panels ? b : a + (i + 1) * h));
    return r;
}

/// Dyadic shells [b 2^-(j+1), b 2^-j] for j < levels, each cut into `split`
/// equal panels, plus [0, b 2^-levels]; resolves integrable endpoint
/// singularities at 0 such as log(u).
inline Rule graded_toward_zero(double b, int levels, int split = 1) {
    Rule r;
    double hi = b;
    for (int j = 0; j < levels; ++j) {
        const double lo = 0.5 * hi;
        r.append(composite(lo, hi, split));
        hi = lo;
    }
    r.append(gauss_legendre(0.0, hi));
    return r;
}

template <typename F>
double integrate(const Rule& r, F&& f) {
    double acc = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) acc += r.weights[i] * f(r.nodes[i]);
    return acc;
}

}  // namespace thermoqfi::quad
