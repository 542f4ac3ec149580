#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "sep1d/errors.hpp"

namespace sep1d {

using GridFunction = std::vector<double>;

/// Uniform collocated grid on [0,1] with nodes x_i = i/N, i = 0..N.
struct Grid {
    std::size_t n_cells = 200;

    explicit Grid(std::size_t n) : n_cells(n) {
        if (n_cells < 1) throw GridTooCoarseError("grid: n_cells must be >= 1");
    }
    Grid() = default;

    std::size_t n_nodes() const { return n_cells + 1; }
    double h() const { return 1.0 / static_cast<double>(n_cells); }
    double node(std::size_t i) const { return static_cast<double>(i) * h(); }

    GridFunction nodes() const {
        GridFunction x(n_nodes());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = node(i);
        return x;
    }
};

inline void require_same_size(const Grid& g, const GridFunction& f, const char* who) {
    if (f.size() != g.n_nodes())
        throw ShapeError(std::string(who) + ": grid function has wrong length");
}

/// First derivative, second-order: central interior, one-sided at the ends.
inline GridFunction derivative(const Grid& g, const GridFunction& f) {
    require_same_size(g, f, "derivative");
    if (g.n_cells < 2) throw GridTooCoarseError("derivative: need n_cells >= 2");
    const double h = g.h();
    const std::size_t n = f.size();
    GridFunction d(n);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return d;
}

/// Second derivative, second-order: central interior, one-sided at the ends.
inline GridFunction second_derivative(const Grid& g, const GridFunction& f) {
    require_same_size(g, f, "second_derivative");
    if (g.n_cells < 3) throw GridTooCoarseError("second_derivative: need n_cells >= 3");
    const double h2 = g.h() * g.h();
    const std::size_t n = f.size();
    GridFunction d(n);
    d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
    d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
    return d;
}

/// Trapezoid quadrature of f over [0,1].
inline double integrate(const Grid& g, const GridFunction& f) {
    require_same_size(g, f, "integrate");
    double s = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
    return s * g.h();
}

inline double norm_l2(const Grid& g, const GridFunction& f) {
    require_same_size(g, f, "norm_l2");
    double s = 0.5 * (f.front() * f.front() + f.back() * f.back());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i] * f[i];
    return std::sqrt(s * g.h());
}

inline double norm_linf(const GridFunction& f) {
    double m = 0.0;
    for (double v : f) m = std::max(m, std::abs(v));
    return m;
}

/// Bundle of derivatives and norms of a grid function, assembled with the
/// module's standard stencils and trapezoid quadrature.
struct Calculus {
    GridFunction fx;
    GridFunction fxx;
    double integral = 0.0;
    double l2 = 0.0;
    double h1 = 0.0;
    double h2 = 0.0;
    double linf = 0.0;
};

inline Calculus grid_calculus(const Grid& g, const GridFunction& f) {
    if (g.n_cells < 4) throw GridTooCoarseError("grid_calculus: need n_cells >= 4");
    require_same_size(g, f, "grid_calculus");
    Calculus c;
    c.fx = derivative(g, f);
    c.fxx = second_derivative(g, f);
    c.integral = integrate(g, f);
    c.l2 = norm_l2(g, f);
    const double l2x = norm_l2(g, c.fx);
    const double l2xx = norm_l2(g, c.fxx);
    c.h1 = std::sqrt(c.l2 * c.l2 + l2x * l2x);
    c.h2 = std::sqrt(c.h1 * c.h1 + l2xx * l2xx);
    c.linf = norm_linf(f);
    return c;
}

inline double norm_h2(const Grid& g, const GridFunction& f) {
    const GridFunction fx = derivative(g, f);
    const GridFunction fxx = second_derivative(g, f);
    const double a = norm_l2(g, f), b = norm_l2(g, fx), c = norm_l2(g, fxx);
    return std::sqrt(a * a + b * b + c * c);
}

} // namespace sep1d
