#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sep1d/errors.hpp"
#include "sep1d/grid.hpp"
#include "sep1d/pressure.hpp"

namespace sep1d {

/// Dirichlet data at the contacts: densities and potentials at x = 0, 1.
struct BoundaryData {
    double rho_left = 1.0;
    double rho_right = 1.0;
    double phi_left = 0.0;
    double phi_right = 0.0;

    void validate() const {
        if (!(rho_left > 0.0)) throw DomainError("boundary: rho_left must be positive");
        if (!(rho_right > 0.0)) throw DomainError("boundary: rho_right must be positive");
    }
};

/// Fixed positive background charge density b(x) sampled on the grid.
struct DopingProfile {
    GridFunction values;
    std::string source = "constant";

    static DopingProfile constant(const Grid& g, double v) {
        if (!(v > 0.0)) throw DomainError("doping: constant value must be positive");
        DopingProfile b;
        b.values.assign(g.n_nodes(), v);
        b.source = "constant";
        return b;
    }

    /// b(x) = base + height * exp(-((x-center)/width)^2).
    static DopingProfile bump(const Grid& g, double base, double center, double width,
                              double height) {
        if (!(width > 0.0)) throw DomainError("doping: bump width must be positive");
        DopingProfile b;
        b.values.resize(g.n_nodes());
        for (std::size_t i = 0; i < b.values.size(); ++i) {
            const double u = (g.node(i) - center) / width;
            b.values[i] = base + height * std::exp(-u * u);
        }
        b.source = "bump";
        b.check_positive();
        return b;
    }

    /// Loads a two-column CSV (x, b) and resamples to the grid by linear
    /// interpolation. Sample abscissae must be strictly increasing.
    static DopingProfile from_csv(const Grid& g, const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("doping: cannot open file " + path);
        std::vector<double> xs, bs;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            for (char& c : line)
                if (c == ',') c = ' ';
            std::istringstream ss(line);
            double x, b;
            if (ss >> x >> b) {
                xs.push_back(x);
                bs.push_back(b);
            }
        }
        if (xs.size() < 2) throw ConfigError("doping: file needs at least two samples");
        for (std::size_t i = 1; i < xs.size(); ++i)
            if (!(xs[i] > xs[i - 1]))
                throw ConfigError("doping: sample abscissae must be strictly increasing");

        DopingProfile b;
        b.values.resize(g.n_nodes());
        for (std::size_t i = 0; i < b.values.size(); ++i) {
            const double x = g.node(i);
            if (x <= xs.front()) {
                b.values[i] = bs.front();
            } else if (x >= xs.back()) {
                b.values[i] = bs.back();
            } else {
                std::size_t k = 1;
                while (xs[k] < x) ++k;
                const double w = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
                b.values[i] = (1.0 - w) * bs[k - 1] + w * bs[k];
            }
        }
        b.source = "csv:" + path;
        b.check_positive();
        return b;
    }

    /// Parses "constant:<v>" or "bump:<center>:<width>:<height>" with the
    /// given base density, or "csv:<path>".
    static DopingProfile parse(const Grid& g, const std::string& desc, double base) {
        const auto next = [&](std::size_t& pos) {
            const std::size_t q = desc.find(':', pos);
            const std::string tok =
                desc.substr(pos, q == std::string::npos ? q : q - pos);
            pos = (q == std::string::npos) ? desc.size() : q + 1;
            return tok;
        };
        std::size_t pos = 0;
        const std::string kind = next(pos);
        if (kind == "constant") {
            const std::string v = next(pos);
            return constant(g, v.empty() ? base : std::stod(v));
        }
        if (kind == "bump") {
            const double center = std::stod(next(pos));
            const double width = std::stod(next(pos));
            const double height = std::stod(next(pos));
            return bump(g, base, center, width, height);
        }
        if (kind == "csv") return from_csv(g, desc.substr(pos));
        throw ConfigError("doping: unknown profile kind '" + kind + "'");
    }

    void check_positive() const {
        for (double v : values)
            if (!(v > 0.0)) throw DomainError("doping: b(x) must be positive at every node");
    }
};

/// Solves the tridiagonal system with sub/main/super diagonals (a, d, c) by
/// the Thomas algorithm. a[0] and c[n-1] are unused.
inline std::vector<double> solve_tridiagonal(std::vector<double> a, std::vector<double> d,
                                             std::vector<double> c, std::vector<double> rhs) {
    const std::size_t n = d.size();
    if (a.size() != n || c.size() != n || rhs.size() != n)
        throw ShapeError("tridiagonal: band lengths differ");
    for (std::size_t i = 1; i < n; ++i) {
        const double m = a[i] / d[i - 1];
        d[i] -= m * c[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    std::vector<double> x(n);
    x[n - 1] = rhs[n - 1] / d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - c[i] * x[i + 1]) / d[i];
    return x;
}

/// Solves u_xx = f with Dirichlet values u(0) = left, u(1) = right by direct
/// tridiagonal elimination of the central second-order discretization.
inline GridFunction solve_poisson_dirichlet(const Grid& g, const GridFunction& f,
                                            double left, double right) {
    require_same_size(g, f, "solve_poisson_dirichlet");
    const std::size_t n = g.n_nodes();
    GridFunction u(n);
    u[0] = left;
    u[n - 1] = right;
    if (n == 2) return u;

    const double h2 = g.h() * g.h();
    const std::size_t m = n - 2; // interior unknowns
    std::vector<double> sub(m, 1.0), dia(m, -2.0), sup(m, 1.0), rhs(m);
    for (std::size_t k = 0; k < m; ++k) rhs[k] = h2 * f[k + 1];
    rhs[0] -= left;
    rhs[m - 1] -= right;
    const std::vector<double> interior = solve_tridiagonal(sub, dia, sup, rhs);
    for (std::size_t k = 0; k < m; ++k) u[k + 1] = interior[k];
    return u;
}

/// Solves Phi_xx = rho - b with Phi(0) = phi_left, Phi(1) = phi_right.
inline GridFunction solve_poisson(const Grid& g, const GridFunction& rho,
                                  const DopingProfile& b, double phi_left,
                                  double phi_right) {
    require_same_size(g, rho, "solve_poisson(rho)");
    require_same_size(g, b.values, "solve_poisson(b)");
    GridFunction f(rho.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = rho[i] - b.values[i];
    return solve_poisson_dirichlet(g, f, phi_left, phi_right);
}

inline GridFunction solve_poisson(const Grid& g, const GridFunction& rho,
                                  const DopingProfile& b, const BoundaryData& bd) {
    return solve_poisson(g, rho, b, bd.phi_left, bd.phi_right);
}

/// E = Phi_x with the standard second-order stencils.
inline GridFunction electric_field(const Grid& g, const GridFunction& phi) {
    return derivative(g, phi);
}

/// Time-dependent state of the system on a fixed grid. E = Phi_x throughout.
struct FlowField {
    GridFunction rho;
    GridFunction J;
    GridFunction Phi;
    GridFunction E;
    double t = 0.0;

    void check_positive_density() const {
        for (double v : rho)
            if (!(v > 0.0)) throw VacuumError("flow field: rho must be positive");
    }
};

} // namespace sep1d
