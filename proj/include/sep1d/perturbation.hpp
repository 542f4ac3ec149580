#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "sep1d/errors.hpp"
#include "sep1d/grid.hpp"
#include "sep1d/model.hpp"
#include "sep1d/pressure.hpp"
#include "sep1d/steady.hpp"

namespace sep1d {

/// Deviation from the steady state: sigma = rho - rho_bar, j = J - J_bar,
/// e_tilde = Phi_x - Phi_bar_x. sigma vanishes at both contacts and e_tilde
/// is the gradient of the homogeneous-Dirichlet potential of sigma.
struct PerturbationState {
    GridFunction sigma;
    GridFunction j;
    GridFunction e_tilde;
};

/// Gradient of the potential phi solving phi_xx = sigma, phi(0) = phi(1) = 0.
inline GridFunction efield_of_sigma(const Grid& g, const GridFunction& sigma) {
    const GridFunction phi = solve_poisson_dirichlet(g, sigma, 0.0, 0.0);
    return derivative(g, phi);
}

inline PerturbationState perturbation_of(const SteadyState& st, const FlowField& f) {
    const std::size_t n = st.rho_bar.size();
    if (f.rho.size() != n) throw ShapeError("perturbation_of: grid mismatch");
    PerturbationState p;
    p.sigma.resize(n);
    p.j.resize(n);
    p.e_tilde.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        p.sigma[i] = f.rho[i] - st.rho_bar[i];
        p.j[i] = f.J[i] - st.J_bar;
        p.e_tilde[i] = f.E[i] - st.E_bar[i];
    }
    return p;
}

/// Node-wise coefficients of the first-order form of the perturbed system,
///   d w + (A w_x + B w + C) dt = N dt + (0, F dW)^T,  w = (sigma, j).
/// A is evaluated at the full state, B at the steady state only, C couples
/// the electric field, and N is the exact defect making the identity hold
/// node by node with the standard stencils.
struct CoefficientFields {
    GridFunction a21, a22; // A = [[0, 1], [a21, a22]]
    GridFunction b21, b22; // B = [[0, 0], [b21, b22]]
    GridFunction c2;       // C = (0, c2), c2 = -rho_bar * e_tilde
    GridFunction n2;       // N = (0, n2)

    std::array<std::array<double, 2>, 2> A_at(std::size_t i) const {
        return {{{0.0, 1.0}, {a21[i], a22[i]}}};
    }
    std::array<std::array<double, 2>, 2> B_at(std::size_t i) const {
        return {{{0.0, 0.0}, {b21[i], b22[i]}}};
    }
    std::array<double, 2> C_at(std::size_t i) const { return {0.0, c2[i]}; }
    std::array<double, 2> N_at(std::size_t i) const { return {0.0, n2[i]}; }
};

/// Exact drift of the perturbed momentum equation (the deterministic part of
/// dj/dt), discretized with the standard stencils:
///   -( (J+j)^2/(rho+sigma) - J^2/rho + P(rho+sigma) - P(rho) )_x
///   - j + rho_bar e_tilde + sigma E_bar + sigma e_tilde.
inline GridFunction perturbed_momentum_drift(const PerturbationState& p,
                                             const SteadyState& st,
                                             const PressureLaw& law) {
    const Grid& g = st.grid;
    const std::size_t n = st.rho_bar.size();
    GridFunction dflux(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double rho = st.rho_bar[i] + p.sigma[i];
        if (!(rho > 0.0)) throw VacuumError("perturbation: rho_bar + sigma not positive");
        const double J = st.J_bar + p.j[i];
        dflux[i] = J * J / rho - st.J_bar * st.J_bar / st.rho_bar[i] + law.p(rho) -
                   law.p(st.rho_bar[i]);
    }
    const GridFunction dflux_x = derivative(g, dflux);
    GridFunction drift(n);
    for (std::size_t i = 0; i < n; ++i)
        drift[i] = -dflux_x[i] - p.j[i] + st.rho_bar[i] * p.e_tilde[i] +
                   p.sigma[i] * st.E_bar[i] + p.sigma[i] * p.e_tilde[i];
    return drift;
}

inline CoefficientFields assemble_coefficients(const PerturbationState& p,
                                               const SteadyState& st,
                                               const PressureLaw& law) {
    const Grid& g = st.grid;
    const std::size_t n = st.rho_bar.size();
    if (p.sigma.size() != n || p.j.size() != n || p.e_tilde.size() != n)
        throw ShapeError("assemble_coefficients: grid mismatch");

    CoefficientFields c;
    c.a21.resize(n);
    c.a22.resize(n);
    c.b21.resize(n);
    c.b22.resize(n);
    c.c2.resize(n);
    c.n2.resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        const double rho = st.rho_bar[i] + p.sigma[i];
        if (!(rho > 0.0)) throw VacuumError("assemble_coefficients: vacuum state");
        const double u = (st.J_bar + p.j[i]) / rho;
        c.a21[i] = -u * u + law.dp(rho);
        c.a22[i] = 2.0 * u;

        const double rb = st.rho_bar[i];
        const double rbx = st.rho_bar_x[i];
        c.b21[i] = -2.0 * st.J_bar * st.J_bar * rbx / (rb * rb * rb) +
                   law.d2p(rb) * rbx - st.E_bar[i];
        c.b22[i] = -2.0 * st.J_bar * rbx / (rb * rb) + 1.0;
        c.c2[i] = -rb * p.e_tilde[i];
    }

    // N as the exact defect: drift + A w_x + B w + C, node by node.
    const GridFunction sigma_x = derivative(g, p.sigma);
    const GridFunction j_x = derivative(g, p.j);
    const GridFunction drift = perturbed_momentum_drift(p, st, law);
    for (std::size_t i = 0; i < n; ++i)
        c.n2[i] = drift[i] + c.a21[i] * sigma_x[i] + c.a22[i] * j_x[i] +
                  c.b21[i] * p.sigma[i] + c.b22[i] * p.j[i] + c.c2[i];
    return c;
}

/**
 * First-order symmetrizer weight r(x), the solution of
 *   (J^2/rho^2 - P'(rho)) r_x
 *     + (3 J^2 rho_x/rho^3 + P''(rho) rho_x - P'(rho) rho_x/rho - J/rho) r = 0
 * on the steady state, integrated exactly: r = r0 exp(-int g/a) with the
 * coefficient ratio accumulated by trapezoid quadrature. Positivity is
 * structural (exponential form).
 */
inline GridFunction first_order_symmetrizer(const SteadyState& st, const PressureLaw& law,
                                            double r0) {
    if (!(st.subsonic_margin > 0.0))
        throw SupersonicError("symmetrizer: steady state is not subsonic");
    if (!(r0 > 0.0)) throw DomainError("symmetrizer: r0 must be positive");
    const Grid& g = st.grid;
    const std::size_t n = st.rho_bar.size();
    GridFunction ratio(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double rb = st.rho_bar[i];
        const double rbx = st.rho_bar_x[i];
        const double J = st.J_bar;
        const double a = J * J / (rb * rb) - law.dp(rb);
        const double gg = 3.0 * J * J * rbx / (rb * rb * rb) + law.d2p(rb) * rbx -
                          law.dp(rb) * rbx / rb - J / rb;
        ratio[i] = gg / a;
    }
    GridFunction r(n);
    r[0] = r0;
    double acc = 0.0;
    const double h = g.h();
    for (std::size_t i = 1; i < n; ++i) {
        acc += 0.5 * h * (ratio[i - 1] + ratio[i]);
        r[i] = r0 * std::exp(-acc);
    }
    return r;
}

/**
 * Second-order symmetrizer weight r_tilde(x), the exact solution of
 *   r_x + G r + M = 0,  r(0) = r0,
 * with
 *   G = (1/3) s^-1 (5 s_x - 2 J^2 rho_x/rho^3 + P''(rho) rho_x - E),
 *   M = -(2/3) s^-1,   s = P'(rho) - J^2/rho^2,
 * namely r(x) = e^{-int_0^x G} (r0 - int_0^x e^{int_0^t G} M dt). Throws if
 * the result is not strictly positive (parameters outside the smallness
 * regime the weight is designed for).
 */
inline GridFunction second_order_symmetrizer(const SteadyState& st, const PressureLaw& law,
                                             double r0) {
    if (!(st.subsonic_margin > 0.0))
        throw SupersonicError("symmetrizer: steady state is not subsonic");
    if (!(r0 > 0.0)) throw DomainError("symmetrizer: r0 must be positive");
    const Grid& g = st.grid;
    const std::size_t n = st.rho_bar.size();
    const double h = g.h();

    GridFunction s(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double rb = st.rho_bar[i];
        s[i] = law.dp(rb) - st.J_bar * st.J_bar / (rb * rb);
    }
    const GridFunction s_x = derivative(g, s);

    GridFunction G(n), M(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double rb = st.rho_bar[i];
        const double rbx = st.rho_bar_x[i];
        G[i] = (5.0 * s_x[i] -
                2.0 * st.J_bar * st.J_bar * rbx / (rb * rb * rb) +
                law.d2p(rb) * rbx - st.E_bar[i]) /
               (3.0 * s[i]);
        M[i] = -2.0 / (3.0 * s[i]);
    }

    // Cumulative integrals of G and of e^{int G} M by trapezoid.
    GridFunction ig(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) ig[i] = ig[i - 1] + 0.5 * h * (G[i - 1] + G[i]);
    GridFunction r(n);
    double part = 0.0;
    r[0] = r0;
    for (std::size_t i = 1; i < n; ++i) {
        part += 0.5 * h * (std::exp(ig[i - 1]) * M[i - 1] + std::exp(ig[i]) * M[i]);
        r[i] = std::exp(-ig[i]) * (r0 - part);
    }
    for (double v : r)
        if (!(v > 0.0))
            throw PositivityError("symmetrizer: r_tilde lost positivity");
    return r;
}

/// Diagonal symmetrizer weights for the first- and second-order estimates.
/// s = (P'(rho_bar) - J^2/rho_bar^2) r; s_tilde is evaluated at the full
/// state (steady + pert), reducing to the steady expression for pert = 0.
struct SymmetrizerWeights {
    GridFunction r, s, r_tilde, s_tilde;
};

inline SymmetrizerWeights make_symmetrizer_weights(const SteadyState& st,
                                                   const PressureLaw& law, double r0 = 1.0,
                                                   double r_tilde0 = 1.0,
                                                   const PerturbationState* pert = nullptr) {
    SymmetrizerWeights w;
    w.r = first_order_symmetrizer(st, law, r0);
    w.r_tilde = second_order_symmetrizer(st, law, r_tilde0);
    const std::size_t n = st.rho_bar.size();
    w.s.resize(n);
    w.s_tilde.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double rb = st.rho_bar[i];
        w.s[i] = (law.dp(rb) - st.J_bar * st.J_bar / (rb * rb)) * w.r[i];
        const double rho = rb + (pert ? pert->sigma[i] : 0.0);
        const double J = st.J_bar + (pert ? pert->j[i] : 0.0);
        w.s_tilde[i] = (law.dp(rho) - J * J / (rho * rho)) * w.r_tilde[i];
    }
    return w;
}

} // namespace sep1d
