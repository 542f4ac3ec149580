#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "sep1d/errors.hpp"
#include "sep1d/grid.hpp"
#include "sep1d/model.hpp"
#include "sep1d/pressure.hpp"

namespace sep1d {

/// Subsonic steady state (rho_bar, J_bar, Phi_bar, E_bar) of the deterministic
/// system with Ohmic contacts. E_bar is the discrete representation of
/// Phi_bar_x used by all downstream consumers.
struct SteadyState {
    Grid grid;
    GridFunction rho_bar;
    GridFunction rho_bar_x; // standard stencil derivative, cached
    double J_bar = 0.0;
    GridFunction Phi_bar;
    GridFunction E_bar;
    double subsonic_margin = 0.0; // min over nodes of P'(rho) - J^2/rho^2
    double residual_norm = 0.0;   // sup norm of the discrete elliptic defect
};

struct SteadySolveReport {
    int iterations = 0;
    std::vector<double> residual_history;
    std::string mode = "given-current";
    double mass_defect = 0.0; // integral of rho_bar minus integral of b
    int outer_iterations = 0; // voltage mode only
};

struct SteadyOptions {
    double newton_tol = 1e-10;
    int max_iterations = 50;
    int max_halvings = 20;
    double voltage_tol = 1e-9;
    double j_max = 0.2;
};

namespace detail {

// Discrete steady density equation, the divergence of (momentum equation)/rho:
//   c2(rho) rho_xx + q(rho) rho_x^2 + m(rho) rho_x - (rho - b) = 0
// with c2 = (P' - J^2/rho^2)/rho, q = c2' = 3J^2/rho^4 + P''/rho - P'/rho^2,
// m = -J/rho^2. Interior nodes only; Dirichlet ends.
struct EllipticOperator {
    const PressureLaw& law;
    double J;

    double c2(double rho) const { return (law.dp(rho) - J * J / (rho * rho)) / rho; }
    double q(double rho) const {
        return 3.0 * J * J / std::pow(rho, 4) + law.d2p(rho) / rho -
               law.dp(rho) / (rho * rho);
    }
    double dq(double rho) const {
        return -12.0 * J * J / std::pow(rho, 5) + law.d3p(rho) / rho -
               2.0 * law.d2p(rho) / (rho * rho) + 2.0 * law.dp(rho) / std::pow(rho, 3);
    }
    double m(double rho) const { return -J / (rho * rho); }
    double dm(double rho) const { return 2.0 * J / std::pow(rho, 3); }

    GridFunction residual(const Grid& g, const GridFunction& rho,
                          const GridFunction& b) const {
        const double h = g.h();
        const std::size_t n = rho.size();
        GridFunction r(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double d1 = (rho[i + 1] - rho[i - 1]) / (2.0 * h);
            const double d2 = (rho[i + 1] - 2.0 * rho[i] + rho[i - 1]) / (h * h);
            r[i] = c2(rho[i]) * d2 + q(rho[i]) * d1 * d1 + m(rho[i]) * d1 -
                   (rho[i] - b[i]);
        }
        return r;
    }
};

inline double subsonic_margin_of(const PressureLaw& law, const GridFunction& rho,
                                 double J) {
    double margin = std::numeric_limits<double>::infinity();
    for (double r : rho) {
        if (!(r > 0.0)) throw VacuumError("steady: density not positive");
        margin = std::min(margin, law.dp(r) - J * J / (r * r));
    }
    return margin;
}

} // namespace detail

/// Sup norms of the discrete steady momentum and Poisson defects.
/// The momentum defect uses the state's E_bar as Phi_bar_x; the Poisson
/// defect compares the second-derivative stencil of Phi_bar with rho - b.
inline std::pair<double, double> steady_residual(const SteadyState& st,
                                                 const PressureLaw& law,
                                                 const DopingProfile& b) {
    const Grid& g = st.grid;
    require_same_size(g, b.values, "steady_residual(b)");
    GridFunction flux(g.n_nodes());
    for (std::size_t i = 0; i < flux.size(); ++i)
        flux[i] = st.J_bar * st.J_bar / st.rho_bar[i] + law.p(st.rho_bar[i]);
    const GridFunction flux_x = derivative(g, flux);

    double momentum = 0.0;
    for (std::size_t i = 0; i < flux.size(); ++i)
        momentum = std::max(std::abs(flux_x[i] + st.J_bar - st.rho_bar[i] * st.E_bar[i]),
                            momentum);

    const GridFunction phi_xx = second_derivative(g, st.Phi_bar);
    double poisson = 0.0;
    for (std::size_t i = 0; i < flux.size(); ++i)
        poisson =
            std::max(std::abs(phi_xx[i] - (st.rho_bar[i] - b.values[i])), poisson);
    return {momentum, poisson};
}

/**
 * Solves the steady state for a prescribed constant current J_bar.
 *
 * Newton iteration with an exact tridiagonal Jacobian and residual-monotone
 * backtracking on the central-difference discretization of the scalar
 * elliptic density equation; Dirichlet data (rho_left, rho_right); initial
 * guess linear between the contacts. Phi_bar is then reconstructed by
 * integrating the steady momentum equation,
 *   Phi_bar_x = ((J^2/rho + P(rho))_x + J) / rho,
 * from phi_left, so Phi_bar(1) is an output in this mode. The Poisson defect
 * of the result is a consistency check, not an equation being solved.
 */
inline std::pair<SteadyState, SteadySolveReport> solve_given_current_report(
    const Grid& g, const PressureLaw& law, const DopingProfile& b, double rho_left,
    double rho_right, double J_bar, double phi_left, const SteadyOptions& opt = {}) {
    require_same_size(g, b.values, "solve_given_current(b)");
    if (!(rho_left > 0.0) || !(rho_right > 0.0))
        throw DomainError("steady: contact densities must be positive");

    const std::size_t n = g.n_nodes();
    const double h = g.h();
    const detail::EllipticOperator op{law, J_bar};

    GridFunction rho(n);
    for (std::size_t i = 0; i < n; ++i)
        rho[i] = rho_left + (rho_right - rho_left) * g.node(i);

    if (detail::subsonic_margin_of(law, rho, J_bar) <= 0.0)
        throw SupersonicError("steady: supersonic initial guess, |J_bar| too large");

    SteadySolveReport report;
    report.mode = "given-current";

    // The residual contains second differences of O(1) data divided by h^2,
    // so it cannot be evaluated below ~eps*|c2 rho|/h^2 in double precision.
    // The effective tolerance respects that floor on fine grids.
    const auto effective_tol = [&](const GridFunction& r) {
        double scale = 0.0;
        for (double v : r) scale = std::max(scale, std::abs(op.c2(v) * v));
        constexpr double eps = 2.220446049250313e-16;
        return std::max(opt.newton_tol, 4.0 * eps * scale / (h * h));
    };

    GridFunction res = op.residual(g, rho, b.values);
    double res_norm = norm_linf(res);
    report.residual_history.push_back(res_norm);

    int iter = 0;
    while (res_norm > effective_tol(rho)) {
        if (iter >= opt.max_iterations)
            throw ConvergenceError("steady: Newton stagnated after " +
                                   std::to_string(opt.max_iterations) + " iterations");
        ++iter;

        // Tridiagonal Jacobian of the interior residual.
        const std::size_t m = n - 2;
        std::vector<double> sub(m), dia(m), sup(m), rhs(m);
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t i = k + 1;
            const double d1 = (rho[i + 1] - rho[i - 1]) / (2.0 * h);
            const double d2 = (rho[i + 1] - 2.0 * rho[i] + rho[i - 1]) / (h * h);
            const double c2 = op.c2(rho[i]);
            const double off = (2.0 * op.q(rho[i]) * d1 + op.m(rho[i])) / (2.0 * h);
            sub[k] = c2 / (h * h) - off;
            sup[k] = c2 / (h * h) + off;
            dia[k] = -2.0 * c2 / (h * h) + op.q(rho[i]) * d2 + op.dq(rho[i]) * d1 * d1 +
                     op.dm(rho[i]) * d1 - 1.0;
            rhs[k] = -res[i];
        }
        const std::vector<double> delta = solve_tridiagonal(sub, dia, sup, rhs);

        // Backtracking: halve until the residual decreases and the iterate
        // stays positive and subsonic.
        double step = 1.0;
        GridFunction trial(n);
        bool accepted = false;
        for (int halving = 0; halving <= opt.max_halvings; ++halving) {
            trial = rho;
            for (std::size_t k = 0; k < m; ++k) trial[k + 1] += step * delta[k];
            bool positive = true;
            for (double v : trial)
                if (!(v > 0.0)) positive = false;
            if (positive) {
                const GridFunction trial_res = op.residual(g, trial, b.values);
                const double trial_norm = norm_linf(trial_res);
                if (trial_norm < res_norm || trial_norm <= effective_tol(trial)) {
                    rho = trial;
                    res = trial_res;
                    res_norm = trial_norm;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!accepted)
            throw ConvergenceError("steady: line search failed to reduce the residual");
        if (detail::subsonic_margin_of(law, rho, J_bar) <= 0.0)
            throw SupersonicError("steady: iterate left the subsonic region");
        report.residual_history.push_back(res_norm);
    }
    report.iterations = iter;

    SteadyState st;
    st.grid = g;
    st.rho_bar = rho;
    st.rho_bar_x = derivative(g, rho);
    st.J_bar = J_bar;
    st.subsonic_margin = detail::subsonic_margin_of(law, rho, J_bar);
    st.residual_norm = res_norm;

    // E_bar from the momentum equation, Phi_bar by cumulative trapezoid.
    GridFunction flux(n);
    for (std::size_t i = 0; i < n; ++i)
        flux[i] = J_bar * J_bar / rho[i] + law.p(rho[i]);
    const GridFunction flux_x = derivative(g, flux);
    st.E_bar.resize(n);
    for (std::size_t i = 0; i < n; ++i) st.E_bar[i] = (flux_x[i] + J_bar) / rho[i];
    st.Phi_bar.resize(n);
    st.Phi_bar[0] = phi_left;
    for (std::size_t i = 1; i < n; ++i)
        st.Phi_bar[i] = st.Phi_bar[i - 1] + 0.5 * h * (st.E_bar[i - 1] + st.E_bar[i]);

    report.mass_defect = integrate(g, rho) - integrate(g, b.values);
    return {st, report};
}

inline SteadyState solve_given_current(const Grid& g, const PressureLaw& law,
                                       const DopingProfile& b, double rho_left,
                                       double rho_right, double J_bar, double phi_left,
                                       const SteadyOptions& opt = {}) {
    return solve_given_current_report(g, law, b, rho_left, rho_right, J_bar, phi_left, opt)
        .first;
}

/**
 * Solves the steady state for prescribed boundary voltages by an outer
 * bisection (with secant acceleration) on J_bar until the attained Phi_bar(1)
 * matches phi_right. Requires a sign change of Phi_bar(1) - phi_right over
 * [-j_max, j_max].
 */
inline std::pair<SteadyState, SteadySolveReport> solve_given_voltage(
    const Grid& g, const PressureLaw& law, const DopingProfile& b,
    const BoundaryData& bd, const SteadyOptions& opt = {}) {
    bd.validate();

    const auto mismatch = [&](double J) {
        const SteadyState st = solve_given_current(g, law, b, bd.rho_left, bd.rho_right,
                                                   J, bd.phi_left, opt);
        return std::make_pair(st.Phi_bar.back() - bd.phi_right, st);
    };

    double lo = -opt.j_max, hi = opt.j_max;
    auto [flo, st_lo] = mismatch(lo);
    auto [fhi, st_hi] = mismatch(hi);
    int outer = 2;
    if (flo == 0.0) {
        auto rep = solve_given_current_report(g, law, b, bd.rho_left, bd.rho_right, lo,
                                              bd.phi_left, opt);
        rep.second.mode = "given-voltage";
        rep.second.outer_iterations = outer;
        return rep;
    }
    if (fhi == 0.0) {
        auto rep = solve_given_current_report(g, law, b, bd.rho_left, bd.rho_right, hi,
                                              bd.phi_left, opt);
        rep.second.mode = "given-voltage";
        rep.second.outer_iterations = outer;
        return rep;
    }
    if ((flo > 0.0) == (fhi > 0.0))
        throw BracketError("steady: no sign change of Phi(1) mismatch within |J| <= " +
                           std::to_string(opt.j_max));

    double J = lo, f = flo;
    double J_prev = hi, f_prev = fhi;
    for (int it = 0; it < 200; ++it) {
        // Secant candidate, falling back to bisection when it leaves the
        // bracket or the slope degenerates.
        double cand = 0.5 * (lo + hi);
        const double df = f - f_prev;
        if (df != 0.0) {
            const double secant = J - f * (J - J_prev) / df;
            if (secant > lo && secant < hi) cand = secant;
        }
        auto [fc, st_c] = mismatch(cand);
        ++outer;
        J_prev = J;
        f_prev = f;
        J = cand;
        f = fc;
        if (std::abs(fc) <= opt.voltage_tol) {
            auto rep = solve_given_current_report(g, law, b, bd.rho_left, bd.rho_right,
                                                  cand, bd.phi_left, opt);
            rep.second.mode = "given-voltage";
            rep.second.outer_iterations = outer;
            return rep;
        }
        if ((fc > 0.0) == (fhi > 0.0)) {
            hi = cand;
            fhi = fc;
        } else {
            lo = cand;
            flo = fc;
        }
    }
    throw ConvergenceError("steady: voltage iteration failed to converge");
}

} // namespace sep1d
