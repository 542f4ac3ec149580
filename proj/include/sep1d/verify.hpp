#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sep1d/diagnostics.hpp"
#include "sep1d/ensemble.hpp"
#include "sep1d/integrator.hpp"
#include "sep1d/model.hpp"
#include "sep1d/noise.hpp"
#include "sep1d/perturbation.hpp"
#include "sep1d/picard.hpp"
#include "sep1d/steady.hpp"

namespace sep1d::verify {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

inline CheckResult in_range(const std::string& name, double value, double lo, double hi) {
    return {name, value >= lo && value <= hi,
            num(value) + " in [" + num(lo) + ", " + num(hi) + "]"};
}

inline CheckResult at_most(const std::string& name, double value, double bound) {
    return {name, value <= bound, num(value) + " <= " + num(bound)};
}

inline CheckResult at_least(const std::string& name, double value, double bound) {
    return {name, value >= bound, num(value) + " >= " + num(bound)};
}

inline SteadyState bump_steady(std::size_t n, double jbar) {
    Grid g(n);
    PressureLaw law(2.0, 1.0);
    DopingProfile b = DopingProfile::bump(g, 1.0, 0.5, 0.25, 0.05);
    return solve_given_current(g, law, b, 1.0, 1.0, jbar, 0.0);
}

inline SteadyState flat_steady(std::size_t n, double jbar) {
    Grid g(n);
    PressureLaw law(2.0, 1.0);
    DopingProfile b = DopingProfile::constant(g, 1.0);
    return solve_given_current(g, law, b, 1.0, 1.0, jbar, 0.0);
}

} // namespace detail

// --- poisson ---------------------------------------------------------------

inline std::vector<CheckResult> suite_poisson() {
    std::vector<CheckResult> out;
    Grid g(200);
    DopingProfile b = DopingProfile::constant(g, 1.0);

    {
        RngStream rng(101, 0);
        GridFunction rho(g.n_nodes());
        for (double& v : rho) v = 1.0 + 0.5 * rng.uniform_pm1();
        GridFunction phi = solve_poisson(g, rho, b, -0.2, 0.7);
        const GridFunction lap = second_derivative(g, phi);
        double defect = 0.0;
        for (std::size_t i = 1; i + 1 < phi.size(); ++i)
            defect = std::max(defect, std::abs(lap[i] - (rho[i] - b.values[i])));
        out.push_back(detail::at_most("apply-back residual", defect, 1e-10));
    }
    {
        GridFunction rho(g.n_nodes(), 2.0);
        GridFunction phi = solve_poisson(g, rho, b, 0.0, 0.0);
        double err = 0.0;
        for (std::size_t i = 0; i < phi.size(); ++i) {
            const double x = g.node(i);
            err = std::max(err, std::abs(phi[i] - 0.5 * x * (x - 1.0)));
        }
        out.push_back(detail::at_most("quadratic exactness", err, 1e-12));
    }
    {
        GridFunction rho(g.n_nodes(), 1.0);
        GridFunction phi = solve_poisson(g, rho, b, 0.0, 1.0);
        double err = 0.0;
        for (std::size_t i = 0; i < phi.size(); ++i)
            err = std::max(err, std::abs(phi[i] - g.node(i)));
        out.push_back(detail::at_most("zero-source linearity", err, 1e-12));
    }
    return out;
}

// --- calculus ---------------------------------------------------------------

inline std::vector<CheckResult> suite_calculus() {
    constexpr double pi = 3.14159265358979323846;
    std::vector<CheckResult> out;

    const auto d1_err = [&](std::size_t n) {
        Grid g(n);
        GridFunction f(g.n_nodes());
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::sin(pi * g.node(i));
        const GridFunction d = derivative(g, f);
        double e = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i)
            e = std::max(e, std::abs(d[i] - pi * std::cos(pi * g.node(i))));
        return e;
    };
    const auto d2_err = [&](std::size_t n) {
        Grid g(n);
        GridFunction f(g.n_nodes());
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::sin(pi * g.node(i));
        const GridFunction d = second_derivative(g, f);
        double e = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i)
            e = std::max(e, std::abs(d[i] + pi * pi * std::sin(pi * g.node(i))));
        return e;
    };
    out.push_back(detail::in_range("first-derivative order-2 ratio",
                                   d1_err(100) / d1_err(200), 3.5, 4.5));
    out.push_back(detail::in_range("second-derivative order-2 ratio",
                                   d2_err(100) / d2_err(200), 3.5, 4.5));

    Grid g(200);
    GridFunction s(g.n_nodes()), q(g.n_nodes());
    for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = std::sin(pi * g.node(i));
        q[i] = g.node(i) * (1.0 - g.node(i));
    }
    out.push_back(detail::at_most("sin quadrature error",
                                  std::abs(integrate(g, s) - 2.0 / pi), 1e-4));
    const double l2 = norm_l2(g, q);
    out.push_back(detail::at_most("polynomial L2 error",
                                  std::abs(l2 * l2 - 1.0 / 30.0), 1e-6));

    RngStream rng(7, 7);
    bool monotone = true;
    for (int trial = 0; trial < 10; ++trial) {
        GridFunction f(g.n_nodes());
        for (double& v : f) v = rng.uniform_pm1();
        const Calculus c = grid_calculus(g, f);
        monotone = monotone && c.l2 <= c.h1 + 1e-15 && c.h1 <= c.h2 + 1e-15;
    }
    out.push_back({"Sobolev monotonicity", monotone, "L2 <= H1 <= H2 on random data"});
    return out;
}

// --- steady -----------------------------------------------------------------

inline std::vector<CheckResult> suite_steady() {
    std::vector<CheckResult> out;
    PressureLaw law(2.0, 1.0);
    {
        Grid g(200);
        DopingProfile b = DopingProfile::constant(g, 1.0);
        auto [st, rep] = solve_given_current_report(g, law, b, 1.0, 1.0, 0.0, 0.0);
        auto [momentum, poisson] = steady_residual(st, law, b);
        out.push_back(detail::at_most("trivial-case residual", st.residual_norm, 1e-12));
        out.push_back(detail::at_most("trivial-case mass defect",
                                      std::abs(rep.mass_defect), 1e-12));
        out.push_back(detail::at_most("trivial-case momentum defect", momentum, 1e-12));
        out.push_back(detail::at_most("trivial-case poisson defect", poisson, 1e-12));
    }
    {
        const SteadyState a = detail::bump_steady(100, 0.01);
        const SteadyState bb = detail::bump_steady(200, 0.01);
        const SteadyState c = detail::bump_steady(400, 0.01);
        double d1 = 0.0, d2 = 0.0;
        for (std::size_t i = 0; i <= 100; ++i)
            d1 = std::max(d1, std::abs(a.rho_bar[i] - bb.rho_bar[2 * i]));
        for (std::size_t i = 0; i <= 200; ++i)
            d2 = std::max(d2, std::abs(bb.rho_bar[i] - c.rho_bar[2 * i]));
        out.push_back(detail::in_range("refinement Richardson ratio", d1 / d2, 3.5, 4.5));
    }
    {
        Grid g(150);
        DopingProfile b = DopingProfile::bump(g, 1.0, 0.4, 0.2, 0.08);
        BoundaryData bd;
        bd.rho_right = 1.05;
        bd.phi_right = 0.04;
        auto [st, rep] = solve_given_voltage(g, law, b, bd);
        const SteadyState again = solve_given_current(g, law, b, bd.rho_left,
                                                      bd.rho_right, st.J_bar, bd.phi_left);
        double drho = 0.0;
        for (std::size_t i = 0; i < st.rho_bar.size(); ++i)
            drho = std::max(drho, std::abs(again.rho_bar[i] - st.rho_bar[i]));
        out.push_back(detail::at_most("voltage/current round trip", drho, 1e-8));
        out.push_back(detail::at_most("attained voltage mismatch",
                                      std::abs(st.Phi_bar.back() - bd.phi_right), 1e-9));
    }
    {
        Grid g(50);
        DopingProfile b = DopingProfile::constant(g, 1.0);
        bool threw = false;
        try {
            solve_given_current(g, law, b, 1.0, 1.0, 1.5, 0.0);
        } catch (const SupersonicError&) {
            threw = true;
        }
        out.push_back({"supersonic current rejected", threw, "SupersonicError raised"});
    }
    return out;
}

// --- symmetrizer ------------------------------------------------------------

inline std::vector<CheckResult> suite_symmetrizer() {
    std::vector<CheckResult> out;
    {
        PressureLaw law(2.0, 1.0);
        SteadyState st = detail::flat_steady(100, 0.0);
        const GridFunction rt = second_order_symmetrizer(st, law, 1.0);
        double err = 0.0;
        for (std::size_t i = 0; i < rt.size(); ++i)
            err = std::max(err, std::abs(rt[i] - (1.0 + st.grid.node(i) / 3.0)));
        out.push_back(detail::at_most("constant-state r_tilde = 1 + x/3", err, 1e-10));
    }
    {
        PressureLaw law(2.0, 0.5);
        Grid g(100);
        DopingProfile b = DopingProfile::constant(g, 1.0);
        SteadyState st = solve_given_current(g, law, b, 1.0, 1.0, 0.0, 0.0);
        const GridFunction rt = second_order_symmetrizer(st, law, 1.0);
        double err = 0.0;
        for (std::size_t i = 0; i < rt.size(); ++i)
            err = std::max(err, std::abs(rt[i] - (1.0 + 2.0 * g.node(i) / 3.0)));
        out.push_back(detail::at_most("constant-state r_tilde = 1 + 2x/3", err, 1e-10));
    }
    {
        const double eps = 1e-3;
        PressureLaw law(2.0, 1.0);
        SteadyState st = detail::flat_steady(200, eps);
        const GridFunction r = first_order_symmetrizer(st, law, 1.0);
        double err = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i)
            err = std::max(err, std::abs(r[i] - std::exp(eps * st.grid.node(i) /
                                                         (eps * eps - 2.0))));
        out.push_back(detail::at_most("constant-state r closed form", err, 1e-12));
    }
    {
        PressureLaw law(2.0, 1.0);
        SteadyState st = detail::bump_steady(400, 0.01);
        const Grid& g = st.grid;
        const GridFunction r = first_order_symmetrizer(st, law, 1.0);
        const GridFunction r_x = derivative(g, r);
        double res1 = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            const double rb = st.rho_bar[i];
            const double rbx = st.rho_bar_x[i];
            const double J = st.J_bar;
            const double a = J * J / (rb * rb) - law.dp(rb);
            const double gg = 3.0 * J * J * rbx / (rb * rb * rb) + law.d2p(rb) * rbx -
                              law.dp(rb) * rbx / rb - J / rb;
            res1 = std::max(res1, std::abs(a * r_x[i] + gg * r[i]));
        }
        out.push_back(detail::at_most("first-order ODE residual at N=400", res1, 1e-6));

        const GridFunction rt = second_order_symmetrizer(st, law, 1.0);
        const GridFunction rt_x = derivative(g, rt);
        GridFunction s(r.size());
        for (std::size_t i = 0; i < s.size(); ++i)
            s[i] = law.dp(st.rho_bar[i]) -
                   st.J_bar * st.J_bar / (st.rho_bar[i] * st.rho_bar[i]);
        const GridFunction s_x = derivative(g, s);
        double res2 = 0.0;
        for (std::size_t i = 0; i < rt.size(); ++i) {
            const double rb = st.rho_bar[i];
            const double rbx = st.rho_bar_x[i];
            const double G = (5.0 * s_x[i] - 2.0 * st.J_bar * st.J_bar * rbx /
                                                 (rb * rb * rb) +
                              law.d2p(rb) * rbx - st.E_bar[i]) /
                             (3.0 * s[i]);
            const double M = -2.0 / (3.0 * s[i]);
            res2 = std::max(res2, std::abs(rt_x[i] + G * rt[i] + M));
        }
        out.push_back(detail::at_most("second-order ODE residual at N=400", res2, 1e-6));

        double rmin = r[0], rtmin = rt[0];
        for (double v : r) rmin = std::min(rmin, v);
        for (double v : rt) rtmin = std::min(rtmin, v);
        out.push_back(detail::at_least("min r", rmin, 1e-12));
        out.push_back(detail::at_least("min r_tilde", rtmin, 1e-12));
    }
    return out;
}

// --- coefficients -----------------------------------------------------------

inline std::vector<CheckResult> suite_coefficients() {
    constexpr double pi = 3.14159265358979323846;
    std::vector<CheckResult> out;
    PressureLaw law(2.0, 1.0);
    SteadyState st = detail::flat_steady(128, 0.05);
    const Grid& g = st.grid;

    const auto mode_pert = [&](double a) {
        PerturbationState p;
        p.sigma.resize(g.n_nodes());
        p.j.resize(g.n_nodes());
        for (std::size_t i = 0; i < p.sigma.size(); ++i) {
            const double x = g.node(i);
            p.sigma[i] = a * (std::sin(pi * x) + 0.4 * std::sin(2.0 * pi * x));
            p.j[i] = a * (std::cos(pi * x) - 0.3 * std::cos(3.0 * pi * x));
        }
        p.e_tilde = efield_of_sigma(g, p.sigma);
        return p;
    };

    {
        PerturbationState zero;
        zero.sigma.assign(g.n_nodes(), 0.0);
        zero.j.assign(g.n_nodes(), 0.0);
        zero.e_tilde.assign(g.n_nodes(), 0.0);
        const CoefficientFields c = assemble_coefficients(zero, st, law);
        double n2max = 0.0;
        bool structure = true;
        for (std::size_t i = 0; i < c.n2.size(); ++i) {
            n2max = std::max(n2max, std::abs(c.n2[i]));
            const auto A = c.A_at(i);
            structure = structure && A[0][0] == 0.0 && A[0][1] == 1.0 &&
                        c.B_at(i)[0][0] == 0.0 && c.C_at(i)[0] == 0.0;
        }
        out.push_back(detail::at_most("zero-state defect", n2max, 1e-13));
        out.push_back({"matrix structure", structure, "A = [[0,1],[*,*]], B/C row 0 = 0"});
    }
    {
        const PerturbationState p = mode_pert(0.05);
        const CoefficientFields c = assemble_coefficients(p, st, law);
        const GridFunction sx = derivative(g, p.sigma);
        const GridFunction jx = derivative(g, p.j);
        GridFunction flux(g.n_nodes());
        for (std::size_t i = 0; i < flux.size(); ++i) {
            const double rho = st.rho_bar[i] + p.sigma[i];
            const double J = st.J_bar + p.j[i];
            flux[i] = J * J / rho + law.p(rho);
        }
        const GridFunction flux_x = derivative(g, flux);
        double gap = 0.0;
        for (std::size_t i = 0; i < flux.size(); ++i) {
            const double rho = st.rho_bar[i] + p.sigma[i];
            const double J = st.J_bar + p.j[i];
            const double full = -flux_x[i] - J + rho * (st.E_bar[i] + p.e_tilde[i]);
            const double matrix = -c.a21[i] * sx[i] - c.a22[i] * jx[i] -
                                  c.b21[i] * p.sigma[i] - c.b22[i] * p.j[i] - c.c2[i] +
                                  c.n2[i];
            gap = std::max(gap, std::abs(matrix - full));
        }
        out.push_back(detail::at_most("drift consistency with full state", gap, 1e-11));
    }
    {
        SteadyState st0 = detail::flat_steady(200, 0.0);
        const auto defect_norm = [&](double a) {
            PerturbationState p;
            p.sigma.resize(st0.grid.n_nodes());
            p.j.resize(st0.grid.n_nodes());
            for (std::size_t i = 0; i < p.sigma.size(); ++i) {
                const double x = st0.grid.node(i);
                p.sigma[i] = a * (std::sin(pi * x) + 0.4 * std::sin(2.0 * pi * x));
                p.j[i] = a * (std::cos(pi * x) - 0.3 * std::cos(3.0 * pi * x));
            }
            p.e_tilde = efield_of_sigma(st0.grid, p.sigma);
            return norm_linf(assemble_coefficients(p, st0, law).n2);
        };
        out.push_back(detail::in_range("defect amplitude-halving ratio",
                                       defect_norm(0.02) / defect_norm(0.01), 3.5, 4.5));
    }
    return out;
}

// --- noise -------------------------------------------------------------------

inline std::vector<CheckResult> suite_noise() {
    std::vector<CheckResult> out;
    const double nu = 0.05, dt = 1e-3;
    {
        NoiseModel n = NoiseModel::make(nu, 16);
        out.push_back(detail::at_most("weight normalization",
                                      std::abs(n.sum_weights_sq() - 1.0),
                                      std::pow(2.0, -16.0)));
        double worst = 0.0;
        const double d = 1e-5;
        for (int k = -300; k <= 300; ++k) {
            const double J = 0.1 * k;
            worst = std::max(worst, std::abs(n.shape(J)) - nu * std::abs(J));
            const double y1 = (n.shape(J + d) - n.shape(J - d)) / (2.0 * d);
            worst = std::max(worst, std::abs(y1) - 2.0 * nu);
            const double y2 =
                (n.shape(J + d) - 2.0 * n.shape(J) + n.shape(J - d)) / (d * d);
            worst = std::max(worst, std::abs(y2) - 4.0 * nu);
        }
        out.push_back(detail::at_most("shape bound excess", worst, 1e-4));
    }
    {
        NoiseModel n = NoiseModel::make(nu, 16, NoiseReduction::KModes);
        RngStream rng(314, 1);
        const std::size_t samples = 100000;
        GridFunction one(1, 1.0);
        double mean = 0.0, var = 0.0;
        std::vector<double> xs(samples);
        for (std::size_t s = 0; s < samples; ++s) {
            xs[s] = sample_noise_increment(n, one, dt, rng)[0];
            mean += xs[s];
        }
        mean /= static_cast<double>(samples);
        for (double v : xs) var += (v - mean) * (v - mean);
        var /= static_cast<double>(samples - 1);
        const double y = nu * 1.0 / 2.0;
        const double expected = y * y * dt * n.sum_weights_sq();
        const double se = expected * std::sqrt(2.0 / static_cast<double>(samples - 1));
        out.push_back(detail::at_most("variance deviation (in SE units)",
                                      std::abs(var - expected) / se, 3.0));
    }
    {
        NoiseModel km = NoiseModel::make(nu, 16, NoiseReduction::KModes);
        NoiseModel sb = NoiseModel::make(nu, 16, NoiseReduction::SingleBrownian);
        RngStream r1(2718, 0), r2(2718, 1);
        const std::size_t samples = 100000;
        GridFunction one(1, 1.0);
        std::vector<double> a(samples), b(samples);
        for (std::size_t s = 0; s < samples; ++s) {
            a[s] = sample_noise_increment(km, one, dt, r1)[0];
            b[s] = sample_noise_increment(sb, one, dt, r2)[0];
        }
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        double d = 0.0;
        std::size_t i = 0, k = 0;
        while (i < a.size() && k < b.size()) {
            if (a[i] <= b[k])
                ++i;
            else
                ++k;
            d = std::max(d, std::abs(static_cast<double>(i) - static_cast<double>(k)) /
                                static_cast<double>(samples));
        }
        const double crit = 1.6276 * std::sqrt(2.0 / static_cast<double>(samples));
        out.push_back(detail::at_most("KS statistic vs 1% critical value", d, crit));
    }
    {
        NoiseModel n = NoiseModel::make(nu);
        RngStream rng(5, 5);
        GridFunction zero(16, 0.0);
        const GridFunction dM = sample_noise_increment(n, zero, dt, rng);
        out.push_back(detail::at_most("zero-current increment", norm_linf(dM), 0.0));
    }
    return out;
}

// --- integrator ---------------------------------------------------------------

inline std::vector<CheckResult> suite_integrator() {
    std::vector<CheckResult> out;
    PressureLaw law(2.0, 1.0);
    NoiseModel off = NoiseModel::make(0.0);

    {
        Grid g(100);
        DopingProfile b = DopingProfile::constant(g, 1.0);
        SteadyState st = solve_given_current(g, law, b, 1.0, 1.0, 0.02, 0.0);
        FlowField f;
        f.rho = st.rho_bar;
        f.J.assign(g.n_nodes(), st.J_bar);
        f.Phi = solve_poisson(g, f.rho, b, st.Phi_bar.front(), st.Phi_bar.back());
        f.E = electric_field(g, f.Phi);
        BoundaryData bd{1.0, 1.0, st.Phi_bar.front(), st.Phi_bar.back()};
        RngStream rng(1, 0);
        const double dt = cfl_dt(g, f, law, 0.4);
        const FlowField f1 = step(f, g, law, b, bd, off, dt, rng);
        double drift = 0.0;
        for (std::size_t i = 0; i < f.rho.size(); ++i) {
            drift = std::max(drift, std::abs(f1.rho[i] - f.rho[i]));
            drift = std::max(drift, std::abs(f1.J[i] - f.J[i]));
        }
        out.push_back(detail::at_most("constant steady state fixed point", drift, 1e-14));
    }
    {
        const auto drift_at = [&](std::size_t n) {
            Grid g(n);
            DopingProfile b = DopingProfile::bump(g, 1.0, 0.5, 0.25, 0.05);
            SteadyState st = solve_given_current(g, law, b, 1.0, 1.0, 0.01, 0.0);
            FlowField f;
            f.rho = st.rho_bar;
            f.J.assign(g.n_nodes(), st.J_bar);
            f.Phi = solve_poisson(g, f.rho, b, st.Phi_bar.front(), st.Phi_bar.back());
            f.E = electric_field(g, f.Phi);
            BoundaryData bd{1.0, 1.0, st.Phi_bar.front(), st.Phi_bar.back()};
            RngStream rng(1, 0);
            const double dt = cfl_dt(g, f, law, 0.4);
            const FlowField f1 = step(f, g, law, b, bd, off, dt, rng);
            double d = 0.0;
            for (std::size_t i = 0; i < f.rho.size(); ++i) {
                d = std::max(d, std::abs(f1.rho[i] - f.rho[i]));
                d = std::max(d, std::abs(f1.J[i] - f.J[i]));
            }
            return d;
        };
        out.push_back(detail::in_range("per-step steady drift order-2 ratio",
                                       drift_at(100) / drift_at(200), 3.0, 5.0));
    }
    {
        Grid g(64);
        DopingProfile b = DopingProfile::constant(g, 1.0);
        SteadyState st = solve_given_current(g, law, b, 1.0, 1.0, 0.01, 0.0);
        NoiseModel noise = NoiseModel::make(0.05);
        BoundaryData bd{1.0, 1.0, st.Phi_bar.front(), st.Phi_bar.back()};
        RngStream rng(99, 7);
        FlowField f = initial_perturbation(g, st, law, b, 1e-2, 4, rng);
        double worst = 0.0;
        for (int k = 0; k < 25; ++k) {
            const double dt = cfl_dt(g, f, law, 0.4);
            f = step(f, g, law, b, bd, noise, dt, rng);
            worst = std::max(worst, std::abs(f.rho.front() - 1.0));
            worst = std::max(worst, std::abs(f.rho.back() - 1.0));
            const std::size_t n = f.J.size();
            worst = std::max(worst, std::abs((-3.0 * f.J[0] + 4.0 * f.J[1] - f.J[2]) /
                                             (2.0 * g.h())));
            worst = std::max(worst,
                             std::abs((3.0 * f.J[n - 1] - 4.0 * f.J[n - 2] + f.J[n - 3]) /
                                      (2.0 * g.h())));
        }
        out.push_back(detail::at_most("boundary enforcement", worst, 1e-12));
    }
    {
        Grid g(16);
        DopingProfile b = DopingProfile::constant(g, 1.3);
        BoundaryData bd{1.3, 1.3, 0.0, 0.0};
        NoiseModel noise = NoiseModel::make(0.4);
        FlowField f;
        f.rho.assign(g.n_nodes(), 1.3);
        f.J.assign(g.n_nodes(), 0.8);
        f.Phi = solve_poisson(g, f.rho, b, 0.0, 0.0);
        f.E = electric_field(g, f.Phi);
        RngStream ra(55, 3), rb(55, 3);
        double J = 0.8, gap = 0.0;
        for (int k = 0; k < 40; ++k) {
            f = step(f, g, law, b, bd, noise, 1e-3, ra);
            J = scalar_momentum_step(J, noise, 1e-3, rb);
            for (double v : f.J) gap = std::max(gap, std::abs(v - J));
        }
        out.push_back(detail::at_most("flat-state scalar reduction", gap, 1e-14));
    }
    {
        // Mean of the scalar reduction against J0 e^{-t}.
        NoiseModel noise = NoiseModel::make(0.05);
        const double dt = 5e-4, T = 1.0;
        const std::size_t paths = 2000, steps = static_cast<std::size_t>(T / dt);
        double sum = 0.0, sumsq = 0.0;
        for (std::size_t p = 0; p < paths; ++p) {
            RngStream rng(4242, p);
            double J = 1.0;
            for (std::size_t m = 0; m < steps; ++m)
                J = scalar_momentum_step(J, noise, dt, rng);
            sum += J;
            sumsq += J * J;
        }
        const double mean = sum / paths;
        const double var = (sumsq - paths * mean * mean) / (paths - 1.0);
        const double se = std::sqrt(var / paths);
        out.push_back(detail::at_most("scalar mean deviation (SE units)",
                                      std::abs(mean - std::exp(-T)) / se, 3.0));
    }
    return out;
}

// --- identity -----------------------------------------------------------------

inline std::vector<CheckResult> suite_identity() {
    std::vector<CheckResult> out;
    PressureLaw law(2.0, 1.0);
    NoiseModel off = NoiseModel::make(0.0);

    const auto defect_at = [&](std::size_t n, double eps, bool reconstruct) {
        Grid g(n);
        DopingProfile b = DopingProfile::constant(g, 1.0);
        SteadyState st = solve_given_current(g, law, b, 1.0, 1.0, 0.01, 0.0);
        IntegratorConfig cfg;
        cfg.t_end = 0.2;
        cfg.snapshot_every = 1;
        cfg.reconstruct = reconstruct;
        RngStream rng(31, 0);
        FlowField f = initial_perturbation(g, st, law, b, eps, 3, rng);
        PathRecord rec = simulate(f, g, cfg, law, b, st, off, rng);
        return efield_identity_defect(rec.snapshots, st);
    };

    out.push_back(detail::at_most("steady-trajectory defect", defect_at(100, 0.0, false),
                                  1e-8));
    const double d1 = defect_at(25, 1e-3, true);
    const double d2 = defect_at(50, 1e-3, true);
    const double d3 = defect_at(100, 1e-3, true);
    out.push_back(detail::at_least("refinement ratio level 1", d1 / d2, 2.0));
    out.push_back(detail::at_least("refinement ratio level 2", d2 / d3, 2.0));

    {
        Grid g(100);
        DopingProfile b = DopingProfile::constant(g, 1.0);
        SteadyState st = solve_given_current(g, law, b, 1.0, 1.0, 0.01, 0.0);
        IntegratorConfig cfg;
        cfg.t_end = 0.05;
        cfg.snapshot_every = 1;
        RngStream rng(13, 0);
        FlowField f = initial_perturbation(g, st, law, b, 0.1, 2, rng);
        PathRecord rec = simulate(f, g, cfg, law, b, st, off, rng);
        rec.snapshots[1].second.Phi = rec.snapshots[0].second.Phi;
        rec.snapshots[1].second.E = rec.snapshots[0].second.E;
        out.push_back(detail::at_least("stale-potential detection",
                                       efield_identity_defect(rec.snapshots, st), 1e-3));
    }
    return out;
}

// --- picard --------------------------------------------------------------------

inline std::vector<CheckResult> suite_picard() {
    std::vector<CheckResult> out;
    PressureLaw law(2.0, 1.0);
    Grid g(100);
    DopingProfile b = DopingProfile::constant(g, 1.0);
    SteadyState st = solve_given_current(g, law, b, 1.0, 1.0, 0.01, 0.0);

    {
        NoiseModel off = NoiseModel::make(0.0);
        PerturbationState zero;
        zero.sigma.assign(g.n_nodes(), 0.0);
        zero.j.assign(g.n_nodes(), 0.0);
        zero.e_tilde.assign(g.n_nodes(), 0.0);
        FrozenNoisePath path;
        path.scales.assign(20, 0.0);
        const PerturbationTrajectory next =
            picard_iterate(constant_trajectory(zero, 20), st, law, off, path, 1e-3);
        double sup = 0.0;
        for (const PerturbationState& w : next)
            sup = std::max({sup, norm_linf(w.sigma), norm_linf(w.j)});
        out.push_back(detail::at_most("zero data stays zero", sup, 0.0));
    }
    {
        NoiseModel noise = NoiseModel::make(0.02);
        RngStream init_rng(99, 0);
        FlowField f0 = initial_perturbation(g, st, law, b, 1e-2, 3, init_rng);
        const PerturbationState w0 = perturbation_of(st, f0);
        const double dt = 0.5 * cfl_dt(g, f0, law, 0.4);
        const std::size_t steps = static_cast<std::size_t>(0.25 / dt);
        RngStream path_rng(99, 1);
        const FrozenNoisePath path = draw_noise_path(steps, noise, path_rng);

        std::vector<PerturbationTrajectory> iters;
        iters.push_back(constant_trajectory(w0, steps));
        for (int n = 0; n < 5; ++n)
            iters.push_back(picard_iterate(iters.back(), st, law, noise, path, dt));
        std::vector<double> dist;
        for (std::size_t n = 1; n < iters.size(); ++n)
            dist.push_back(trajectory_distance_h2(g, iters[n], iters[n - 1]));
        double worst_ratio = 0.0;
        for (std::size_t n = 1; n < dist.size(); ++n)
            worst_ratio = std::max(worst_ratio, dist[n] / dist[n - 1]);
        out.push_back(detail::at_most("contraction factor", worst_ratio, 1.0));

        // Fixed point against the nonlinear integrator on the same noise path.
        BoundaryData bd{st.rho_bar.front(), st.rho_bar.back(), st.Phi_bar.front(),
                        st.Phi_bar.back()};
        PerturbationTrajectory reference(steps + 1);
        reference[0] = w0;
        RngStream rng(99, 1);
        FlowField f = f0;
        for (std::size_t m = 0; m < steps; ++m) {
            f = step(f, g, law, b, bd, noise, dt, rng);
            reference[m + 1] = perturbation_of(st, f);
        }
        PerturbationTrajectory it = constant_trajectory(w0, steps);
        for (int n = 0; n < 8; ++n) it = picard_iterate(it, st, law, noise, path, dt);
        out.push_back(detail::at_most("limit matches nonlinear trajectory",
                                      trajectory_distance_h2(g, it, reference), 1e-10));
    }
    return out;
}

// --- fit ------------------------------------------------------------------------

inline std::vector<CheckResult> suite_fit() {
    std::vector<CheckResult> out;
    {
        std::vector<double> t, y;
        for (double s = 0.0; s <= 20.0 + 1e-12; s += 0.1) {
            t.push_back(s);
            y.push_back(5.0 * std::exp(-0.3 * s));
        }
        const DecayFit f = fit_decay(t, y, 0.0, 20.0);
        out.push_back(detail::at_most("synthetic rate error",
                                      std::abs(f.zeta_hat - 0.3), 1e-10));
        out.push_back(detail::at_least("synthetic r2", f.r_squared, 1.0 - 1e-12));
    }
    {
        RngStream rng(42, 0);
        std::vector<double> t, y;
        for (double s = 0.0; s <= 20.0 + 1e-12; s += 0.1) {
            t.push_back(s);
            y.push_back(5.0 * std::exp(-0.3 * s) * (1.0 + 0.01 * rng.uniform_pm1()));
        }
        const DecayFit f = fit_decay(t, y, 0.0, 20.0);
        out.push_back(detail::at_most("noisy rate relative error",
                                      std::abs(f.zeta_hat - 0.3) / 0.3, 0.05));
        out.push_back(detail::at_least("noisy r2", f.r_squared, 0.99));
    }
    {
        std::vector<double> t, y;
        for (double s = 0.0; s <= 5.0 + 1e-12; s += 0.1) {
            t.push_back(s);
            y.push_back(2.0);
        }
        out.push_back(detail::at_most("constant-series rate",
                                      std::abs(fit_decay(t, y, 0.0, 5.0).zeta_hat),
                                      1e-12));
    }
    {
        std::vector<std::pair<int, DecayFit>> fits;
        fits.emplace_back(1, DecayFit{0.3, 1.0, 1.0});
        fits.emplace_back(2, DecayFit{0.5, 1.0, 1.0});
        fits.emplace_back(3, DecayFit{0.9, 1.0, 1.0});
        const auto rows = moment_scaling_report(fits);
        out.push_back({"scaling flags", rows[1].consistent && rows[2].consistent &&
                                            std::abs(rows[1].ratio - 0.5 / 0.6) < 1e-12,
                       "ratio table computed"});
    }
    return out;
}

// --- decay (deterministic stability at criterion scale) -----------------------

inline std::vector<CheckResult> suite_decay() {
    std::vector<CheckResult> out;
    PressureLaw law(2.0, 1.0);
    Grid g(200);
    DopingProfile b = DopingProfile::constant(g, 1.0);
    SteadyState st = solve_given_current(g, law, b, 1.0, 1.0, 0.01, 0.0);
    NoiseModel off = NoiseModel::make(0.0);
    IntegratorConfig cfg;
    cfg.t_end = 10.0;
    RngStream rng(2025, 0);
    FlowField f = initial_perturbation(g, st, law, b, 1e-2, 4, rng);
    const PathRecord rec = simulate(f, g, cfg, law, b, st, off, rng);

    const double e0 = rec.frames.front().rel_energy;
    const double eT = rec.frames.back().rel_energy;
    out.push_back(detail::at_most("relative energy fraction at T", eT / e0, 0.01));

    std::vector<double> t, y;
    for (const DiagnosticFrame& fr : rec.frames) {
        t.push_back(fr.t);
        y.push_back(fr.composite);
    }
    const DecayFit fit = fit_decay(t, y, 2.5, 7.5);
    out.push_back(detail::at_least("composite log-linear r2", fit.r_squared, 0.9));
    out.push_back(detail::at_least("fitted decay rate", fit.zeta_hat, 1e-12));

    // After a transient of at most one time unit the energy is nonincreasing
    // (tolerance 1e-10 per step).
    double worst_increase = 0.0;
    for (std::size_t k = 1; k < rec.frames.size(); ++k)
        if (rec.frames[k].t > 1.0)
            worst_increase = std::max(
                worst_increase, rec.frames[k].rel_energy - rec.frames[k - 1].rel_energy);
    out.push_back(detail::at_most("post-transient energy increase per step",
                                  worst_increase, 1e-10));
    return out;
}

// --- registry -------------------------------------------------------------------

inline const std::map<std::string, std::vector<CheckResult> (*)()>& suites() {
    static const std::map<std::string, std::vector<CheckResult> (*)()> table = {
        {"poisson", &suite_poisson},       {"calculus", &suite_calculus},
        {"steady", &suite_steady},         {"symmetrizer", &suite_symmetrizer},
        {"coefficients", &suite_coefficients}, {"noise", &suite_noise},
        {"integrator", &suite_integrator}, {"identity", &suite_identity},
        {"picard", &suite_picard},         {"fit", &suite_fit},
        {"decay", &suite_decay},
    };
    return table;
}

inline std::vector<std::string> suite_names() {
    std::vector<std::string> names;
    for (const auto& [name, fn] : suites()) names.push_back(name);
    return names;
}

inline std::vector<CheckResult> run_suite(const std::string& name) {
    const auto it = suites().find(name);
    if (it == suites().end()) throw ConfigError("verify: unknown suite '" + name + "'");
    return it->second();
}

} // namespace sep1d::verify
