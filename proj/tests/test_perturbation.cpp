#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sep1d/perturbation.hpp"
#include "sep1d/steady.hpp"

using namespace sep1d;

namespace {
constexpr double pi = 3.14159265358979323846;

SteadyState constant_steady(std::size_t n, double jbar, double kappa = 1.0) {
    Grid g(n);
    PressureLaw law(2.0, kappa);
    DopingProfile b = DopingProfile::constant(g, 1.0);
    return solve_given_current(g, law, b, 1.0, 1.0, jbar, 0.0);
}

SteadyState bump_steady(std::size_t n, double jbar) {
    Grid g(n);
    PressureLaw law(2.0, 1.0);
    DopingProfile b = DopingProfile::bump(g, 1.0, 0.5, 0.25, 0.05);
    return solve_given_current(g, law, b, 1.0, 1.0, jbar, 0.0);
}

PerturbationState smooth_perturbation(const Grid& g, double amplitude) {
    PerturbationState p;
    p.sigma.resize(g.n_nodes());
    p.j.resize(g.n_nodes());
    for (std::size_t i = 0; i < p.sigma.size(); ++i) {
        const double x = g.node(i);
        p.sigma[i] = amplitude * (std::sin(pi * x) + 0.4 * std::sin(2.0 * pi * x));
        p.j[i] = amplitude * (std::cos(pi * x) - 0.3 * std::cos(3.0 * pi * x));
    }
    p.e_tilde = efield_of_sigma(g, p.sigma);
    return p;
}
} // namespace

TEST_CASE("advection matrix structure and values", "[perturbation]") {
    SteadyState st = constant_steady(50, 0.0);
    PressureLaw law(2.0, 1.0);
    PerturbationState p;
    p.sigma.assign(st.rho_bar.size(), 0.0);
    p.j.assign(st.rho_bar.size(), 0.1); // full state (rho, J) = (1, 0.1)
    p.e_tilde.assign(st.rho_bar.size(), 0.0);

    CoefficientFields c = assemble_coefficients(p, st, law);
    for (std::size_t i = 0; i < st.rho_bar.size(); ++i) {
        auto A = c.A_at(i);
        REQUIRE(A[0][0] == 0.0);
        REQUIRE(A[0][1] == 1.0);
        REQUIRE(A[1][0] == Catch::Approx(1.99).margin(1e-12));
        REQUIRE(A[1][1] == Catch::Approx(0.2).margin(1e-12));
        REQUIRE(c.B_at(i)[0][0] == 0.0);
        REQUIRE(c.B_at(i)[0][1] == 0.0);
        REQUIRE(c.C_at(i)[0] == 0.0);
    }
}

TEST_CASE("zero perturbation has zero defect and coupling", "[perturbation]") {
    SteadyState st = bump_steady(100, 0.02);
    PressureLaw law(2.0, 1.0);
    PerturbationState p;
    p.sigma.assign(st.rho_bar.size(), 0.0);
    p.j.assign(st.rho_bar.size(), 0.0);
    p.e_tilde.assign(st.rho_bar.size(), 0.0);
    CoefficientFields c = assemble_coefficients(p, st, law);
    for (std::size_t i = 0; i < c.n2.size(); ++i) {
        REQUIRE(std::abs(c.n2[i]) < 1e-13);
        REQUIRE(c.c2[i] == 0.0);
    }
}

TEST_CASE("matrix system reproduces the full-state momentum drift", "[perturbation]") {
    // On a constant steady state the discrete steady momentum identity is
    // exact, so the perturbation-route drift must match the drift computed
    // from the full state to rounding.
    SteadyState st = constant_steady(128, 0.05);
    const Grid& g = st.grid;
    PressureLaw law(2.0, 1.0);
    PerturbationState p = smooth_perturbation(g, 0.05);

    CoefficientFields c = assemble_coefficients(p, st, law);
    const GridFunction sx = derivative(g, p.sigma);
    const GridFunction jx = derivative(g, p.j);

    // Full-state route: -(J^2/rho + P)_x - J + rho (E_bar + e_tilde).
    GridFunction flux(g.n_nodes());
    for (std::size_t i = 0; i < flux.size(); ++i) {
        const double rho = st.rho_bar[i] + p.sigma[i];
        const double J = st.J_bar + p.j[i];
        flux[i] = J * J / rho + law.p(rho);
    }
    const GridFunction flux_x = derivative(g, flux);
    for (std::size_t i = 0; i < flux.size(); ++i) {
        const double rho = st.rho_bar[i] + p.sigma[i];
        const double J = st.J_bar + p.j[i];
        const double full = -flux_x[i] - J + rho * (st.E_bar[i] + p.e_tilde[i]);
        const double matrix = -c.a21[i] * sx[i] - c.a22[i] * jx[i] -
                              c.b21[i] * p.sigma[i] - c.b22[i] * p.j[i] - c.c2[i] +
                              c.n2[i];
        REQUIRE(matrix == Catch::Approx(full).margin(1e-11));
    }
}

TEST_CASE("defect is quadratically small for zero current", "[perturbation]") {
    SteadyState st = constant_steady(200, 0.0);
    PressureLaw law(2.0, 1.0);
    const auto defect_norm = [&](double a) {
        PerturbationState p = smooth_perturbation(st.grid, a);
        return norm_linf(assemble_coefficients(p, st, law).n2);
    };
    const double ratio = defect_norm(0.02) / defect_norm(0.01);
    REQUIRE(ratio > 3.5);
    REQUIRE(ratio < 4.5);
}

TEST_CASE("vacuum states are rejected", "[perturbation]") {
    SteadyState st = constant_steady(40, 0.0);
    PressureLaw law(2.0, 1.0);
    PerturbationState p;
    p.sigma.assign(st.rho_bar.size(), -1.5);
    p.j.assign(st.rho_bar.size(), 0.0);
    p.e_tilde.assign(st.rho_bar.size(), 0.0);
    REQUIRE_THROWS_AS(assemble_coefficients(p, st, law), VacuumError);
}

TEST_CASE("first symmetrizer is constant on the zero-current constant state",
          "[perturbation]") {
    SteadyState st = constant_steady(100, 0.0);
    PressureLaw law(2.0, 1.0);
    GridFunction r = first_order_symmetrizer(st, law, 2.0);
    for (double v : r) REQUIRE(v == Catch::Approx(2.0).margin(1e-14));
}

TEST_CASE("first symmetrizer closed form for small constant current",
          "[perturbation]") {
    const double eps = 1e-3;
    SteadyState st = constant_steady(200, eps);
    PressureLaw law(2.0, 1.0);
    GridFunction r = first_order_symmetrizer(st, law, 1.0);
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double x = st.grid.node(i);
        // Exact: (eps^2 - 2) r_x - eps r = 0 on the flat state.
        const double exact = std::exp(eps * x / (eps * eps - 2.0));
        REQUIRE(r[i] == Catch::Approx(exact).margin(1e-12));
        // Leading-order form quoted for the flat state: -2 r_x - eps r = 0.
        REQUIRE(std::abs(r[i] - std::exp(-eps * x / 2.0)) < 1e-8);
    }
}

TEST_CASE("symmetrizer weights stay positive on smooth doping", "[perturbation]") {
    SteadyState st = bump_steady(200, 0.01);
    PressureLaw law(2.0, 1.0);
    SymmetrizerWeights w = make_symmetrizer_weights(st, law);
    for (double v : w.r) REQUIRE(v > 0.0);
    for (double v : w.r_tilde) REQUIRE(v > 0.0);
    for (double v : w.s) REQUIRE(v > 0.0);
    for (double v : w.s_tilde) REQUIRE(v > 0.0);
}

TEST_CASE("second symmetrizer constant-coefficient closed forms", "[perturbation]") {
    // gamma = 2, kappa = 1: P' = 2 rho, so s = 2, G = 0, M = -1/3.
    SteadyState st = constant_steady(100, 0.0);
    PressureLaw law(2.0, 1.0);
    GridFunction rt = second_order_symmetrizer(st, law, 1.0);
    for (std::size_t i = 0; i < rt.size(); ++i)
        REQUIRE(rt[i] == Catch::Approx(1.0 + st.grid.node(i) / 3.0).margin(1e-10));

    // kappa = 1/2: P' = rho, s = 1, M = -2/3.
    SteadyState st2 = constant_steady(100, 0.0, 0.5);
    PressureLaw law2(2.0, 0.5);
    GridFunction rt2 = second_order_symmetrizer(st2, law2, 1.0);
    for (std::size_t i = 0; i < rt2.size(); ++i)
        REQUIRE(rt2[i] ==
                Catch::Approx(1.0 + 2.0 * st2.grid.node(i) / 3.0).margin(1e-10));
}

TEST_CASE("symmetrizer ODE residuals are small at N = 400", "[perturbation]") {
    SteadyState st = bump_steady(400, 0.01);
    const Grid& g = st.grid;
    PressureLaw law(2.0, 1.0);

    GridFunction r = first_order_symmetrizer(st, law, 1.0);
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
    REQUIRE(res1 <= 1e-6);

    GridFunction rt = second_order_symmetrizer(st, law, 1.0);
    const GridFunction rt_x = derivative(g, rt);
    GridFunction s(r.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double rb = st.rho_bar[i];
        s[i] = law.dp(rb) - st.J_bar * st.J_bar / (rb * rb);
    }
    const GridFunction s_x = derivative(g, s);
    double res2 = 0.0;
    for (std::size_t i = 0; i < rt.size(); ++i) {
        const double rb = st.rho_bar[i];
        const double rbx = st.rho_bar_x[i];
        const double G = (5.0 * s_x[i] -
                          2.0 * st.J_bar * st.J_bar * rbx / (rb * rb * rb) +
                          law.d2p(rb) * rbx - st.E_bar[i]) /
                         (3.0 * s[i]);
        const double M = -2.0 / (3.0 * s[i]);
        res2 = std::max(res2, std::abs(rt_x[i] + G * rt[i] + M));
    }
    REQUIRE(res2 <= 1e-6);
}

TEST_CASE("supersonic steady state rejected by symmetrizers", "[perturbation]") {
    SteadyState st = constant_steady(50, 0.0);
    PressureLaw law(2.0, 1.0);
    st.subsonic_margin = -1.0;
    REQUIRE_THROWS_AS(first_order_symmetrizer(st, law, 1.0), SupersonicError);
    REQUIRE_THROWS_AS(second_order_symmetrizer(st, law, 1.0), SupersonicError);
}

TEST_CASE("perturbation field gradient matches sigma", "[perturbation]") {
    Grid g(200);
    GridFunction sigma(g.n_nodes());
    for (std::size_t i = 0; i < sigma.size(); ++i)
        sigma[i] = std::sin(2.0 * pi * g.node(i));
    GridFunction et = efield_of_sigma(g, sigma);
    const GridFunction et_x = derivative(g, et);
    for (std::size_t i = 2; i + 2 < sigma.size(); ++i)
        REQUIRE(et_x[i] == Catch::Approx(sigma[i]).margin(2e-3));
}
