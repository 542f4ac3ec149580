#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sep1d/steady.hpp"

using namespace sep1d;

namespace {

SteadyState solve_bump(std::size_t n, double jbar) {
    Grid g(n);
    PressureLaw law(2.0, 1.0);
    DopingProfile b = DopingProfile::bump(g, 1.0, 0.5, 0.2, 0.1);
    return solve_given_current(g, law, b, 1.0, 1.0, jbar, 0.0);
}

} // namespace

TEST_CASE("constant state solves the symmetric trivial case", "[steady]") {
    Grid g(100);
    PressureLaw law(2.0, 1.0);
    DopingProfile b = DopingProfile::constant(g, 1.0);
    auto [st, rep] = solve_given_current_report(g, law, b, 1.0, 1.0, 0.0, 0.0);
    for (double v : st.rho_bar) REQUIRE(v == Catch::Approx(1.0).margin(1e-12));
    for (double v : st.Phi_bar) REQUIRE(std::abs(v) < 1e-12);
    for (double v : st.E_bar) REQUIRE(std::abs(v) < 1e-12);
    REQUIRE(st.residual_norm < 1e-12);
    REQUIRE(std::abs(rep.mass_defect) < 1e-12);
    REQUIRE(st.subsonic_margin == Catch::Approx(2.0));

    auto [momentum, poisson] = steady_residual(st, law, b);
    REQUIRE(momentum < 1e-12);
    REQUIRE(poisson < 1e-12);
}

TEST_CASE("constant doping with nonzero current keeps a flat density", "[steady]") {
    Grid g(80);
    PressureLaw law(2.0, 1.0);
    DopingProfile b = DopingProfile::constant(g, 1.0);
    SteadyState st = solve_given_current(g, law, b, 1.0, 1.0, 0.05, -0.1);
    for (double v : st.rho_bar) REQUIRE(v == Catch::Approx(1.0).margin(1e-11));
    // Momentum equation reduces to Phi_x = J, so Phi is linear from phi_left.
    for (std::size_t i = 0; i < st.Phi_bar.size(); ++i)
        REQUIRE(st.Phi_bar[i] == Catch::Approx(-0.1 + 0.05 * g.node(i)).margin(1e-10));
}

TEST_CASE("steady solve converges at order 2 on smooth doping", "[steady]") {
    const SteadyState a = solve_bump(100, 0.01);
    const SteadyState bb = solve_bump(200, 0.01);
    const SteadyState c = solve_bump(400, 0.01);
    double d1 = 0.0, d2 = 0.0;
    for (std::size_t i = 0; i <= 100; ++i)
        d1 = std::max(d1, std::abs(a.rho_bar[i] - bb.rho_bar[2 * i]));
    for (std::size_t i = 0; i <= 200; ++i)
        d2 = std::max(d2, std::abs(bb.rho_bar[i] - c.rho_bar[2 * i]));
    const double ratio = d1 / d2;
    REQUIRE(ratio > 3.5);
    REQUIRE(ratio < 4.5);
}

TEST_CASE("supersonic current is rejected", "[steady]") {
    Grid g(50);
    PressureLaw law(2.0, 1.0);
    DopingProfile b = DopingProfile::constant(g, 1.0);
    // P'(1) = 2, so |J| > sqrt(2) makes the constant guess supersonic.
    REQUIRE_THROWS_AS(solve_given_current(g, law, b, 1.0, 1.0, 1.5, 0.0),
                      SupersonicError);
}

TEST_CASE("steady residual detects non-solutions", "[steady]") {
    Grid g(200);
    PressureLaw law(2.0, 1.0);
    DopingProfile b = DopingProfile::bump(g, 1.0, 0.5, 0.2, 0.1);
    SteadyState st = solve_given_current(g, law, b, 1.0, 1.0, 0.01, 0.0);

    auto [momentum, poisson] = steady_residual(st, law, b);
    REQUIRE(momentum <= 10.0 * 1e-10);
    // Poisson defect is a discretization-order consistency check.
    REQUIRE(poisson < 5e-3);

    SteadyState bad = st;
    for (std::size_t i = 0; i < bad.rho_bar.size(); ++i) {
        const double x = bad.grid.node(i);
        bad.rho_bar[i] += 1e-3 * std::exp(-std::pow((x - 0.4) / 0.15, 2));
    }
    auto [bad_momentum, bad_poisson] = steady_residual(bad, law, b);
    REQUIRE(bad_momentum > 1e-5);
}

TEST_CASE("Poisson consistency of the reconstruction improves at order 2", "[steady]") {
    PressureLaw law(2.0, 1.0);
    const auto poisson_defect = [&](std::size_t n) {
        Grid g(n);
        DopingProfile b = DopingProfile::bump(g, 1.0, 0.5, 0.2, 0.1);
        SteadyState st = solve_given_current(g, law, b, 1.0, 1.0, 0.01, 0.0);
        return steady_residual(st, law, b).second;
    };
    const double ratio = poisson_defect(100) / poisson_defect(200);
    REQUIRE(ratio > 3.0);
    REQUIRE(ratio < 5.0);
}

TEST_CASE("voltage mode recovers the symmetric case", "[steady]") {
    Grid g(100);
    PressureLaw law(2.0, 1.0);
    DopingProfile b = DopingProfile::constant(g, 1.0);
    BoundaryData bd; // rho 1/1, phi 0/0
    auto [st, rep] = solve_given_voltage(g, law, b, bd);
    REQUIRE(std::abs(st.J_bar) < 1e-9);
    for (double v : st.rho_bar) REQUIRE(v == Catch::Approx(1.0).margin(1e-9));
    REQUIRE(rep.mode == "given-voltage");
}

TEST_CASE("voltage / current round trip", "[steady]") {
    Grid g(150);
    PressureLaw law(2.0, 1.0);
    DopingProfile b = DopingProfile::bump(g, 1.0, 0.4, 0.2, 0.08);
    BoundaryData bd;
    bd.rho_left = 1.0;
    bd.rho_right = 1.05;
    bd.phi_left = 0.0;
    bd.phi_right = 0.04;
    auto [st, rep] = solve_given_voltage(g, law, b, bd);
    REQUIRE(std::abs(st.Phi_bar.back() - bd.phi_right) <= 1e-9);

    SteadyState again = solve_given_current(g, law, b, bd.rho_left, bd.rho_right,
                                            st.J_bar, bd.phi_left);
    REQUIRE(std::abs(again.Phi_bar.back() - bd.phi_right) < 1e-8);
    double drho = 0.0;
    for (std::size_t i = 0; i < st.rho_bar.size(); ++i)
        drho = std::max(drho, std::abs(again.rho_bar[i] - st.rho_bar[i]));
    REQUIRE(drho < 1e-8);
}

TEST_CASE("voltage outside the bracket fails", "[steady]") {
    Grid g(60);
    PressureLaw law(2.0, 1.0);
    DopingProfile b = DopingProfile::constant(g, 1.0);
    BoundaryData bd;
    bd.phi_right = 5.0; // would demand |J| > j_max = 0.2
    REQUIRE_THROWS_AS(solve_given_voltage(g, law, b, bd), BracketError);
}

TEST_CASE("Newton residual history decreases", "[steady]") {
    Grid g(120);
    PressureLaw law(2.0, 1.0);
    DopingProfile b = DopingProfile::bump(g, 1.0, 0.5, 0.15, 0.2);
    auto [st, rep] = solve_given_current_report(g, law, b, 1.0, 1.0, 0.02, 0.0);
    REQUIRE(rep.residual_history.size() >= 2);
    for (std::size_t i = 1; i < rep.residual_history.size(); ++i)
        REQUIRE(rep.residual_history[i] <
                rep.residual_history[i - 1] + 1e-14);
    REQUIRE(st.residual_norm <= 1e-10);
    REQUIRE(st.subsonic_margin > 0.0);
}
