#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "sep1d/grid.hpp"
#include "sep1d/model.hpp"
#include "sep1d/noise.hpp"
#include "sep1d/pressure.hpp"

using namespace sep1d;

TEST_CASE("pressure evaluation", "[model]") {
    PressureLaw law(2.0, 1.0);
    auto [p, dp, d2p] = pressure_eval(law, 1.0);
    REQUIRE(p == Catch::Approx(1.0));
    REQUIRE(dp == Catch::Approx(2.0));
    REQUIRE(d2p == Catch::Approx(2.0));

    auto e = pressure_eval(law, 0.5);
    REQUIRE(e.p == Catch::Approx(0.25));
    REQUIRE(e.dp == Catch::Approx(1.0));
    REQUIRE(e.d2p == Catch::Approx(2.0));

    REQUIRE_THROWS_AS(pressure_eval(law, 0.0), DomainError);
    REQUIRE_THROWS_AS(pressure_eval(law, -1.0), DomainError);
}

TEST_CASE("pressure derivatives match central differences", "[model]") {
    PressureLaw law(1.4, 1.0);
    const double rho = 2.0, d = 1e-5;
    const double fd1 = (law.p(rho + d) - law.p(rho - d)) / (2.0 * d);
    const double fd2 = (law.p(rho + d) - 2.0 * law.p(rho) + law.p(rho - d)) / (d * d);
    REQUIRE(law.dp(rho) == Catch::Approx(fd1).epsilon(1e-6));
    REQUIRE(law.d2p(rho) == Catch::Approx(fd2).epsilon(1e-5));
    const double fd3 = (law.d2p(rho + d) - law.d2p(rho - d)) / (2.0 * d);
    REQUIRE(law.d3p(rho) == Catch::Approx(fd3).epsilon(1e-6));
}

TEST_CASE("enthalpy normalization and convexity identity", "[model]") {
    PressureLaw law2(2.0, 1.0);
    REQUIRE(law2.g(1.0) == Catch::Approx(0.0).margin(1e-14));
    REQUIRE(law2.dg(1.0) == Catch::Approx(0.0).margin(1e-14));
    for (double rho : {0.3, 0.7, 1.0, 2.5, 9.0})
        REQUIRE(law2.d2g(rho) == Catch::Approx(2.0).margin(1e-13));

    // G'' = P'/rho at 50 log-spaced densities for gamma = 1.4.
    PressureLaw law(1.4, 1.0);
    RngStream rng(7, 0);
    for (int k = 0; k < 50; ++k) {
        const double rho = 0.1 * std::pow(100.0, 0.5 * (rng.uniform_pm1() + 1.0));
        REQUIRE(std::abs(law.d2g(rho) - law.dp(rho) / rho) < 1e-12 * law.d2g(rho) + 1e-12);
    }
    // Convexity over a wide log-spaced ladder.
    for (int k = -3; k <= 3; ++k) REQUIRE(law.d2g(std::pow(10.0, k)) > 0.0);

    REQUIRE_THROWS_AS(PressureLaw(1.0, 1.0), DomainError);
}

TEST_CASE("Poisson solver with zero right-hand side is linear", "[model]") {
    Grid g(37);
    DopingProfile b = DopingProfile::constant(g, 1.0);
    GridFunction rho(g.n_nodes(), 1.0);
    GridFunction phi = solve_poisson(g, rho, b, 0.0, 1.0);
    for (std::size_t i = 0; i < phi.size(); ++i)
        REQUIRE(phi[i] == Catch::Approx(g.node(i)).margin(1e-13));
}

TEST_CASE("Poisson solver is exact for quadratics", "[model]") {
    Grid g(64);
    DopingProfile b = DopingProfile::constant(g, 1.0);
    GridFunction rho(g.n_nodes(), 2.0); // rho - b = 1
    GridFunction phi = solve_poisson(g, rho, b, 0.0, 0.0);
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double x = g.node(i);
        REQUIRE(phi[i] == Catch::Approx(x * (x - 1.0) / 2.0).margin(1e-13));
    }
}

TEST_CASE("Poisson apply-back oracle", "[model]") {
    Grid g(200);
    DopingProfile b = DopingProfile::constant(g, 1.0);
    RngStream rng(11, 3);
    GridFunction rho(g.n_nodes());
    for (double& v : rho) v = 1.0 + 0.5 * rng.uniform_pm1();
    GridFunction phi = solve_poisson(g, rho, b, -0.3, 0.8);
    GridFunction lap = second_derivative(g, phi);
    for (std::size_t i = 1; i + 1 < phi.size(); ++i)
        REQUIRE(std::abs(lap[i] - (rho[i] - b.values[i])) < 1e-10);
    REQUIRE(phi.front() == -0.3);
    REQUIRE(phi.back() == 0.8);
}

TEST_CASE("Poisson rejects mismatched grids", "[model]") {
    Grid g(16);
    DopingProfile b = DopingProfile::constant(g, 1.0);
    GridFunction rho(7, 1.0);
    REQUIRE_THROWS_AS(solve_poisson(g, rho, b, 0.0, 0.0), ShapeError);
}

TEST_CASE("electric field stencils", "[model]") {
    Grid g(40);
    GridFunction phi(g.n_nodes());
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = g.node(i);
    GridFunction e = electric_field(g, phi);
    for (double v : e) REQUIRE(v == Catch::Approx(1.0).margin(1e-12));

    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = g.node(i) * g.node(i);
    e = electric_field(g, phi);
    for (std::size_t i = 1; i + 1 < e.size(); ++i)
        REQUIRE(e[i] == Catch::Approx(2.0 * g.node(i)).margin(1e-12));
}

TEST_CASE("doping profiles", "[model]") {
    Grid g(100);
    DopingProfile c = DopingProfile::parse(g, "constant:2.5", 1.0);
    for (double v : c.values) REQUIRE(v == 2.5);

    DopingProfile bump = DopingProfile::parse(g, "bump:0.5:0.1:0.3", 1.0);
    REQUIRE(bump.values[50] == Catch::Approx(1.3).margin(1e-12));
    REQUIRE(bump.values[0] == Catch::Approx(1.0).margin(1e-8));
    for (double v : bump.values) REQUIRE(v > 0.0);

    REQUIRE_THROWS_AS(DopingProfile::parse(g, "wedge:1", 1.0), ConfigError);
    REQUIRE_THROWS_AS(DopingProfile::constant(g, -1.0), DomainError);
}

TEST_CASE("doping from CSV resamples linearly", "[model]") {
    const std::string path = "doping_test_tmp.csv";
    {
        std::ofstream out(path);
        out << "# x, b\n0.0, 1.0\n0.5, 2.0\n1.0, 1.0\n";
    }
    Grid g(10);
    DopingProfile b = DopingProfile::from_csv(g, path);
    REQUIRE(b.values[0] == Catch::Approx(1.0));
    REQUIRE(b.values[5] == Catch::Approx(2.0));
    REQUIRE(b.values[2] == Catch::Approx(1.4).margin(1e-12)); // x = 0.2
    REQUIRE(b.values[10] == Catch::Approx(1.0));
    std::remove(path.c_str());
}
