#pragma once

#include <cmath>

#include "sep1d/errors.hpp"

namespace sep1d {

/// Barotropic power-law pressure P(rho) = kappa * rho^gamma, gamma > 1,
/// together with the enthalpy G defined by G''(rho) = P'(rho)/rho.
///
/// G is fixed by the normalization G(1) = G'(1) = 0; only second differences
/// of G enter the relative energy, so any affine shift is admissible.
struct PressureLaw {
    double gamma = 2.0;
    double kappa = 1.0;

    PressureLaw(double g, double k) : gamma(g), kappa(k) {
        if (!(gamma > 1.0)) throw DomainError("pressure: gamma must exceed 1");
        if (!(kappa > 0.0)) throw DomainError("pressure: kappa must be positive");
    }
    PressureLaw() = default;

    double p(double rho) const {
        check(rho);
        return kappa * std::pow(rho, gamma);
    }
    double dp(double rho) const {
        check(rho);
        return kappa * gamma * std::pow(rho, gamma - 1.0);
    }
    double d2p(double rho) const {
        check(rho);
        return kappa * gamma * (gamma - 1.0) * std::pow(rho, gamma - 2.0);
    }
    double d3p(double rho) const {
        check(rho);
        return kappa * gamma * (gamma - 1.0) * (gamma - 2.0) * std::pow(rho, gamma - 3.0);
    }

    // G(rho) = kappa/(gamma-1) rho^gamma + affine terms chosen so G(1)=G'(1)=0.
    double g(double rho) const {
        check(rho);
        const double a = kappa / (gamma - 1.0);
        return a * std::pow(rho, gamma) - a * gamma * (rho - 1.0) - a;
    }
    double dg(double rho) const {
        check(rho);
        const double a = kappa / (gamma - 1.0);
        return a * gamma * (std::pow(rho, gamma - 1.0) - 1.0);
    }
    double d2g(double rho) const {
        check(rho);
        return kappa * gamma * std::pow(rho, gamma - 2.0);
    }

private:
    void check(double rho) const {
        if (!(rho > 0.0)) throw DomainError("pressure: rho must be positive");
    }
};

struct PressureEval {
    double p, dp, d2p;
};

inline PressureEval pressure_eval(const PressureLaw& law, double rho) {
    return {law.p(rho), law.dp(rho), law.d2p(rho)};
}

struct EnthalpyEval {
    double g, dg, d2g;
};

inline EnthalpyEval enthalpy_eval(const PressureLaw& law, double rho) {
    return {law.g(rho), law.dg(rho), law.d2g(rho)};
}

} // namespace sep1d
