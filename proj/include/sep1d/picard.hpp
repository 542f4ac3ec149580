#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "sep1d/errors.hpp"
#include "sep1d/grid.hpp"
#include "sep1d/integrator.hpp"
#include "sep1d/noise.hpp"
#include "sep1d/perturbation.hpp"
#include "sep1d/steady.hpp"

namespace sep1d {

using PerturbationTrajectory = std::vector<PerturbationState>;

/// Brownian increment scales, one per time step, reused across iterates.
struct FrozenNoisePath {
    std::vector<double> scales;
};

inline FrozenNoisePath draw_noise_path(std::size_t n_steps, const NoiseModel& noise,
                                       RngStream& rng) {
    FrozenNoisePath p;
    p.scales.resize(n_steps, 0.0);
    if (noise.amplitude > 0.0)
        for (std::size_t m = 0; m < n_steps; ++m)
            p.scales[m] = noise.draw_increment_scale(rng);
    return p;
}

/// Constant-in-time starting trajectory for the iteration.
inline PerturbationTrajectory constant_trajectory(const PerturbationState& w0,
                                                  std::size_t n_steps) {
    return PerturbationTrajectory(n_steps + 1, w0);
}

/**
 * One sweep of the linearized fixed-point scheme over the whole time grid:
 *   d w_n + (A(w_{n-1}) (w_n)_x + B w_n + C(e_n)) dt
 *     = N(w_{n-1}) dt + (0, F(w_{n-1}) dW)^T,
 * discretized with the main integrator's stencils: central differences plus
 * local Lax-Friedrichs dissipation with speeds frozen at the previous
 * iterate, the relaxation part of B semi-implicit, Euler-Maruyama noise with
 * the frozen increment scales, and the contact boundary treatment of the
 * main scheme. All iterates share the initial state prev[0].
 */
inline PerturbationTrajectory picard_iterate(const PerturbationTrajectory& prev,
                                             const SteadyState& st,
                                             const PressureLaw& law,
                                             const NoiseModel& noise,
                                             const FrozenNoisePath& path, double dt,
                                             double artificial_viscosity = 0.0) {
    if (prev.size() < 2) throw InsufficientDataError("picard: trajectory needs >= 2 states");
    const std::size_t n_steps = prev.size() - 1;
    if (path.scales.size() < n_steps)
        throw InsufficientDataError("picard: noise path shorter than the trajectory");
    if (!(dt > 0.0)) throw StepSizeError("picard: dt must be positive");

    const Grid& g = st.grid;
    const std::size_t n = g.n_nodes();
    const double h = g.h();
    const double root_dt = std::sqrt(dt);

    PerturbationTrajectory out(prev.size());
    out[0] = prev[0];

    GridFunction speed(n), a_half(n - 1), amp(n);
    for (std::size_t m = 0; m < n_steps; ++m) {
        const PerturbationState& frozen = prev[m];
        const PerturbationState& w = out[m];

        // Frozen full-state quantities: advection coefficients, defect,
        // dissipation speeds and noise amplitude.
        const CoefficientFields cf = assemble_coefficients(frozen, st, law);
        for (std::size_t i = 0; i < n; ++i) {
            const double rho = st.rho_bar[i] + frozen.sigma[i];
            const double J = st.J_bar + frozen.j[i];
            speed[i] = std::abs(J / rho) + std::sqrt(law.dp(rho));
            amp[i] = noise.forcing(J);
        }
        double max_speed = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            a_half[i] = std::max(speed[i], speed[i + 1]) + artificial_viscosity;
            max_speed = std::max(max_speed, a_half[i]);
        }
        if (dt * max_speed > h)
            throw StepSizeError("picard: dt violates the CFL bound of the frozen state");

        const GridFunction e_tilde = efield_of_sigma(g, w.sigma);

        PerturbationState next;
        next.sigma.assign(n, 0.0);
        next.j.assign(n, 0.0);
        const double xi = (noise.amplitude > 0.0) ? path.scales[m] : 0.0;

        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double sx = (w.sigma[i + 1] - w.sigma[i - 1]) / (2.0 * h);
            const double jx = (w.j[i + 1] - w.j[i - 1]) / (2.0 * h);
            const double diss_s = 0.5 / h *
                                  (a_half[i] * (w.sigma[i + 1] - w.sigma[i]) -
                                   a_half[i - 1] * (w.sigma[i] - w.sigma[i - 1]));
            const double diss_j = 0.5 / h *
                                  (a_half[i] * (w.j[i + 1] - w.j[i]) -
                                   a_half[i - 1] * (w.j[i] - w.j[i - 1]));
            next.sigma[i] = w.sigma[i] + dt * (-jx + diss_s);
            const double explicit_j =
                -cf.a21[i] * sx - cf.a22[i] * jx - cf.b21[i] * w.sigma[i] -
                (cf.b22[i] - 1.0) * w.j[i] + st.rho_bar[i] * e_tilde[i] + cf.n2[i] +
                diss_j;
            next.j[i] = (w.j[i] + dt * explicit_j) / (1.0 + dt) +
                        amp[i] * root_dt * xi;
        }
        next.sigma[0] = 0.0;
        next.sigma[n - 1] = 0.0;
        if (n >= 3) {
            next.j[0] = (4.0 * next.j[1] - next.j[2]) / 3.0;
            next.j[n - 1] = (4.0 * next.j[n - 2] - next.j[n - 3]) / 3.0;
        }
        next.e_tilde = efield_of_sigma(g, next.sigma);
        out[m + 1] = std::move(next);
    }
    return out;
}

/// sup over the time grid of the H2 distance between two trajectories,
/// sqrt(|d sigma|_H2^2 + |d j|_H2^2).
inline double trajectory_distance_h2(const Grid& g, const PerturbationTrajectory& a,
                                     const PerturbationTrajectory& b) {
    if (a.size() != b.size())
        throw ShapeError("trajectory_distance_h2: trajectories differ in length");
    double sup = 0.0;
    GridFunction ds(g.n_nodes()), dj(g.n_nodes());
    for (std::size_t m = 0; m < a.size(); ++m) {
        for (std::size_t i = 0; i < ds.size(); ++i) {
            ds[i] = a[m].sigma[i] - b[m].sigma[i];
            dj[i] = a[m].j[i] - b[m].j[i];
        }
        const double hs = norm_h2(g, ds), hj = norm_h2(g, dj);
        sup = std::max(sup, std::sqrt(hs * hs + hj * hj));
    }
    return sup;
}

} // namespace sep1d
