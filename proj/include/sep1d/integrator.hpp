#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sep1d/diagnostics.hpp"
#include "sep1d/errors.hpp"
#include "sep1d/grid.hpp"
#include "sep1d/model.hpp"
#include "sep1d/noise.hpp"
#include "sep1d/perturbation.hpp"
#include "sep1d/pressure.hpp"
#include "sep1d/steady.hpp"

namespace sep1d {

struct IntegratorConfig {
    double cfl = 0.4;
    double artificial_viscosity = 0.0; // added to the local flux speed
    bool reconstruct = false;          // second-order central reconstruction
    double t_end = 10.0;
    std::size_t snapshot_every = 0; // 0 disables snapshots
    std::uint64_t seed = 0;

    void validate() const {
        if (!(cfl > 0.0 && cfl < 1.0)) throw ConfigError("time.cfl must lie in (0,1)");
        if (!(t_end >= 0.0)) throw ConfigError("time.t_end must be nonnegative");
        if (!(artificial_viscosity >= 0.0))
            throw ConfigError("time.artificial_viscosity must be nonnegative");
    }
};

/// Per-path output: one diagnostic frame per step (plus the initial one),
/// sparse field snapshots, and a typed failure marker if the path aborted.
struct PathRecord {
    std::vector<DiagnosticFrame> frames;
    std::vector<std::pair<std::size_t, FlowField>> snapshots;
    std::string failure; // empty when the path completed
    double last_good_time = 0.0;
    int supersonic_warnings = 0;
};

/// CFL-limited step: dt = cfl * h / max_i (|J_i/rho_i| + sqrt(P'(rho_i))),
/// the largest characteristic speed of the quasilinear advection matrix.
inline double cfl_dt(const Grid& g, const FlowField& f, const PressureLaw& law,
                     double cfl) {
    double speed = 0.0;
    for (std::size_t i = 0; i < f.rho.size(); ++i) {
        if (!(f.rho[i] > 0.0)) throw VacuumError("cfl_dt: density not positive");
        speed = std::max(speed, std::abs(f.J[i] / f.rho[i]) + std::sqrt(law.dp(f.rho[i])));
    }
    return cfl * g.h() / speed;
}

namespace detail {

inline double wave_speed(const PressureLaw& law, double rho, double J) {
    return std::abs(J / rho) + std::sqrt(law.dp(rho));
}

} // namespace detail

/**
 * One time step of the forced system:
 *  (i)   deterministic drift: local Lax-Friedrichs fluxes for the
 *        conservative pair (J, J^2/rho + P(rho)), centered source rho*E, and
 *        the relaxation -J handled semi-implicitly (divide by 1 + dt);
 *  (ii)  momentum noise increment evaluated at the pre-step state (Ito);
 *  (iii) Dirichlet density at the contacts and one-sided extrapolation of J
 *        making the discrete J_x vanish at both ends;
 *  (iv)  Poisson re-solve for Phi and E.
 * The noise stream advances only when the model amplitude is nonzero.
 */
inline FlowField step(const FlowField& state, const Grid& g, const PressureLaw& law,
                      const DopingProfile& b, const BoundaryData& bd,
                      const NoiseModel& noise, double dt, RngStream& rng,
                      double artificial_viscosity = 0.0, bool reconstruct = false) {
    const std::size_t n = g.n_nodes();
    if (state.rho.size() != n) throw ShapeError("step: grid mismatch");
    if (!(dt > 0.0)) throw StepSizeError("step: dt must be positive");

    GridFunction dM;
    if (noise.amplitude > 0.0) dM = sample_noise_increment(noise, state.J, dt, rng);

    FlowField next;
    next.rho = state.rho;
    next.J = state.J;
    next.t = state.t + dt;

    const double h = g.h();
    // Interface fluxes F_{i+1/2}, i = 0..n-2, from (rho, J) interface values:
    // first-order by default, second-order central reconstruction on request
    // (one-sided slopes at the wall nodes).
    const auto slope = [&](const GridFunction& u, std::size_t i) {
        if (i == 0) return u[1] - u[0];
        if (i + 1 == n) return u[n - 1] - u[n - 2];
        return 0.5 * (u[i + 1] - u[i - 1]);
    };
    std::vector<double> F1(n - 1), F2(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double rho_l = state.rho[i], rho_r = state.rho[i + 1];
        double J_l = state.J[i], J_r = state.J[i + 1];
        if (reconstruct) {
            rho_l += 0.5 * slope(state.rho, i);
            rho_r -= 0.5 * slope(state.rho, i + 1);
            J_l += 0.5 * slope(state.J, i);
            J_r -= 0.5 * slope(state.J, i + 1);
        }
        if (!(rho_l > 0.0) || !(rho_r > 0.0))
            throw VacuumError("step: density not positive");
        const double a = std::max(detail::wave_speed(law, rho_l, J_l),
                                  detail::wave_speed(law, rho_r, J_r)) +
                         artificial_viscosity;
        F1[i] = 0.5 * (J_l + J_r) - 0.5 * a * (rho_r - rho_l);
        F2[i] = 0.5 * (J_l * J_l / rho_l + law.p(rho_l) + J_r * J_r / rho_r +
                       law.p(rho_r)) -
                0.5 * a * (J_r - J_l);
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        next.rho[i] = state.rho[i] - dt / h * (F1[i] - F1[i - 1]);
        const double source = state.rho[i] * state.E[i];
        next.J[i] = (state.J[i] - dt / h * (F2[i] - F2[i - 1]) + dt * source) / (1.0 + dt);
    }
    // Boundary momentum before noise/extrapolation keeps the relaxation
    // consistent at the ends (overwritten below).
    next.J[0] = state.J[0] / (1.0 + dt);
    next.J[n - 1] = state.J[n - 1] / (1.0 + dt);

    if (noise.amplitude > 0.0)
        for (std::size_t i = 0; i < n; ++i) next.J[i] += dM[i];

    next.rho[0] = bd.rho_left;
    next.rho[n - 1] = bd.rho_right;
    if (n >= 3) {
        next.J[0] = (4.0 * next.J[1] - next.J[2]) / 3.0;
        next.J[n - 1] = (4.0 * next.J[n - 2] - next.J[n - 3]) / 3.0;
    }

    for (double v : next.rho)
        if (!(v > 0.0))
            throw VacuumError("step: density lost positivity; reduce cfl or noise amplitude");

    next.Phi = solve_poisson(g, next.rho, b, bd.phi_left, bd.phi_right);
    next.E = electric_field(g, next.Phi);
    return next;
}

/// Random initial perturbation with the contact-compatible mode bases:
/// sigma_0 in sin(k pi x) (vanishing at the ends), j_0 in cos(k pi x), both
/// rescaled so that sqrt(|sigma|_H2^2 + |j|_H2^2) equals epsilon exactly,
/// then Phi_0 re-solved from Poisson.
inline FlowField initial_perturbation(const Grid& g, const SteadyState& st,
                                      const PressureLaw& law, const DopingProfile& b,
                                      double epsilon, std::size_t n_modes,
                                      RngStream& rng) {
    if (!(epsilon >= 0.0)) throw DomainError("initial_perturbation: epsilon >= 0 required");
    if (n_modes < 1) throw DomainError("initial_perturbation: need at least one mode");
    const std::size_t n = g.n_nodes();

    GridFunction sigma(n, 0.0), j(n, 0.0);
    if (epsilon > 0.0) {
        std::vector<double> c(n_modes), d(n_modes);
        for (std::size_t k = 0; k < n_modes; ++k) c[k] = rng.uniform_pm1();
        for (std::size_t k = 0; k < n_modes; ++k) d[k] = rng.uniform_pm1();
        constexpr double pi = 3.14159265358979323846;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = g.node(i);
            for (std::size_t k = 0; k < n_modes; ++k) {
                sigma[i] += c[k] * std::sin((k + 1) * pi * x);
                j[i] += d[k] * std::cos((k + 1) * pi * x);
            }
        }
        // Exact discrete boundary conditions before normalization.
        sigma[0] = 0.0;
        sigma[n - 1] = 0.0;
        if (n >= 3) {
            j[0] = (4.0 * j[1] - j[2]) / 3.0;
            j[n - 1] = (4.0 * j[n - 2] - j[n - 3]) / 3.0;
        }
        const double hs = norm_h2(g, sigma), hj = norm_h2(g, j);
        const double total = std::sqrt(hs * hs + hj * hj);
        const double scale = (total > 0.0) ? epsilon / total : 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sigma[i] *= scale;
            j[i] *= scale;
        }
    }

    FlowField f;
    f.rho.resize(n);
    f.J.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        f.rho[i] = st.rho_bar[i] + sigma[i];
        f.J[i] = st.J_bar + j[i];
    }
    f.check_positive_density();
    f.Phi = solve_poisson(g, f.rho, b, st.Phi_bar.front(), st.Phi_bar.back());
    f.E = electric_field(g, f.Phi);
    f.t = 0.0;
    return f;
}

/// Advances the initial field to t_end with per-step dt from cfl_dt, records
/// one diagnostic frame per step (plus the initial state) and field snapshots
/// every snapshot_every steps. Fully deterministic given the rng stream. A
/// step failure aborts the path and is recorded as a typed failure.
inline PathRecord simulate(const FlowField& initial, const Grid& g,
                           const IntegratorConfig& cfg, const PressureLaw& law,
                           const DopingProfile& b, const SteadyState& st,
                           const NoiseModel& noise, RngStream& rng) {
    cfg.validate();
    BoundaryData bd;
    bd.rho_left = st.rho_bar.front();
    bd.rho_right = st.rho_bar.back();
    bd.phi_left = st.Phi_bar.front();
    bd.phi_right = st.Phi_bar.back();

    PathRecord rec;
    FlowField state = initial;

    const auto record = [&](const FlowField& f, std::size_t step_index) {
        const PerturbationState p = perturbation_of(st, f);
        const double prev_sup =
            rec.frames.empty() ? 0.0 : rec.frames.back().running_sup_composite;
        DiagnosticFrame frame = make_frame(f.t, p, st, law, prev_sup);
        if (frame.subsonic_margin <= 0.0) ++rec.supersonic_warnings;
        rec.frames.push_back(frame);
        if (cfg.snapshot_every > 0 && step_index % cfg.snapshot_every == 0)
            rec.snapshots.emplace_back(step_index, f);
        rec.last_good_time = f.t;
    };

    record(state, 0);
    std::size_t step_index = 0;
    try {
        while (state.t < cfg.t_end) {
            const double dt_stable = cfl_dt(g, state, law, cfg.cfl);
            const double remaining = cfg.t_end - state.t;
            const bool final_step = remaining <= dt_stable;
            state = step(state, g, law, b, bd, noise,
                         final_step ? remaining : dt_stable, rng,
                         cfg.artificial_viscosity, cfg.reconstruct);
            if (final_step) state.t = cfg.t_end;
            ++step_index;
            record(state, step_index);
        }
    } catch (const SimError& err) {
        rec.failure = err.what();
    }
    return rec;
}

/// Single-node reduction of the momentum update, valid on spatially flat
/// states where fluxes and the electric field vanish identically:
///   J -> J/(1+dt) + J Y(J) dW.
inline double scalar_momentum_step_with(double J, const NoiseModel& noise, double dt,
                                        double dW) {
    return J / (1.0 + dt) + noise.forcing(J) * dW;
}

inline double scalar_momentum_step(double J, const NoiseModel& noise, double dt,
                                   RngStream& rng) {
    double dW = 0.0;
    if (noise.amplitude > 0.0) dW = std::sqrt(dt) * noise.draw_increment_scale(rng);
    return scalar_momentum_step_with(J, noise, dt, dW);
}

} // namespace sep1d
