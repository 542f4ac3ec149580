#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "sep1d/errors.hpp"
#include "sep1d/grid.hpp"
#include "sep1d/model.hpp"
#include "sep1d/perturbation.hpp"
#include "sep1d/pressure.hpp"
#include "sep1d/steady.hpp"

namespace sep1d {

/// Per-time diagnostics along a trajectory. composite is the statistic whose
/// moments the decay claims bound: |sigma|_H2^2 + |j|_H2^2 + |e_tilde|_L2^2.
struct DiagnosticFrame {
    double t = 0.0;
    double rel_energy = 0.0;
    double h2_sigma = 0.0;
    double h2_j = 0.0;
    double l2_etilde = 0.0;
    double weighted_first = 0.0;  // int r |w_x|^2, filled on demand
    double weighted_second = 0.0; // int r_tilde |w_xx|^2, filled on demand
    double composite = 0.0;
    double running_sup_composite = 0.0;
    double subsonic_margin = 0.0;
    double linf_sigma = 0.0;
};

/// Relative energy of a perturbation: trapezoid integral of
///   (rho_bar j - J_bar sigma)^2 / (2 (rho_bar+sigma) rho_bar^2)
///   + G(rho_bar+sigma) - G(rho_bar) - G'(rho_bar) sigma + e_tilde^2 / 2.
/// Nonnegative wherever rho_bar + sigma > 0 (convexity of G).
inline double relative_energy(const PerturbationState& p, const SteadyState& st,
                              const PressureLaw& law) {
    const Grid& g = st.grid;
    const std::size_t n = st.rho_bar.size();
    if (p.sigma.size() != n) throw ShapeError("relative_energy: grid mismatch");
    GridFunction integrand(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double rb = st.rho_bar[i];
        const double rho = rb + p.sigma[i];
        if (!(rho > 0.0)) throw VacuumError("relative_energy: rho_bar + sigma not positive");
        const double kin = rb * p.j[i] - st.J_bar * p.sigma[i];
        integrand[i] = kin * kin / (2.0 * rho * rb * rb) + law.g(rho) - law.g(rb) -
                       law.dg(rb) * p.sigma[i] + 0.5 * p.e_tilde[i] * p.e_tilde[i];
    }
    return integrate(g, integrand);
}

/// Symmetrizer-weighted energies (int r |w_x|^2, int r_tilde |w_xx|^2).
inline std::pair<double, double> weighted_energies(const Grid& g,
                                                   const PerturbationState& p,
                                                   const SymmetrizerWeights& w) {
    require_same_size(g, w.r, "weighted_energies(r)");
    require_same_size(g, w.r_tilde, "weighted_energies(r_tilde)");
    const GridFunction sx = derivative(g, p.sigma);
    const GridFunction jx = derivative(g, p.j);
    const GridFunction sxx = second_derivative(g, p.sigma);
    const GridFunction jxx = second_derivative(g, p.j);
    GridFunction first(g.n_nodes()), second(g.n_nodes());
    for (std::size_t i = 0; i < first.size(); ++i) {
        first[i] = w.r[i] * (sx[i] * sx[i] + jx[i] * jx[i]);
        second[i] = w.r_tilde[i] * (sxx[i] * sxx[i] + jxx[i] * jxx[i]);
    }
    return {integrate(g, first), integrate(g, second)};
}

inline void fill_weighted(DiagnosticFrame& frame, const Grid& g,
                          const PerturbationState& p, const SymmetrizerWeights& w) {
    const auto [first, second] = weighted_energies(g, p, w);
    frame.weighted_first = first;
    frame.weighted_second = second;
}

inline DiagnosticFrame make_frame(double t, const PerturbationState& p,
                                  const SteadyState& st, const PressureLaw& law,
                                  double previous_sup = 0.0) {
    const Grid& g = st.grid;
    DiagnosticFrame f;
    f.t = t;
    f.rel_energy = relative_energy(p, st, law);
    f.h2_sigma = norm_h2(g, p.sigma);
    f.h2_j = norm_h2(g, p.j);
    f.l2_etilde = norm_l2(g, p.e_tilde);
    f.composite = f.h2_sigma * f.h2_sigma + f.h2_j * f.h2_j + f.l2_etilde * f.l2_etilde;
    f.running_sup_composite = std::max(previous_sup, f.composite);
    f.linf_sigma = norm_linf(p.sigma);
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < st.rho_bar.size(); ++i) {
        const double rho = st.rho_bar[i] + p.sigma[i];
        const double J = st.J_bar + p.j[i];
        margin = std::min(margin, law.dp(rho) - J * J / (rho * rho));
    }
    f.subsonic_margin = margin;
    return f;
}

/// Defect of the field identity e_tilde_t = -j + int j dx, measured on
/// consecutive-step snapshots of a deterministic run: the max over interior
/// nodes and over snapshot pairs of
///   | (e(t+dt) - e(t))/dt + j(t) - int j(t) dx |.
inline double efield_identity_defect(
    const std::vector<std::pair<std::size_t, FlowField>>& snapshots,
    const SteadyState& st) {
    const Grid& g = st.grid;
    double defect = 0.0;
    bool found_pair = false;
    for (std::size_t k = 0; k + 1 < snapshots.size(); ++k) {
        if (snapshots[k + 1].first != snapshots[k].first + 1) continue;
        const FlowField& a = snapshots[k].second;
        const FlowField& b = snapshots[k + 1].second;
        const double dt = b.t - a.t;
        if (!(dt > 0.0)) continue;
        found_pair = true;
        GridFunction j(a.J.size());
        for (std::size_t i = 0; i < j.size(); ++i) j[i] = a.J[i] - st.J_bar;
        const double mean_j = integrate(g, j);
        for (std::size_t i = 1; i + 1 < j.size(); ++i) {
            const double et_a = a.E[i] - st.E_bar[i];
            const double et_b = b.E[i] - st.E_bar[i];
            defect = std::max(defect, std::abs((et_b - et_a) / dt + j[i] - mean_j));
        }
    }
    if (!found_pair)
        throw InsufficientDataError(
            "efield_identity_defect: no consecutive-step snapshots available");
    return defect;
}

} // namespace sep1d
