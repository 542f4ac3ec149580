#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "sep1d/errors.hpp"
#include "sep1d/integrator.hpp"
#include "sep1d/noise.hpp"
#include "sep1d/steady.hpp"

namespace sep1d {

struct EnsembleConfig {
    std::size_t n_paths = 64;
    std::uint64_t master_seed = 1;
    std::vector<int> moment_orders = {1, 2, 3};
    double fit_t_lo = -1.0; // < 0: defaults to t_end/4
    double fit_t_hi = -1.0; // < 0: defaults to 3 t_end/4
    double burn_in_fraction = 0.5;
    std::size_t n_report = 401;
    std::vector<double> delta_ladder_rel = {0.125, 0.25, 0.5, 1.0, 2.0};
    unsigned n_workers = 0; // 0: hardware concurrency

    void validate(double t_end) const {
        if (n_paths < 2) throw ConfigError("ensemble.n_paths must be at least 2");
        if (moment_orders.empty()) throw ConfigError("ensemble.moment_orders must be nonempty");
        for (int m : moment_orders)
            if (m < 1) throw ConfigError("ensemble.moment_orders entries must be >= 1");
        for (std::size_t i = 0; i < moment_orders.size(); ++i)
            for (std::size_t k = i + 1; k < moment_orders.size(); ++k)
                if (moment_orders[i] == moment_orders[k])
                    throw ConfigError("ensemble.moment_orders entries must be distinct");
        const double lo = window_lo(t_end), hi = window_hi(t_end);
        if (!(lo < hi && hi <= t_end))
            throw ConfigError("ensemble.fit window must satisfy t_lo < t_hi <= t_end");
        if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0))
            throw ConfigError("ensemble.burn_in_fraction must lie in [0,1)");
        if (n_report < 16) throw ConfigError("ensemble.n_report must be at least 16");
    }

    double window_lo(double t_end) const { return fit_t_lo < 0.0 ? 0.25 * t_end : fit_t_lo; }
    double window_hi(double t_end) const { return fit_t_hi < 0.0 ? 0.75 * t_end : fit_t_hi; }
};

struct DecayFit {
    double zeta_hat = 0.0;
    double c_hat = 0.0;
    double r_squared = 0.0;
};

/// Least-squares line on (t, log y) over [t_lo, t_hi]; zeta_hat = -slope.
inline DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& values,
                          double t_lo, double t_hi) {
    if (times.size() != values.size()) throw ShapeError("fit_decay: series lengths differ");
    std::vector<double> t, ly;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_lo || times[i] > t_hi) continue;
        if (!(values[i] > 0.0))
            throw DomainError("fit_decay: nonpositive value inside the fit window");
        t.push_back(times[i]);
        ly.push_back(std::log(values[i]));
    }
    if (t.size() < 10)
        throw InsufficientDataError("fit_decay: fewer than 10 points in the window");

    const double n = static_cast<double>(t.size());
    double st = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        st += t[i];
        sy += ly[i];
    }
    const double mt = st / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        sxx += (t[i] - mt) * (t[i] - mt);
        sxy += (t[i] - mt) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    const double slope = sxy / sxx;
    DecayFit fit;
    fit.zeta_hat = -slope;
    fit.c_hat = std::exp(my - slope * mt);
    double ss_res = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double pred = my + slope * (t[i] - mt);
        ss_res += (ly[i] - pred) * (ly[i] - pred);
    }
    fit.r_squared = (syy > 0.0) ? std::max(0.0, 1.0 - ss_res / syy) : 1.0;
    return fit;
}

struct ScalingRow {
    int m = 1;
    double zeta = 0.0;
    double ratio = 1.0; // zeta_m / (m * zeta_1)
    bool consistent = true;
};

/// Table of fitted rates against the linear-in-m prediction; a row is
/// consistent when its ratio lies in [0.7, 1.3].
inline std::vector<ScalingRow> moment_scaling_report(
    const std::vector<std::pair<int, DecayFit>>& fits) {
    double zeta1 = 0.0;
    bool have1 = false;
    for (const auto& [m, f] : fits)
        if (m == 1) {
            zeta1 = f.zeta_hat;
            have1 = true;
        }
    if (!have1)
        throw InsufficientDataError("moment_scaling_report: reference fit m = 1 missing");
    std::vector<ScalingRow> rows;
    for (const auto& [m, f] : fits) {
        ScalingRow r;
        r.m = m;
        r.zeta = f.zeta_hat;
        r.ratio = f.zeta_hat / (static_cast<double>(m) * zeta1);
        r.consistent = (r.ratio >= 0.7 && r.ratio <= 1.3);
        rows.push_back(r);
    }
    return rows;
}

struct MomentCurve {
    int m = 1;
    std::vector<double> values;
    std::vector<double> stderrs;
};

struct InvariantStats {
    double mean_composite = 0.0;  // pooled over paths and post-burn-in times
    double mean_composite_stderr = 0.0; // across path-level means
    double mean_initial_sup = 0.0;
    double mean_post_sup = 0.0;
    std::vector<std::pair<double, double>> ladder; // (delta, occupation fraction)
};

/// Concentration of the time-averaged empirical law near the steady state:
/// over post-burn-in times pooled across paths (time-weighted), the mean
/// composite statistic and, per delta, the occupation fraction of the event
/// |rho - rho_bar|_inf <= delta.
inline InvariantStats invariant_concentration(const std::vector<PathRecord>& paths,
                                              double burn_in_time, double t_end,
                                              const std::vector<double>& deltas) {
    if (!(t_end >= 2.0 * burn_in_time))
        throw InsufficientDataError(
            "invariant_concentration: t_end must be at least twice the burn-in");
    InvariantStats s;
    double pooled_time = 0.0, pooled_comp = 0.0, pooled_sup = 0.0;
    std::vector<double> occupied(deltas.size(), 0.0);
    std::vector<double> path_means;
    std::size_t counted_paths = 0;
    for (const PathRecord& rec : paths) {
        if (!rec.failure.empty() || rec.frames.empty()) continue;
        ++counted_paths;
        s.mean_initial_sup += rec.frames.front().linf_sigma;
        double path_time = 0.0, path_comp = 0.0;
        for (std::size_t k = 0; k + 1 < rec.frames.size(); ++k) {
            const DiagnosticFrame& f = rec.frames[k];
            if (f.t < burn_in_time) continue;
            const double w = rec.frames[k + 1].t - f.t;
            path_time += w;
            path_comp += w * f.composite;
            pooled_sup += w * f.linf_sigma;
            for (std::size_t d = 0; d < deltas.size(); ++d)
                if (f.linf_sigma <= deltas[d]) occupied[d] += w;
        }
        if (path_time <= 0.0)
            throw InsufficientDataError(
                "invariant_concentration: no post-burn-in frames on a path");
        pooled_time += path_time;
        pooled_comp += path_comp;
        path_means.push_back(path_comp / path_time);
    }
    if (counted_paths == 0 || pooled_time <= 0.0)
        throw InsufficientDataError("invariant_concentration: no completed paths");
    s.mean_initial_sup /= static_cast<double>(counted_paths);
    s.mean_composite = pooled_comp / pooled_time;
    s.mean_post_sup = pooled_sup / pooled_time;
    if (path_means.size() > 1) {
        double var = 0.0;
        for (double m : path_means) var += (m - s.mean_composite) * (m - s.mean_composite);
        var /= static_cast<double>(path_means.size() - 1);
        s.mean_composite_stderr = std::sqrt(var / static_cast<double>(path_means.size()));
    }
    for (std::size_t d = 0; d < deltas.size(); ++d)
        s.ladder.emplace_back(deltas[d],
                              std::clamp(occupied[d] / pooled_time, 0.0, 1.0));
    return s;
}

struct EnsembleSummary {
    std::vector<double> times;
    std::vector<MomentCurve> moments;          // instantaneous composite
    std::vector<MomentCurve> tail_sup_moments; // sup over [t, t_end]
    std::vector<std::pair<int, DecayFit>> fits;
    std::vector<std::pair<int, DecayFit>> tail_sup_fits;
    std::vector<ScalingRow> scaling;
    InvariantStats invariant;
    std::vector<double> tail_sup_at_fit_hi; // per completed path
    double fit_t_lo = 0.0, fit_t_hi = 0.0;
    std::size_t n_paths = 0, n_failed = 0;
    bool partial = false; // > 5% of paths failed
    std::vector<std::string> failures;
};

struct EnsembleInputs {
    Grid grid;
    SteadyState steady;
    PressureLaw law;
    DopingProfile doping;
    IntegratorConfig integrator;
    NoiseModel noise;
    double perturbation_amplitude = 0.0;
    std::size_t perturbation_modes = 4;
};

namespace detail {

struct PathData {
    bool ok = false;
    std::string failure;
    std::vector<double> composite;
    std::vector<double> linf_sigma;
    double initial_sup = 0.0;
};

/// Linear interpolation of a frame quantity onto the report grid.
template <typename Getter>
inline std::vector<double> sample_frames(const std::vector<DiagnosticFrame>& frames,
                                         const std::vector<double>& grid_times,
                                         Getter get) {
    std::vector<double> out(grid_times.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < grid_times.size(); ++i) {
        const double tau = grid_times[i];
        while (k + 1 < frames.size() && frames[k + 1].t < tau) ++k;
        if (k + 1 >= frames.size()) {
            out[i] = get(frames.back());
            continue;
        }
        const double t0 = frames[k].t, t1 = frames[k + 1].t;
        const double w = (t1 > t0) ? std::clamp((tau - t0) / (t1 - t0), 0.0, 1.0) : 0.0;
        out[i] = (1.0 - w) * get(frames[k]) + w * get(frames[k + 1]);
    }
    return out;
}

} // namespace detail

/**
 * Runs n_paths independent simulations with per-path streams keyed by
 * (master_seed, path index), samples diagnostics onto a common uniform time
 * grid, and aggregates moment curves, decay fits, the rate-scaling table and
 * the invariant-measure statistics. The result depends only on the inputs
 * and master_seed, never on the worker count or scheduling.
 */
inline EnsembleSummary run_ensemble(const EnsembleInputs& in, const EnsembleConfig& cfg) {
    cfg.validate(in.integrator.t_end);
    in.integrator.validate();

    const double t_end = in.integrator.t_end;
    std::vector<double> grid_times(cfg.n_report);
    for (std::size_t i = 0; i < cfg.n_report; ++i)
        grid_times[i] = t_end * static_cast<double>(i) / static_cast<double>(cfg.n_report - 1);

    std::vector<detail::PathData> paths(cfg.n_paths);
    const auto run_path = [&](std::size_t p) {
        detail::PathData& out = paths[p];
        try {
            RngStream rng(cfg.master_seed, p);
            const FlowField initial =
                initial_perturbation(in.grid, in.steady, in.law, in.doping,
                                     in.perturbation_amplitude, in.perturbation_modes, rng);
            const PathRecord rec = simulate(initial, in.grid, in.integrator, in.law,
                                            in.doping, in.steady, in.noise, rng);
            if (!rec.failure.empty()) {
                out.failure = rec.failure;
                return;
            }
            out.composite = detail::sample_frames(
                rec.frames, grid_times, [](const DiagnosticFrame& f) { return f.composite; });
            out.linf_sigma = detail::sample_frames(
                rec.frames, grid_times, [](const DiagnosticFrame& f) { return f.linf_sigma; });
            out.initial_sup = rec.frames.front().linf_sigma;
            out.ok = true;
        } catch (const SimError& err) {
            out.failure = err.what();
        }
    };

    unsigned workers = cfg.n_workers == 0 ? std::thread::hardware_concurrency() : cfg.n_workers;
    if (workers == 0) workers = 1;
    workers = std::min<unsigned>(workers, static_cast<unsigned>(cfg.n_paths));
    if (workers <= 1) {
        for (std::size_t p = 0; p < cfg.n_paths; ++p) run_path(p);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned wk = 0; wk < workers; ++wk)
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t p = next.fetch_add(1);
                    if (p >= cfg.n_paths) return;
                    run_path(p);
                }
            });
        for (std::thread& th : pool) th.join();
    }

    EnsembleSummary s;
    s.times = grid_times;
    s.n_paths = cfg.n_paths;
    s.fit_t_lo = cfg.window_lo(t_end);
    s.fit_t_hi = cfg.window_hi(t_end);
    for (const detail::PathData& p : paths)
        if (!p.ok) {
            ++s.n_failed;
            s.failures.push_back(p.failure);
        }
    s.partial = (static_cast<double>(s.n_failed) > 0.05 * static_cast<double>(cfg.n_paths));

    std::vector<const detail::PathData*> ok;
    for (const detail::PathData& p : paths)
        if (p.ok) ok.push_back(&p);
    if (ok.empty()) return s;
    const double n_ok = static_cast<double>(ok.size());

    // Tail sups per path: suffix maxima of the composite over the grid.
    std::vector<std::vector<double>> tail(ok.size());
    for (std::size_t p = 0; p < ok.size(); ++p) {
        tail[p].resize(cfg.n_report);
        double running = 0.0;
        for (std::size_t i = cfg.n_report; i-- > 0;) {
            running = std::max(running, ok[p]->composite[i]);
            tail[p][i] = running;
        }
    }
    {
        std::size_t hi_idx = 0;
        for (std::size_t i = 0; i < cfg.n_report; ++i)
            if (grid_times[i] <= s.fit_t_hi) hi_idx = i;
        for (std::size_t p = 0; p < ok.size(); ++p)
            s.tail_sup_at_fit_hi.push_back(tail[p][hi_idx]);
    }

    const auto make_curves = [&](auto value_at) {
        std::vector<MomentCurve> curves;
        for (int m : cfg.moment_orders) {
            MomentCurve c;
            c.m = m;
            c.values.resize(cfg.n_report);
            c.stderrs.resize(cfg.n_report);
            for (std::size_t i = 0; i < cfg.n_report; ++i) {
                double mean = 0.0;
                for (std::size_t p = 0; p < ok.size(); ++p)
                    mean += std::pow(value_at(p, i), m);
                mean /= n_ok;
                double var = 0.0;
                for (std::size_t p = 0; p < ok.size(); ++p) {
                    const double d = std::pow(value_at(p, i), m) - mean;
                    var += d * d;
                }
                var /= std::max(1.0, n_ok - 1.0);
                c.values[i] = mean;
                c.stderrs[i] = std::sqrt(var / n_ok);
            }
            curves.push_back(std::move(c));
        }
        return curves;
    };
    s.moments = make_curves([&](std::size_t p, std::size_t i) { return ok[p]->composite[i]; });
    s.tail_sup_moments = make_curves([&](std::size_t p, std::size_t i) { return tail[p][i]; });

    for (const MomentCurve& c : s.moments) {
        try {
            s.fits.emplace_back(c.m, fit_decay(grid_times, c.values, s.fit_t_lo, s.fit_t_hi));
        } catch (const SimError&) {
            // Degenerate series (e.g. identically zero): no fit entry.
        }
    }
    for (const MomentCurve& c : s.tail_sup_moments) {
        try {
            s.tail_sup_fits.emplace_back(
                c.m, fit_decay(grid_times, c.values, s.fit_t_lo, s.fit_t_hi));
        } catch (const SimError&) {
        }
    }
    if (!s.fits.empty()) {
        try {
            s.scaling = moment_scaling_report(s.fits);
        } catch (const SimError&) {
        }
    }

    // Invariant-measure statistics over the post-burn-in window (uniform
    // report grid, so plain averages are the time averages).
    const double burn_t = cfg.burn_in_fraction * t_end;
    double sum_comp = 0.0, sum_sup = 0.0;
    std::size_t count = 0;
    std::vector<double> path_means;
    for (std::size_t p = 0; p < ok.size(); ++p) {
        s.invariant.mean_initial_sup += ok[p]->initial_sup;
        double path_sum = 0.0;
        std::size_t path_count = 0;
        for (std::size_t i = 0; i < cfg.n_report; ++i) {
            if (grid_times[i] < burn_t) continue;
            path_sum += ok[p]->composite[i];
            ++path_count;
            sum_sup += ok[p]->linf_sigma[i];
        }
        sum_comp += path_sum;
        count += path_count;
        if (path_count > 0)
            path_means.push_back(path_sum / static_cast<double>(path_count));
    }
    s.invariant.mean_initial_sup /= n_ok;
    if (count > 0) {
        s.invariant.mean_composite = sum_comp / static_cast<double>(count);
        s.invariant.mean_post_sup = sum_sup / static_cast<double>(count);
        if (path_means.size() > 1) {
            double var = 0.0;
            for (double m : path_means)
                var += (m - s.invariant.mean_composite) * (m - s.invariant.mean_composite);
            var /= static_cast<double>(path_means.size() - 1);
            s.invariant.mean_composite_stderr =
                std::sqrt(var / static_cast<double>(path_means.size()));
        }
        for (double rel : cfg.delta_ladder_rel) {
            const double delta = rel * s.invariant.mean_initial_sup;
            std::size_t inside = 0;
            for (std::size_t p = 0; p < ok.size(); ++p)
                for (std::size_t i = 0; i < cfg.n_report; ++i) {
                    if (grid_times[i] < burn_t) continue;
                    if (ok[p]->linf_sigma[i] <= delta) ++inside;
                }
            s.invariant.ladder.emplace_back(
                delta, static_cast<double>(inside) / static_cast<double>(count));
        }
    }
    return s;
}

} // namespace sep1d
