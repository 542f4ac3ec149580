#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sep1d/ensemble.hpp"
#include "sep1d/errors.hpp"
#include "sep1d/grid.hpp"
#include "sep1d/integrator.hpp"
#include "sep1d/model.hpp"
#include "sep1d/noise.hpp"
#include "sep1d/pressure.hpp"
#include "sep1d/steady.hpp"

namespace sep1d {

/// Flat `section.key = value` configuration with `#` comments. Every numeric
/// field is validated against its module's preconditions at load time, and
/// violations name the offending field.
struct RunConfig {
    // physics
    double gamma = 2.0;
    double kappa = 1.0;
    double rho_left = 0.0;  // required
    double rho_right = 0.0; // required
    double phi_left = 0.0;
    double phi_right = 0.0;
    double jbar = 0.0;
    bool voltage_mode = false;
    std::string doping = ""; // empty: constant b = rho_left

    // steady solver
    double newton_tol = 1e-10;
    double j_max = 0.2;

    // grid
    std::size_t n_cells = 200;

    // time
    double t_end = 10.0;
    double cfl = 0.4;
    std::size_t snapshot_every = 0;
    double artificial_viscosity = 0.0;
    bool reconstruct = false;

    // noise
    double noise_amplitude = 0.0;
    std::size_t noise_modes = 16;
    std::string noise_reduction = "single-brownian";

    // perturbation
    double perturbation_amplitude = 0.0;
    std::size_t perturbation_modes = 4;

    // ensemble
    std::size_t n_paths = 64;
    std::uint64_t master_seed = 1;
    std::vector<int> moment_orders = {1, 2, 3};
    double fit_t_lo = -1.0;
    double fit_t_hi = -1.0;
    double burn_in_fraction = 0.5;
    std::size_t n_report = 401;
    unsigned n_workers = 0;

    // output
    std::string out_dir = ".";

    static RunConfig from_file(const std::string& path);
    static RunConfig from_entries(const std::map<std::string, std::string>& entries);
    void validate() const;

    Grid make_grid() const { return Grid(n_cells); }
    PressureLaw make_law() const { return PressureLaw(gamma, kappa); }
    BoundaryData make_boundary() const {
        BoundaryData bd;
        bd.rho_left = rho_left;
        bd.rho_right = rho_right;
        bd.phi_left = phi_left;
        bd.phi_right = phi_right;
        return bd;
    }
    DopingProfile make_doping(const Grid& g) const {
        if (doping.empty()) return DopingProfile::constant(g, rho_left);
        return DopingProfile::parse(g, doping, rho_left);
    }
    NoiseModel make_noise() const {
        const NoiseReduction red = (noise_reduction == "k-modes")
                                       ? NoiseReduction::KModes
                                       : NoiseReduction::SingleBrownian;
        return NoiseModel::make(noise_amplitude, noise_modes, red);
    }
    IntegratorConfig make_integrator() const {
        IntegratorConfig c;
        c.cfl = cfl;
        c.artificial_viscosity = artificial_viscosity;
        c.reconstruct = reconstruct;
        c.t_end = t_end;
        c.snapshot_every = snapshot_every;
        c.seed = master_seed;
        return c;
    }
    EnsembleConfig make_ensemble() const {
        EnsembleConfig c;
        c.n_paths = n_paths;
        c.master_seed = master_seed;
        c.moment_orders = moment_orders;
        c.fit_t_lo = fit_t_lo;
        c.fit_t_hi = fit_t_hi;
        c.burn_in_fraction = burn_in_fraction;
        c.n_report = n_report;
        c.n_workers = n_workers;
        return c;
    }
    SteadyOptions make_steady_options() const {
        SteadyOptions o;
        o.newton_tol = newton_tol;
        o.j_max = j_max;
        return o;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

struct EntryReader {
    const std::map<std::string, std::string>& entries;
    mutable std::vector<std::string> consumed;

    const std::string* find(const std::string& key) const {
        auto it = entries.find(key);
        if (it == entries.end()) return nullptr;
        consumed.push_back(key);
        return &it->second;
    }

    double number(const std::string& key, double fallback) const {
        const std::string* v = find(key);
        if (!v) return fallback;
        try {
            std::size_t used = 0;
            const double x = std::stod(*v, &used);
            if (used != v->size()) throw std::invalid_argument("trailing junk");
            return x;
        } catch (const std::exception&) {
            throw ConfigError(key + ": not a number ('" + *v + "')");
        }
    }

    double required_number(const std::string& key) const {
        const std::string* v = find(key);
        if (!v) throw ConfigError(key + " is required");
        try {
            return std::stod(*v);
        } catch (const std::exception&) {
            throw ConfigError(key + ": not a number ('" + *v + "')");
        }
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) const {
        const std::string* v = find(key);
        if (!v) return fallback;
        try {
            return std::stoull(*v);
        } catch (const std::exception&) {
            throw ConfigError(key + ": not an unsigned integer ('" + *v + "')");
        }
    }

    bool boolean(const std::string& key, bool fallback) const {
        const std::string* v = find(key);
        if (!v) return fallback;
        if (*v == "true" || *v == "1" || *v == "yes") return true;
        if (*v == "false" || *v == "0" || *v == "no") return false;
        throw ConfigError(key + ": not a boolean ('" + *v + "')");
    }

    std::string text(const std::string& key, const std::string& fallback) const {
        const std::string* v = find(key);
        return v ? *v : fallback;
    }

    std::vector<int> int_list(const std::string& key, std::vector<int> fallback) const {
        const std::string* v = find(key);
        if (!v) return fallback;
        std::vector<int> out;
        std::string item;
        std::istringstream ss(*v);
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            try {
                out.push_back(std::stoi(item));
            } catch (const std::exception&) {
                throw ConfigError(key + ": not an integer list ('" + *v + "')");
            }
        }
        if (out.empty()) throw ConfigError(key + ": empty list");
        return out;
    }
};

} // namespace detail

inline RunConfig RunConfig::from_entries(const std::map<std::string, std::string>& entries) {
    detail::EntryReader r{entries, {}};
    RunConfig c;
    c.gamma = r.number("physics.gamma", c.gamma);
    c.kappa = r.number("physics.kappa", c.kappa);
    c.rho_left = r.required_number("physics.rho_left");
    c.rho_right = r.required_number("physics.rho_right");
    c.phi_left = r.number("physics.phi_left", c.phi_left);
    c.phi_right = r.number("physics.phi_right", c.phi_right);
    c.jbar = r.number("physics.jbar", c.jbar);
    c.voltage_mode = r.boolean("physics.voltage_mode", c.voltage_mode);
    c.doping = r.text("physics.doping", c.doping);

    c.newton_tol = r.number("steady.newton_tol", c.newton_tol);
    c.j_max = r.number("steady.j_max", c.j_max);

    c.n_cells = static_cast<std::size_t>(r.unsigned_integer("grid.n_cells", c.n_cells));

    c.t_end = r.number("time.t_end", c.t_end);
    c.cfl = r.number("time.cfl", c.cfl);
    c.snapshot_every =
        static_cast<std::size_t>(r.unsigned_integer("time.snapshot_every", c.snapshot_every));
    c.artificial_viscosity = r.number("time.artificial_viscosity", c.artificial_viscosity);
    c.reconstruct = r.boolean("time.reconstruct", c.reconstruct);

    c.noise_amplitude = r.number("noise.amplitude", c.noise_amplitude);
    c.noise_modes = static_cast<std::size_t>(r.unsigned_integer("noise.modes", c.noise_modes));
    c.noise_reduction = r.text("noise.reduction", c.noise_reduction);

    c.perturbation_amplitude = r.number("perturbation.amplitude", c.perturbation_amplitude);
    c.perturbation_modes = static_cast<std::size_t>(
        r.unsigned_integer("perturbation.n_modes", c.perturbation_modes));

    c.n_paths = static_cast<std::size_t>(r.unsigned_integer("ensemble.n_paths", c.n_paths));
    c.master_seed = r.unsigned_integer("ensemble.master_seed", c.master_seed);
    c.moment_orders = r.int_list("ensemble.moment_orders", c.moment_orders);
    c.fit_t_lo = r.number("ensemble.fit_t_lo", c.fit_t_lo);
    c.fit_t_hi = r.number("ensemble.fit_t_hi", c.fit_t_hi);
    c.burn_in_fraction = r.number("ensemble.burn_in_fraction", c.burn_in_fraction);
    c.n_report = static_cast<std::size_t>(r.unsigned_integer("ensemble.n_report", c.n_report));
    c.n_workers = static_cast<unsigned>(r.unsigned_integer("ensemble.n_workers", c.n_workers));

    c.out_dir = r.text("output.dir", c.out_dir);

    for (const auto& [key, value] : entries) {
        bool known = false;
        for (const std::string& k : r.consumed)
            if (k == key) known = true;
        if (!known) throw ConfigError(key + ": unknown configuration key");
    }
    c.validate();
    return c;
}

inline RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open file " + path);
    std::map<std::string, std::string> entries;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) +
                              " is not of the form key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config: empty key at line " + std::to_string(lineno));
        entries[key] = value;
    }
    return from_entries(entries);
}

inline void RunConfig::validate() const {
    if (!(gamma > 1.0)) throw ConfigError("physics.gamma must exceed 1");
    if (!(kappa > 0.0)) throw ConfigError("physics.kappa must be positive");
    if (!(rho_left > 0.0)) throw ConfigError("physics.rho_left must be positive");
    if (!(rho_right > 0.0)) throw ConfigError("physics.rho_right must be positive");
    if (!(newton_tol > 0.0)) throw ConfigError("steady.newton_tol must be positive");
    if (!(j_max > 0.0)) throw ConfigError("steady.j_max must be positive");
    if (n_cells < 4) throw ConfigError("grid.n_cells must be at least 4");
    if (!(t_end >= 0.0)) throw ConfigError("time.t_end must be nonnegative");
    if (!(cfl > 0.0 && cfl < 1.0)) throw ConfigError("time.cfl must lie in (0,1)");
    if (!(artificial_viscosity >= 0.0))
        throw ConfigError("time.artificial_viscosity must be nonnegative");
    if (!(noise_amplitude >= 0.0)) throw ConfigError("noise.amplitude must be nonnegative");
    if (noise_modes < 1) throw ConfigError("noise.modes must be at least 1");
    if (noise_reduction != "single-brownian" && noise_reduction != "k-modes")
        throw ConfigError("noise.reduction must be 'single-brownian' or 'k-modes'");
    if (!(perturbation_amplitude >= 0.0))
        throw ConfigError("perturbation.amplitude must be nonnegative");
    if (perturbation_modes < 1) throw ConfigError("perturbation.n_modes must be at least 1");
    if (n_paths < 2) throw ConfigError("ensemble.n_paths must be at least 2");
    for (int m : moment_orders)
        if (m < 1) throw ConfigError("ensemble.moment_orders entries must be >= 1");
    for (std::size_t i = 0; i < moment_orders.size(); ++i)
        for (std::size_t k = i + 1; k < moment_orders.size(); ++k)
            if (moment_orders[i] == moment_orders[k])
                throw ConfigError("ensemble.moment_orders entries must be distinct");
    if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0))
        throw ConfigError("ensemble.burn_in_fraction must lie in [0,1)");
    if (n_report < 16) throw ConfigError("ensemble.n_report must be at least 16");
}

} // namespace sep1d
