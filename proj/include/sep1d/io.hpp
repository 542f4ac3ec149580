#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sep1d/config.hpp"
#include "sep1d/ensemble.hpp"
#include "sep1d/errors.hpp"
#include "sep1d/integrator.hpp"
#include "sep1d/perturbation.hpp"
#include "sep1d/steady.hpp"

namespace sep1d {

/// 17 significant digits: round-trip exact for 64-bit floats and
/// deterministic across runs.
inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_run_csv(std::ostream& os, const PathRecord& rec) {
    os << "t,rel_energy,h2_sigma,h2_j,l2_etilde,composite,running_sup_composite,"
          "subsonic_margin\n";
    for (const DiagnosticFrame& f : rec.frames)
        os << fmt_g17(f.t) << ',' << fmt_g17(f.rel_energy) << ',' << fmt_g17(f.h2_sigma)
           << ',' << fmt_g17(f.h2_j) << ',' << fmt_g17(f.l2_etilde) << ','
           << fmt_g17(f.composite) << ',' << fmt_g17(f.running_sup_composite) << ','
           << fmt_g17(f.subsonic_margin) << '\n';
}

inline void write_snapshot_csv(std::ostream& os, const Grid& g, const FlowField& f) {
    os << "x,rho,J,Phi,E\n";
    for (std::size_t i = 0; i < f.rho.size(); ++i)
        os << fmt_g17(g.node(i)) << ',' << fmt_g17(f.rho[i]) << ',' << fmt_g17(f.J[i])
           << ',' << fmt_g17(f.Phi[i]) << ',' << fmt_g17(f.E[i]) << '\n';
}

inline void write_weights_csv(std::ostream& os, const Grid& g,
                              const SymmetrizerWeights& w) {
    os << "x,r,s,r_tilde,s_tilde\n";
    for (std::size_t i = 0; i < w.r.size(); ++i)
        os << fmt_g17(g.node(i)) << ',' << fmt_g17(w.r[i]) << ',' << fmt_g17(w.s[i]) << ','
           << fmt_g17(w.r_tilde[i]) << ',' << fmt_g17(w.s_tilde[i]) << '\n';
}

/// Streaming emitter for the small fixed JSON schemas of this project.
class JsonWriter {
public:
    explicit JsonWriter(std::ostream& os) : os_(os) {}

    JsonWriter& begin_object() {
        comma();
        os_ << '{';
        fresh_ = true;
        return *this;
    }
    JsonWriter& end_object() {
        os_ << '}';
        fresh_ = false;
        return *this;
    }
    JsonWriter& begin_array() {
        comma();
        os_ << '[';
        fresh_ = true;
        return *this;
    }
    JsonWriter& end_array() {
        os_ << ']';
        fresh_ = false;
        return *this;
    }
    JsonWriter& key(const std::string& k) {
        comma();
        quote(k);
        os_ << ':';
        fresh_ = true;
        return *this;
    }
    JsonWriter& value(double v) {
        comma();
        os_ << fmt_g17(v);
        fresh_ = false;
        return *this;
    }
    JsonWriter& value(int v) {
        comma();
        os_ << v;
        fresh_ = false;
        return *this;
    }
    JsonWriter& value(std::uint64_t v) {
        comma();
        os_ << v;
        fresh_ = false;
        return *this;
    }
    JsonWriter& value(bool v) {
        comma();
        os_ << (v ? "true" : "false");
        fresh_ = false;
        return *this;
    }
    JsonWriter& value(const std::string& v) {
        comma();
        quote(v);
        fresh_ = false;
        return *this;
    }
    JsonWriter& value(const char* v) { return value(std::string(v)); }
    JsonWriter& values(const std::vector<double>& vs) {
        begin_array();
        for (double v : vs) value(v);
        end_array();
        return *this;
    }

private:
    void comma() {
        if (!fresh_) os_ << ',';
        fresh_ = false;
    }
    void quote(const std::string& s) {
        os_ << '"';
        for (char c : s) {
            if (c == '"' || c == '\\') os_ << '\\';
            os_ << c;
        }
        os_ << '"';
    }
    std::ostream& os_;
    bool fresh_ = true;
};

inline void write_steady_json(std::ostream& os, const PressureLaw& law,
                              const SteadyState& st, const SteadySolveReport& rep,
                              double momentum_defect, double poisson_defect) {
    JsonWriter w(os);
    w.begin_object();
    w.key("gamma").value(law.gamma);
    w.key("kappa").value(law.kappa);
    w.key("J_bar").value(st.J_bar);
    w.key("phi_right_attained").value(st.Phi_bar.back());
    w.key("subsonic_margin").value(st.subsonic_margin);
    w.key("mass_defect").value(rep.mass_defect);
    w.key("residuals").begin_object();
    w.key("newton").value(st.residual_norm);
    w.key("momentum").value(momentum_defect);
    w.key("poisson").value(poisson_defect);
    w.key("iterations").value(rep.iterations);
    w.key("mode").value(rep.mode);
    w.end_object();
    w.key("nodes").values(st.grid.nodes());
    w.key("rho_bar").values(st.rho_bar);
    w.key("Phi_bar").values(st.Phi_bar);
    w.key("E_bar").values(st.E_bar);
    w.end_object();
    os << '\n';
}

inline void write_summary_json(std::ostream& os, const EnsembleSummary& s,
                               const RunConfig* echo = nullptr) {
    JsonWriter w(os);
    w.begin_object();
    if (echo) {
        w.key("config").begin_object();
        w.key("gamma").value(echo->gamma);
        w.key("kappa").value(echo->kappa);
        w.key("rho_left").value(echo->rho_left);
        w.key("rho_right").value(echo->rho_right);
        w.key("jbar").value(echo->jbar);
        w.key("voltage_mode").value(echo->voltage_mode);
        w.key("doping").value(echo->doping.empty() ? "constant" : echo->doping);
        w.key("n_cells").value(echo->n_cells);
        w.key("t_end").value(echo->t_end);
        w.key("cfl").value(echo->cfl);
        w.key("noise_amplitude").value(echo->noise_amplitude);
        w.key("noise_modes").value(echo->noise_modes);
        w.key("noise_reduction").value(echo->noise_reduction);
        w.key("perturbation_amplitude").value(echo->perturbation_amplitude);
        w.key("perturbation_modes").value(echo->perturbation_modes);
        w.key("n_paths").value(echo->n_paths);
        w.key("master_seed").value(echo->master_seed);
        w.key("burn_in_fraction").value(echo->burn_in_fraction);
        w.end_object();
    }
    w.key("n_paths").value(s.n_paths);
    w.key("n_failed").value(s.n_failed);
    w.key("partial").value(s.partial);
    w.key("fit_window").begin_array().value(s.fit_t_lo).value(s.fit_t_hi).end_array();
    w.key("times").values(s.times);

    w.key("moments").begin_array();
    for (const MomentCurve& c : s.moments) {
        w.begin_object();
        w.key("m").value(c.m);
        w.key("values").values(c.values);
        w.key("stderr").values(c.stderrs);
        w.end_object();
    }
    w.end_array();

    const auto fits_block = [&](const char* name,
                                const std::vector<std::pair<int, DecayFit>>& fits) {
        w.key(name).begin_array();
        for (const auto& [m, f] : fits) {
            w.begin_object();
            w.key("m").value(m);
            w.key("zeta_hat").value(f.zeta_hat);
            w.key("c_hat").value(f.c_hat);
            w.key("r2").value(f.r_squared);
            w.end_object();
        }
        w.end_array();
    };
    fits_block("fits", s.fits);
    fits_block("tail_sup_fits", s.tail_sup_fits);

    w.key("scaling").begin_array();
    for (const ScalingRow& r : s.scaling) {
        w.begin_object();
        w.key("m").value(r.m);
        w.key("zeta").value(r.zeta);
        w.key("ratio").value(r.ratio);
        w.key("consistent").value(r.consistent);
        w.end_object();
    }
    w.end_array();

    w.key("invariant").begin_object();
    w.key("mean_composite").value(s.invariant.mean_composite);
    w.key("mean_initial_sup").value(s.invariant.mean_initial_sup);
    w.key("mean_post_sup").value(s.invariant.mean_post_sup);
    w.key("ladder").begin_array();
    for (const auto& [delta, fraction] : s.invariant.ladder) {
        w.begin_object();
        w.key("delta").value(delta);
        w.key("fraction").value(fraction);
        w.end_object();
    }
    w.end_array();
    w.end_object();

    w.end_object();
    os << '\n';
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write file " + path);
    out << content;
}

} // namespace sep1d
