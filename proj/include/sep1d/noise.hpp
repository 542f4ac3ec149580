#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "sep1d/errors.hpp"
#include "sep1d/grid.hpp"

namespace sep1d {

/// Counter-based splittable random stream: the SplitMix64 sequence keyed by
/// (master seed, stream index). Streams with distinct keys are independent
/// for Monte Carlo purposes, and the draw sequence depends only on the key,
/// never on scheduling.
class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t master_seed, std::uint64_t stream_index) {
        state_ = mix(mix(master_seed) ^ (0xB5026F5AA96619E9ULL * (stream_index + 1)));
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~static_cast<result_type>(0); }

    result_type operator()() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    double normal() { return normal_(*this); }
    double uniform_pm1() { return uniform_(*this); }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_ = 0;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{-1.0, 1.0};
};

enum class NoiseReduction { SingleBrownian, KModes };

/// Multiplicative forcing of the momentum equation: mode k contributes
/// F_k = a_k J Y(J) with Y(J) = nu J/(1+J^2) and weights a_k normalized so
/// that sum a_k^2 = 1 (up to the 2^-K truncation of the default weights).
/// The spatial profile J Y(J) is shared by all modes, so the K-mode sum and
/// a single Brownian motion drive the same law.
struct NoiseModel {
    double amplitude = 0.0; // nu
    std::vector<double> mode_weights;
    NoiseReduction reduction = NoiseReduction::SingleBrownian;

    static NoiseModel make(double nu, std::size_t n_modes = 16,
                           NoiseReduction red = NoiseReduction::SingleBrownian) {
        if (!(nu >= 0.0)) throw DomainError("noise: amplitude must be nonnegative");
        if (n_modes < 1) throw DomainError("noise: need at least one mode");
        NoiseModel n;
        n.amplitude = nu;
        n.reduction = red;
        n.mode_weights.resize(n_modes);
        for (std::size_t k = 1; k <= n_modes; ++k)
            n.mode_weights[k - 1] = std::pow(2.0, -0.5 * static_cast<double>(k));
        return n;
    }

    /// Y(J) = nu J / (1 + J^2).
    double shape(double J) const { return amplitude * J / (1.0 + J * J); }

    /// Spatial profile of the forcing, J Y(J).
    double forcing(double J) const { return J * shape(J); }

    double sum_weights_sq() const {
        double s = 0.0;
        for (double a : mode_weights) s += a * a;
        return s;
    }

    /// One Brownian-increment scale for a time step: either a single standard
    /// normal or the weighted sum over modes; both are N(0, ~1) in law.
    double draw_increment_scale(RngStream& rng) const {
        if (reduction == NoiseReduction::SingleBrownian) return rng.normal();
        double s = 0.0;
        for (double a : mode_weights) s += a * rng.normal();
        return s;
    }
};

/// Momentum forcing increment over dt for the current profile J:
/// dM_i = J_i Y(J_i) sqrt(dt) * xi, with xi shared across nodes.
inline GridFunction sample_noise_increment(const NoiseModel& noise, const GridFunction& J,
                                           double dt, RngStream& rng) {
    if (!(dt > 0.0)) throw DomainError("noise: dt must be positive");
    GridFunction dM(J.size(), 0.0);
    if (noise.amplitude == 0.0) return dM;
    const double xi = noise.draw_increment_scale(rng);
    const double root_dt = std::sqrt(dt);
    for (std::size_t i = 0; i < J.size(); ++i) dM[i] = noise.forcing(J[i]) * root_dt * xi;
    return dM;
}

} // namespace sep1d
