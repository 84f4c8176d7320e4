#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>

namespace grs {

/// Small deterministic generator (splitmix64). Used everywhere randomness is
/// needed so that outputs are reproducible bit-for-bit across runs and
/// independent of how work is split over threads.
class Splitmix64 {
public:
    explicit Splitmix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in (0, 1]; safe as a log argument.
    double uniform_open() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

    /// Standard normal via Box-Muller (one value per pair, order-stable).
    double gaussian() {
        const double u1 = uniform_open();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    std::uint64_t state_;
};

/// Stream-splitting rule: each logical stream (e.g. one trajectory) draws
/// from its own generator keyed by (seed, stream), so results do not depend
/// on scheduling.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream) {
    Splitmix64 mix(seed ^ (0xA0761D6478BD642FULL + stream * 0xE7037ED1A0B428DBULL));
    return mix.next();
}

inline Eigen::VectorXd sample_unit_sphere(Splitmix64& rng, int dim) {
    Eigen::VectorXd v(dim);
    double norm = 0.0;
    do {
        for (int i = 0; i < dim; ++i) v[i] = rng.gaussian();
        norm = v.norm();
    } while (norm < 1e-12);
    return v / norm;
}

/// Uniform w.r.t. volume in the closed unit ball.
inline Eigen::VectorXd sample_unit_ball(Splitmix64& rng, int dim) {
    const Eigen::VectorXd dir = sample_unit_sphere(rng, dim);
    const double r = std::pow(rng.uniform(), 1.0 / dim);
    return r * dir;
}

}  // namespace grs
