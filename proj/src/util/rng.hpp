#pragma once

#include <cmath>
#include <cstdint>

namespace edf {

/// Deterministic, implementation-owned RNG so generated datasets are
/// byte-identical across platforms and standard-library versions.
/// Substreams derived from (seed, stream) are independent of the order in
/// which they are consumed, so per-series generation can run concurrently
/// without changing output.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ull) {
        // warm up
        next_u64();
        next_u64();
    }

    static Rng substream(std::uint64_t seed, std::uint64_t stream) {
        Rng mix(seed);
        mix.state_ += 0xbf58476d1ce4e5b9ull * (stream + 1);
        mix.next_u64();
        return mix;
    }

    std::uint64_t next_u64() {
        // splitmix64
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in (0, 1].
    double uniform_pos() { return 1.0 - uniform(); }

    /// Standard normal via Box-Muller (no cached spare, for reproducibility).
    double normal() {
        double u1 = uniform_pos();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    /// Poisson by counting unit-rate exponential interarrivals; O(lambda) but
    /// immune to the e^-lambda underflow of the multiplicative form.
    std::int64_t poisson(double lambda) {
        if (lambda <= 0) return 0;
        std::int64_t k = 0;
        double acc = 0;
        for (;;) {
            acc += -std::log(uniform_pos());
            if (acc > lambda) return k;
            ++k;
        }
    }

    /// Marsaglia-Tsang; shape > 0.
    double gamma(double shape, double scale) {
        if (shape < 1.0) {
            double u = uniform_pos();
            return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
        }
        double d = shape - 1.0 / 3.0;
        double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double v = 1.0 + c * x;
            if (v <= 0) continue;
            v = v * v * v;
            double u = uniform_pos();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
        }
    }

    /// Negative binomial with mean `lambda` and variance lambda*(1 +
    /// dispersion*lambda), as a gamma-Poisson mixture.
    std::int64_t neg_binomial(double lambda, double dispersion) {
        if (dispersion <= 0) return poisson(lambda);
        double shape = 1.0 / dispersion;
        double rate = gamma(shape, dispersion * lambda);
        return poisson(rate);
    }

private:
    std::uint64_t state_;
};

}  // namespace edf
