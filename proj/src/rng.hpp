#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gnssheight {

/// Deterministic random source. All draw paths are fixed arithmetic on the
/// mt19937_64 stream, so a seed reproduces the exact sample sequence on any
/// platform (std::*_distribution is implementation-defined and avoided here).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    /// Standard Box-Muller; consumes exactly two uniforms per draw.
    double normal(double mean, double sd) {
        const double u1 = 1.0 - uniform(); // (0, 1], keeps log finite
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sd * r * std::cos(2.0 * M_PI * u2);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace gnssheight
