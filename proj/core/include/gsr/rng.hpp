#ifndef GSR_RNG_HPP
#define GSR_RNG_HPP

#include <cmath>
#include <cstdint>

namespace gsr {

/// Small deterministic PRNG (splitmix64) with cheap substreams.
///
/// Experiments derive one substream per trial from a master seed so that
/// trial results do not depend on evaluation order and identical configs
/// produce byte-identical output on any platform. The standard library
/// distributions are avoided on purpose: their output is
/// implementation-defined, which would break cross-toolchain reproducibility.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (no cached spare, fully deterministic).
    double normal() {
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    /// Independent stream identified by `idx`, derived from this state.
    Rng substream(std::uint64_t idx) const {
        Rng r(state_ ^ (0xD1B54A32D192ED03ULL * (idx + 1)));
        r.next_u64();
        return r;
    }

  private:
    std::uint64_t state_;
};

}  // namespace gsr

#endif  // GSR_RNG_HPP
