#pragma once

#include <cmath>
#include <cstdint>

namespace mde::rng {

// Counter-based generator: output k of stream `seed` is a pure function of
// (seed, k), so replications can be split by seed offset and any draw can be
// reproduced without replaying the stream.  Mixing function is splitmix64.
inline std::uint64_t mix(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t z = seed + counter * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Uniform draw in (0, 1]; never 0 so log() below is safe.
inline double uniform(std::uint64_t seed, std::uint64_t counter) {
    return static_cast<double>((mix(seed, counter) >> 11) + 1) * 0x1.0p-53;
}

// Standard normal stream via Box-Muller on counter pairs.  Bit-identical for
// a given (seed, draw index) on a given build, independent of thread count.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : seed_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform(seed_, counter_++);
        const double u2 = uniform(seed_, counter_++);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace mde::rng
