#pragma once

#include <cstdint>
#include <random>

namespace imsprep {

// Deterministic random source. std::mt19937_64 is bit-exact across
// platforms, but the standard distributions are not, so every
// distribution here is implemented by hand. Identical seeds therefore
// give bitwise-identical draw sequences everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 bits of mantissa.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    // Uniform integer in [lo, hi], inclusive, unbiased.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    // Box-Muller with cached spare.
    double normal(double mu, double sigma);

    double laplace(double mu, double scale);

    // Index draw proportional to the given nonnegative weights. Falls back
    // to a uniform index when all weights are zero.
    std::size_t discrete(const std::vector<double>& weights);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Stream derivation: mixes a base seed with a stream index so replicates
// get independent, reproducible generators.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace imsprep
