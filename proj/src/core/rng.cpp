#include "core/rng.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace imsprep {

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next_u64());  // full 64-bit range
    // Lemire's unbiased bounded draw.
    std::uint64_t x = next_u64();
    unsigned __int128 m = static_cast<unsigned __int128>(x) * span;
    auto low = static_cast<std::uint64_t>(m);
    if (low < span) {
        const std::uint64_t threshold = (0 - span) % span;
        while (low < threshold) {
            x = next_u64();
            m = static_cast<unsigned __int128>(x) * span;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return lo + static_cast<std::int64_t>(m >> 64);
}

double Rng::normal(double mu, double sigma) {
    if (has_spare_) {
        has_spare_ = false;
        return mu + sigma * spare_;
    }
    // uniform() is in [0,1); flip to (0,1] so the log stays finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return mu + sigma * radius * std::cos(angle);
}

double Rng::laplace(double mu, double scale) {
    const double u = uniform() - 0.5;
    const double magnitude = -std::log(1.0 - 2.0 * std::abs(u));
    return u >= 0.0 ? mu + scale * magnitude : mu - scale * magnitude;
}

std::size_t Rng::discrete(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) {
        return static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(weights.size()) - 1));
    }
    const double target = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        acc += weights[i];
        if (target < acc) return i;
    }
    return weights.size() - 1;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 over seed xor golden-ratio-spaced stream index
    std::uint64_t z = seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace imsprep
