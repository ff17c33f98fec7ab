#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "wd/errors.hpp"

namespace wd {

// splitmix64 step; used for seed mixing and child-stream derivation.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Seeded generator with explicit child-stream derivation. All randomness in
// the library flows through instances of this class, so a run is fully
// determined by one master seed no matter how trials are scheduled.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        std::seed_seq seq{splitmix64_next(s), splitmix64_next(s), splitmix64_next(s), splitmix64_next(s)};
        engine_.seed(seq);
    }

    // Independent stream derived from (master, stream); streams with distinct
    // ids are decorrelated by the splitmix64 avalanche.
    static Rng child(std::uint64_t master, std::uint64_t stream) {
        std::uint64_t s = master ^ (0xA0761D6478BD642Full * (stream + 1));
        return Rng(splitmix64_next(s));
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Unbiased uniform integer in [0, bound).
    std::uint64_t uniform_below(std::uint64_t bound) {
        if (bound == 0) throw validation_error("uniform_below: bound must be positive");
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t x = next_u64();
        while (x >= limit) x = next_u64();
        return x % bound;
    }

    template <class T>
    void shuffle(std::span<T> values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// Inverse-CDF draw from a probability vector (weights sum to 1).
inline int sample_index(std::span<const double> pmf, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < pmf.size(); ++i) {
        acc += pmf[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(pmf.size()) - 1;
}

} // namespace wd
