#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace skt {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent sub-streams of a master seed. Every random consumer in a run
/// draws from its own stream so that adding or reordering consumers never
/// shifts another consumer's sequence.
enum class Stream : std::uint64_t {
    expert_session = 1,
    learner_session = 2,
    split = 3,
    structure = 4,
    restart = 5,
};

/// Counter-based seed derivation:
///   derive_seed(m, c, s) = splitmix64(splitmix64(splitmix64(m) ^ c) ^ s)
/// `counter` is the iteration (0-based) or restart index.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter,
                                    std::uint64_t stream) noexcept {
    return splitmix64(splitmix64(splitmix64(master) ^ counter) ^ stream);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter,
                                    Stream stream) noexcept {
    return derive_seed(master, counter, static_cast<std::uint64_t>(stream));
}

/// mt19937_64 with distribution code owned here, so sequences are identical
/// across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, n); n must be positive.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = -n % n;  // 2^64 mod n
        for (;;) {
            const std::uint64_t x = engine_();
            if (x >= limit) return x % n;
        }
    }

    /// Index drawn proportionally to non-negative weights. Zero-weight
    /// entries are never returned.
    std::size_t categorical(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        const double u = uniform() * total;
        double cum = 0.0;
        std::size_t last_positive = 0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] <= 0.0) continue;
            cum += weights[i];
            last_positive = i;
            if (u < cum) return i;
        }
        return last_positive;
    }

    template <typename It>
    void shuffle(It first, It last) {
        const auto n = static_cast<std::uint64_t>(last - first);
        for (std::uint64_t i = n; i > 1; --i) {
            const std::uint64_t j = below(i);
            std::swap(first[i - 1], first[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace skt
