#pragma once
// Deterministic random streams.
//
// Every draw in a batch comes from an engine seeded by hashing a path of
// integers (master seed, trajectory, agent, trial, purpose). The hash is the
// SplitMix64 finalizer folded over the path, so a stream depends only on its
// coordinates and never on scheduling order.

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace chai {

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = mix64(master);
    for (std::uint64_t p : path) h = mix64(h ^ mix64(p + 0x632BE59BD9B4E019ULL));
    return h;
}

// Purposes distinguish independent streams at the same coordinates.
enum class StreamPurpose : std::uint64_t { schedule = 1, speak = 2, listen = 3, inference = 4, bootstrap = 5 };

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1) with 53 random bits; independent of the standard
    // library's distribution implementations.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    int below(int n) { return static_cast<int>(uniform() * n); }

    bool coin(double p = 0.5) { return uniform() < p; }

    // Index drawn from unnormalized non-negative weights.
    std::size_t categorical(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double u = uniform() * total;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            u -= weights[i];
            if (u < 0.0) return i;
        }
        for (std::size_t i = weights.size(); i-- > 0;)
            if (weights[i] > 0.0) return i;
        return 0;
    }

    template <class T>
    void shuffle(std::span<T> xs) {
        for (std::size_t i = xs.size(); i > 1; --i) std::swap(xs[i - 1], xs[static_cast<std::size_t>(below(static_cast<int>(i)))]);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace chai
