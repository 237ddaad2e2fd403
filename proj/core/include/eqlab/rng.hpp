#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace eqlab {

/// SplitMix64 finalizer. Used for seed derivation only.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Folds a list of keys into one 64-bit seed. Order-sensitive.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> keys) noexcept {
    std::uint64_t h = splitmix64(master);
    for (auto k : keys) h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL));
    return h;
}

/// Random stream with a fully specified algorithm.
///
/// Engine: std::mt19937_64, whose output sequence is fixed by the C++ standard.
/// Uniforms take the top 53 bits. Normals use the Box-Muller transform with the
/// second variate cached. Bounded integers use rejection on the top bits.
/// None of the std:: distributions are used because their algorithms are
/// implementation-defined, which would break cross-platform reproducibility.
///
/// Substreams: `split(key)` returns an independent stream seeded by
/// derive_seed(seed, {key}); it does not advance the parent.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in (0, 1].
    double uniform_pos() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);

    bool coin() { return (engine_() >> 63) != 0; }

    /// Standard normal.
    double normal();

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    Rng split(std::uint64_t key) const { return Rng(derive_seed(seed_, {key})); }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace eqlab
