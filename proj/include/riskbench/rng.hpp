#ifndef RISKBENCH_RNG_HPP
#define RISKBENCH_RNG_HPP

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace riskbench {

/// Deterministic random source keyed by (seed, stream).
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. All derived draws (uniform reals, indices, Gaussians) are
/// computed here rather than through std:: distributions, whose algorithms
/// are implementation-defined, so identical keys give identical draws on
/// every platform.
class SeededRng {
public:
    SeededRng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    /// Independent child generator; children of distinct tags never share a key.
    SeededRng derive(std::uint64_t tag) const;

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform integer on [0, n). n must be positive.
    std::size_t index(std::size_t n);
    double gaussian();
    /// +1 or -1 with equal probability.
    double sign() { return (engine_() >> 63) ? 1.0 : -1.0; }

    /// Index drawn with probability weights[i] / sum(weights). Zero-weight
    /// entries are never returned while any weight is positive. Returns
    /// weights.size() when the total mass is not positive.
    std::size_t weighted_index(std::span<const double> weights);

    /// n distinct indices from [0, population), returned in increasing order.
    std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t n);
    /// n indices drawn uniformly with replacement, returned in increasing order.
    std::vector<std::size_t> sample_with_replacement(std::size_t population, std::size_t n);

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// SplitMix64 finaliser, used to mix seed material.
std::uint64_t mix64(std::uint64_t x);
/// Combine several integers into one well-mixed key.
std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b);

}  // namespace riskbench

#endif  // RISKBENCH_RNG_HPP
