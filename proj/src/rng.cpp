#include "riskbench/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_set>

#include "riskbench/error.hpp"

namespace riskbench {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    return mix64(mix64(a) ^ (b + 0x632be59bd9b4e019ULL + (a << 6) + (a >> 2)));
}

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(hash_combine(seed, stream)) {}

SeededRng SeededRng::derive(std::uint64_t tag) const {
    return SeededRng(seed_, hash_combine(stream_, tag));
}

double SeededRng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t SeededRng::index(std::size_t n) {
    if (n == 0) throw Error(ErrorKind::EmptyInput, "index() over an empty range");
    // rejection sampling removes modulo bias
    const std::uint64_t range = n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return static_cast<std::size_t>(x % range);
}

double SeededRng::gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::size_t SeededRng::weighted_index(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) return weights.size();
    const double target = uniform() * total;
    double acc = 0.0;
    std::size_t last_positive = weights.size();
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        acc += weights[i];
        last_positive = i;
        if (target < acc) return i;
    }
    // roundoff pushed target past the accumulated mass
    return last_positive;
}

std::vector<std::size_t> SeededRng::sample_without_replacement(std::size_t population, std::size_t n) {
    if (n > population) throw Error(ErrorKind::SampleTooLarge, "sample larger than population");
    std::vector<std::size_t> out;
    out.reserve(n);
    if (2 * n >= population) {
        std::vector<std::size_t> all(population);
        for (std::size_t i = 0; i < population; ++i) all[i] = i;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = i + index(population - i);
            std::swap(all[i], all[j]);
            out.push_back(all[i]);
        }
    } else {
        // Floyd's algorithm: O(n) memory for sparse samples
        std::unordered_set<std::size_t> chosen;
        chosen.reserve(2 * n);
        for (std::size_t j = population - n; j < population; ++j) {
            const std::size_t t = index(j + 1);
            if (chosen.insert(t).second) {
                out.push_back(t);
            } else {
                chosen.insert(j);
                out.push_back(j);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::size_t> SeededRng::sample_with_replacement(std::size_t population, std::size_t n) {
    std::vector<std::size_t> out(n);
    for (auto& v : out) v = index(population);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace riskbench
