// SPDX-License-Identifier: Apache-2.0
#include "isac/rng.hpp"

#include <array>
#include <cmath>

namespace isac {
namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

Engine make_stream(std::uint64_t seed, Stage stage, std::uint64_t trial, std::uint64_t index)
{
    std::uint64_t key = splitmix64(seed);
    key = splitmix64(key ^ static_cast<std::uint64_t>(stage));
    key = splitmix64(key ^ trial);
    key = splitmix64(key ^ index);

    std::array<std::uint32_t, 8> words{};
    std::uint64_t state = key;
    for (std::size_t i = 0; i < words.size(); i += 2) {
        state = splitmix64(state);
        words[i] = static_cast<std::uint32_t>(state);
        words[i + 1] = static_cast<std::uint32_t>(state >> 32);
    }
    std::seed_seq seq(words.begin(), words.end());
    return Engine(seq);
}

std::complex<double> circular_normal(Engine& rng)
{
    std::normal_distribution<double> dist(0.0, std::sqrt(0.5));
    const double re = dist(rng);
    const double im = dist(rng);
    return {re, im};
}

double uniform(Engine& rng, double lo, double hi)
{
    std::uniform_real_distribution<double> dist(lo, hi);
    return dist(rng);
}

double standard_normal(Engine& rng)
{
    std::normal_distribution<double> dist(0.0, 1.0);
    return dist(rng);
}

}  // namespace isac
