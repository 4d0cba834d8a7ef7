#pragma once

#include <cstdint>
#include <random>

namespace cat0 {

using Rng = std::mt19937_64;

/// splitmix64 finaliser; used to derive independent per-task seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  return Rng(mix_seed(seed, stream));
}

double uniform(Rng& rng, double lo = 0.0, double hi = 1.0);
double gaussian(Rng& rng);
std::size_t uniform_index(Rng& rng, std::size_t n);

}  // namespace cat0
