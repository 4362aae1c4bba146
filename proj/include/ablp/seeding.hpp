#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace ablp {

// splitmix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  return mix64(seed ^ mix64(salt));
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt1, std::uint64_t salt2) {
  return derive_seed(derive_seed(seed, salt1), salt2);
}

using Engine = std::mt19937_64;

/// Uniform integer in [0, bound). Rejection sampling so results do not depend
/// on the standard library's distribution implementation.
inline std::uint64_t uniform_below(Engine& engine, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = Engine::max() - (Engine::max() % bound);
  std::uint64_t draw;
  do {
    draw = engine();
  } while (draw >= limit);
  return draw % bound;
}

/// Fisher-Yates shuffle with portable output for a given engine state.
template <typename T>
void shuffle(std::span<T> items, Engine& engine) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(engine, i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace ablp
