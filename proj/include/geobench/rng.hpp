#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace geobench::rng {

// mt19937_64 is fully specified by the standard, so the raw stream is
// identical on every platform. Bounded draws below avoid
// std::uniform_int_distribution / std::shuffle, whose algorithms are
// implementation-defined, so sampling replicates bit-for-bit anywhere.

inline std::uint64_t bounded(std::mt19937_64& gen, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("bounded: n must be positive");
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % n;
  std::uint64_t v;
  do {
    v = gen();
  } while (v >= limit);
  return v % n;
}

// Draws k items without replacement via a partial Fisher-Yates pass.
// Selection order is the draw order.
template <typename T>
std::vector<T> sample_without_replacement(std::vector<T> pool, size_t k, std::mt19937_64& gen) {
  if (k > pool.size()) throw std::invalid_argument("sample: k exceeds pool size");
  for (size_t i = 0; i < k; ++i) {
    size_t j = i + static_cast<size_t>(bounded(gen, pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

inline double unit_real(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace geobench::rng
