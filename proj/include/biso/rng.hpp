#ifndef BISO_RNG_HPP
#define BISO_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace biso {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream seed for (seed, k1, k2, ...). Distinct key tuples give unrelated streams.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

// Named stages, used as the last key when deriving per-trial streams.
enum class Stage : std::uint64_t {
  ground_truth = 1,
  sample = 2,
  split = 3,
  estimator = 4,
  wrapper = 5,
};

inline std::uint64_t stage_key(Stage s) noexcept { return static_cast<std::uint64_t>(s); }

}  // namespace biso

#endif  // BISO_RNG_HPP
