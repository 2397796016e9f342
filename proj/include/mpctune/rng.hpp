#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mpctune::rng {

using Engine = std::mt19937_64;

// splitmix64 finalizer; full avalanche, so consecutive counters give
// uncorrelated outputs.
constexpr std::uint64_t mix(std::uint64_t v) {
  v += 0x9e3779b97f4a7c15ULL;
  v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
  v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
  return v ^ (v >> 31);
}

// Derives an independent stream seed from a master seed and a path of
// counters (phase, point index, repeat index, ...).  Every consumer of
// randomness gets its own engine built from such a path, so adding or
// reordering draws in one phase never shifts another phase's stream.
inline std::uint64_t derive(std::uint64_t seed,
                            std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix(seed);
  for (std::uint64_t p : path) h = mix(h ^ p);
  return h;
}

inline Engine engine_at(std::uint64_t seed,
                        std::initializer_list<std::uint64_t> path) {
  return Engine(derive(seed, path));
}

// Stream identifiers used as the first path element.
enum Stream : std::uint64_t {
  pilot_stream = 1,
  online_stream = 2,
  acquisition_stream = 3,
  theta_fit_stream = 4,
  sweep_stream = 5,
  compare_stream = 6,
  feature_stream = 7,
};

}  // namespace mpctune::rng
