#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace loopsim {

using Rng = std::mt19937_64;

/// Purpose tags mixed into derived seeds so that independent consumers of
/// randomness never share a stream.
enum class Stream : std::uint64_t {
  kSplit = 1,
  kFit = 2,
  kChoice = 3,
  kSynthetic = 4,
  kScorer = 5,
};

/// Derives a child seed from a master seed and a path of integers. Every
/// random stream in a simulation is a pure function of (master seed, path),
/// which makes results independent of evaluation order and makes a resumed
/// run replay exactly.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

inline std::uint64_t derive_seed(std::uint64_t master, Stream stream,
                                 std::initializer_list<std::uint64_t> rest = {}) {
  std::uint64_t seed = derive_seed(master, {static_cast<std::uint64_t>(stream)});
  return rest.size() == 0 ? seed : derive_seed(seed, rest);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// 64-bit FNV-1a.
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t hash = 0xcbf29ce484222325ULL) noexcept {
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x00000100000001b3ULL;
  }
  return hash;
}

/// Uniform real in [0, 1) built from the top 53 bits of one draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace loopsim
