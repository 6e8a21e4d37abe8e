// SPDX-License-Identifier: Apache-2.0

#ifndef MOFGCN_RNG_HPP
#define MOFGCN_RNG_HPP

#include <cstdint>

namespace mofgcn {

/// splitmix64 finalizer; used to derive independent stream seeds from one
/// root seed (per graph, per subsystem) so generation parallelizes without
/// changing output.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace mofgcn

#endif  // MOFGCN_RNG_HPP
