// FNV-1a over the bit patterns of every number in an instance.

#pragma once

#include <bit>
#include <cstdint>

#include "rmab/core.hpp"

namespace rmab::testing {

inline std::uint64_t fnv1a(std::uint64_t h, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int k = 0; k < 8; ++k) {
    h ^= (bits >> (8 * k)) & 0xffu;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t instance_checksum(const BanditInstance& inst) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& arm : inst.arms) {
    for (double v : arm.p_active.data()) h = fnv1a(h, v);
    for (double v : arm.p_passive.data()) h = fnv1a(h, v);
    for (double v : arm.click_prob) h = fnv1a(h, v);
  }
  for (const auto& b : inst.initial_beliefs)
    for (double v : b) h = fnv1a(h, v);
  for (std::size_t x : inst.initial_states) h = fnv1a(h, static_cast<double>(x));
  return fnv1a(h, inst.discount);
}

inline constexpr std::uint64_t kExample1Checksum = 11585789903389703791ull;
inline constexpr std::uint64_t kExample2Checksum = 1292485616304619993ull;
inline constexpr std::uint64_t kExample3Checksum = 1038576477709363238ull;

}  // namespace rmab::testing
