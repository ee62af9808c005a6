#pragma once

#include <cstdint>
#include <string_view>

namespace guiflow {

// FNV-1a, 64-bit. Used wherever a hash must be stable across platforms and
// standard library versions (feature hashing, dedup keys).
inline std::uint64_t fnv1a64(std::string_view s,
                             std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace guiflow
