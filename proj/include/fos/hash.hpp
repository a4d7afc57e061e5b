#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

namespace fos {

// FNV-1a 64-bit, used for artifact checksums and config hashes.
inline uint64_t fnv1a64(const void* data, size_t n, uint64_t h = 0xcbf29ce484222325ull) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

inline std::string hash_hex(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

inline std::string hash_hex(const std::string& s) { return hash_hex(fnv1a64(s)); }

inline std::string hash_hex(const std::vector<unsigned char>& v) {
  return hash_hex(fnv1a64(v.data(), v.size()));
}

}  // namespace fos
