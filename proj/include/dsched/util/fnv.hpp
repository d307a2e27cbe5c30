#pragma once

#include <cstdint>
#include <cstring>
#include <string>

namespace dsched {

// FNV-1a, used for pool fingerprints, trajectory digests and determinism checks.
struct Fnv1a {
  std::uint64_t hash = 1469598103934665603ULL;

  Fnv1a& bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      hash ^= p[i];
      hash *= 1099511628211ULL;
    }
    return *this;
  }

  Fnv1a& str(const std::string& s) { return bytes(s.data(), s.size()); }

  Fnv1a& u64(std::uint64_t v) { return bytes(&v, sizeof v); }

  Fnv1a& i64(std::int64_t v) { return bytes(&v, sizeof v); }

  Fnv1a& f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    return u64(bits);
  }
};

std::string hex_digest(std::uint64_t hash);
std::uint64_t digest_of(const std::string& text);

}  // namespace dsched
