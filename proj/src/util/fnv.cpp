#include "dsched/util/fnv.hpp"

#include <cstdio>

namespace dsched {

std::string hex_digest(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return std::string(buf);
}

std::uint64_t digest_of(const std::string& text) { return Fnv1a{}.str(text).hash; }

}  // namespace dsched
