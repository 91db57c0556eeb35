#include "fragchain/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace fragchain {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string manifest_line(std::string_view manifest_text) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "# manifest %016llx",
                static_cast<unsigned long long>(fnv1a64(manifest_text)));
  return buf;
}

}  // namespace fragchain
