#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace fragchain {

/// Shortest representation that round-trips to the same double.
std::string format_double(double v);

/// 64-bit FNV-1a, stable across platforms and builds.
std::uint64_t fnv1a64(std::string_view bytes);

/// "# manifest <16 hex digits>" for the given manifest text.
std::string manifest_line(std::string_view manifest_text);

}  // namespace fragchain
