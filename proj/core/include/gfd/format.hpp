#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace gfd {

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

/// Comma-joined list of round-trip doubles.
std::string format_list(std::span<const double> values);

/// 64-bit FNV-1a, used to stamp output files with the config they came from.
std::uint64_t fnv1a64(std::string_view bytes);

std::string hex64(std::uint64_t value);

}  // namespace gfd
