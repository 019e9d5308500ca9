#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace neuralrank {

std::uint64_t fnv1a64(std::string_view bytes);

/// "fnv1a64:" followed by 16 lowercase hex digits.
std::string digest_string(std::string_view canonical);

/// Current UTC time as ISO-8601 with a trailing 'Z'.
std::string utc_timestamp();

}  // namespace neuralrank
