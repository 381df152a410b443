#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace prtitle {

using Timestamp = std::chrono::sys_seconds;

/// Accepts "YYYY-MM-DDTHH:MM:SSZ" (optionally with fractional seconds, which
/// are dropped). Other offsets are rejected.
std::optional<Timestamp> parse_iso8601(std::string_view text);

std::string format_iso8601(Timestamp ts);

}  // namespace prtitle
