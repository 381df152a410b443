#pragma once

#include <cstddef>
#include <string_view>

namespace prtitle::utf8 {

/// U+FFFD is returned for malformed sequences; `length` is then 1.
struct Decoded {
  char32_t code_point;
  std::size_t length;
};

inline constexpr char32_t kReplacement = 0xFFFD;

/// Decodes the code point starting at `pos`; requires pos < text.size().
Decoded decode(std::string_view text, std::size_t pos) noexcept;

void append(std::string& out, char32_t code_point);

bool is_alnum(char32_t code_point) noexcept;
char32_t to_lower(char32_t code_point) noexcept;

}  // namespace prtitle::utf8
