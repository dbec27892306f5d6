/* UTF-8 <-> UTF-32 conversion and input normalization */

#ifndef MORPHOUNIFY_CHARS_HPP
#define MORPHOUNIFY_CHARS_HPP

#include <string>
#include <string_view>

namespace morphounify {

using Char = char32_t;

std::u32string utf8_to_u32(std::string_view s);
std::string u32_to_utf8(std::u32string_view s);

// Composes Latin base letters followed by a combining diaeresis (U+0308)
// into their precomposed forms, so "ä" and "ä" read identically.
std::u32string normalize_input(std::u32string_view s);

inline std::string u32_to_utf8(Char c) { return u32_to_utf8(std::u32string(1, c)); }

} // namespace morphounify

#endif
