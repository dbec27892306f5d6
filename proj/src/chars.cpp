#include "morphounify/chars.hpp"

#include "morphounify/errors.hpp"

namespace morphounify {

std::u32string utf8_to_u32(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    unsigned char b = s[i];
    char32_t cp;
    int extra;
    if (b < 0x80) {
      cp = b;
      extra = 0;
    } else if ((b & 0xE0) == 0xC0) {
      cp = b & 0x1F;
      extra = 1;
    } else if ((b & 0xF0) == 0xE0) {
      cp = b & 0x0F;
      extra = 2;
    } else if ((b & 0xF8) == 0xF0) {
      cp = b & 0x07;
      extra = 3;
    } else {
      throw EngineError("invalid UTF-8 byte in input");
    }
    if (i + extra >= s.size())
      throw EngineError("truncated UTF-8 sequence");
    for (int k = 1; k <= extra; ++k) {
      unsigned char c = s[i + k];
      if ((c & 0xC0) != 0x80)
        throw EngineError("invalid UTF-8 continuation byte");
      cp = (cp << 6) | (c & 0x3F);
    }
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

std::string u32_to_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : s) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

namespace {

char32_t compose_diaeresis(char32_t base) {
  switch (base) {
  case U'a': return U'ä';
  case U'o': return U'ö';
  case U'u': return U'ü';
  case U'e': return U'ë';
  case U'i': return U'ï';
  case U'A': return U'Ä';
  case U'O': return U'Ö';
  case U'U': return U'Ü';
  default: return 0;
  }
}

} // namespace

std::u32string normalize_input(std::u32string_view s) {
  std::u32string out;
  out.reserve(s.size());
  for (char32_t cp : s) {
    if (cp == 0x0308 && !out.empty()) {
      if (char32_t composed = compose_diaeresis(out.back())) {
        out.back() = composed;
        continue;
      }
    }
    out.push_back(cp);
  }
  return out;
}

} // namespace morphounify
