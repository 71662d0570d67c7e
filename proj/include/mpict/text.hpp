#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mpict/diagnostics.hpp"

namespace mpict {

inline bool is_hspace(char c) { return c == ' ' || c == '\t'; }

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

inline std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

// Collapses every whitespace run to a single space and trims the ends.
inline std::string normalize_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (is_space(c)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(c);
    }
  }
  return out;
}

// Splits on '\n'; the final line is kept even without a trailing newline,
// but a trailing newline does not create an extra empty line.
inline std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\n') {
      lines.emplace_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  if (start < text.size()) lines.emplace_back(text.substr(start));
  return lines;
}

// Newline-delimited line count; the final line counts even without a
// trailing newline. Empty text has zero lines.
inline int count_lines(std::string_view text) {
  if (text.empty()) return 0;
  int n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  if (text.back() != '\n') ++n;
  return n;
}

inline std::string_view leading_whitespace(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && is_hspace(line[i])) ++i;
  return line.substr(0, i);
}

inline bool is_blank(std::string_view line) { return trim(line).empty(); }

// Replaces bytes that do not form valid UTF-8 sequences with U+FFFD.
// GitHub-scraped sources are occasionally mis-encoded; downstream stages
// assume the text has been through this.
inline std::string sanitize_utf8(std::string_view text,
                                 Diagnostics* diags = nullptr) {
  static constexpr char kReplacement[] = "\xEF\xBF\xBD";
  std::string out;
  out.reserve(text.size());
  std::size_t bad = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    std::size_t extra;
    if (c < 0x80) {
      extra = 0;
    } else if ((c & 0xE0) == 0xC0 && c >= 0xC2) {
      extra = 1;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
    } else if ((c & 0xF8) == 0xF0 && c <= 0xF4) {
      extra = 3;
    } else {
      out.append(kReplacement);
      ++bad;
      ++i;
      continue;
    }
    bool ok = i + extra < text.size();
    for (std::size_t k = 1; ok && k <= extra; ++k)
      ok = (static_cast<unsigned char>(text[i + k]) & 0xC0) == 0x80;
    if (ok) {
      out.append(text.substr(i, extra + 1));
      i += extra + 1;
    } else {
      out.append(kReplacement);
      ++bad;
      ++i;
    }
  }
  if (bad > 0)
    report(diags, "invalid-utf8",
           std::to_string(bad) + " invalid byte(s) replaced");
  return out;
}

}  // namespace mpict
