// Copyright 2026 The concatmt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "concatmt/error.hpp"

namespace concatmt::text {

inline constexpr bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

/// Splits on ASCII whitespace runs; never yields empty tokens.
inline void split_into(std::string_view s, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    while (i < n && is_space(s[i])) ++i;
    const std::size_t start = i;
    while (i < n && !is_space(s[i])) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
}

inline std::vector<std::string_view> split(std::string_view s) {
  std::vector<std::string_view> out;
  split_into(s, out);
  return out;
}

inline std::size_t count_tokens(std::string_view s) noexcept {
  std::size_t count = 0;
  bool in_token = false;
  for (char c : s) {
    const bool space = is_space(c);
    if (!space && !in_token) ++count;
    in_token = !space;
  }
  return count;
}

inline std::size_t count_token(std::string_view s, std::string_view token) noexcept {
  std::size_t count = 0;
  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    while (i < n && is_space(s[i])) ++i;
    const std::size_t start = i;
    while (i < n && !is_space(s[i])) ++i;
    if (i > start && s.substr(start, i - start) == token) ++count;
  }
  return count;
}

/// Returns true iff s is well-formed UTF-8 (no overlongs, no surrogates,
/// nothing above U+10FFFF).
inline bool valid_utf8(std::string_view s) noexcept {
  const auto* p = reinterpret_cast<const unsigned char*>(s.data());
  const auto* end = p + s.size();
  while (p < end) {
    const unsigned char c = *p;
    if (c < 0x80) {
      ++p;
      continue;
    }
    int extra;
    std::uint32_t cp;
    if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (end - p <= extra) return false;
    for (int k = 1; k <= extra; ++k) {
      if ((p[k] & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (p[k] & 0x3F);
    }
    static constexpr std::uint32_t kMin[] = {0, 0x80, 0x800, 0x10000};
    if (cp < kMin[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    p += extra + 1;
  }
  return true;
}

inline std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && (is_space(s.front()) || s.front() == '\n')) s.remove_prefix(1);
  while (!s.empty() && (is_space(s.back()) || s.back() == '\n')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split_on(std::string_view s, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == delim) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

/// Shortest decimal string that round-trips to the same double.
inline std::string format_full(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw Error("cannot format number");
  return std::string(buf, ptr);
}

/// Fixed-point rendering with `decimals` places, rounding half to even on
/// the shortest round-trip decimal expansion of v (so 0.25 -> "0.2" and
/// 0.35 -> "0.4" at one place, independent of binary representation).
inline std::string format_rounded(double v, int decimals = 1) {
  if (!std::isfinite(v)) throw Error("cannot format non-finite number");
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  if (ec != std::errc{}) throw Error("cannot format number");
  std::string s(buf, ptr);
  bool negative = false;
  if (!s.empty() && s[0] == '-') {
    negative = true;
    s.erase(0, 1);
  }
  std::string int_part = s;
  std::string frac_part;
  if (const auto dot = s.find('.'); dot != std::string::npos) {
    int_part = s.substr(0, dot);
    frac_part = s.substr(dot + 1);
  }
  const auto keep = static_cast<std::size_t>(decimals);
  std::string digits = int_part + frac_part.substr(0, std::min(keep, frac_part.size()));
  digits.append(keep - std::min(keep, frac_part.size()), '0');
  if (frac_part.size() > keep) {
    const std::string_view rest = std::string_view(frac_part).substr(keep);
    const char first = rest[0];
    const bool tail_nonzero = rest.substr(1).find_first_not_of('0') != std::string_view::npos;
    bool round_up = first > '5' || (first == '5' && tail_nonzero);
    if (first == '5' && !tail_nonzero) round_up = ((digits.back() - '0') % 2) == 1;
    if (round_up) {
      int i = static_cast<int>(digits.size()) - 1;
      while (i >= 0 && digits[static_cast<std::size_t>(i)] == '9') {
        digits[static_cast<std::size_t>(i)] = '0';
        --i;
      }
      if (i < 0) {
        digits.insert(digits.begin(), '1');
      } else {
        ++digits[static_cast<std::size_t>(i)];
      }
    }
  }
  std::string out = digits.substr(0, digits.size() - keep);
  if (keep > 0) out += "." + digits.substr(digits.size() - keep);
  if (negative && out.find_first_not_of("0.") != std::string::npos) out.insert(out.begin(), '-');
  return out;
}

template <typename T>
T parse_number(std::string_view s, std::string_view what) {
  s = trim(s);
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw InputError("invalid " + std::string(what) + ": '" + std::string(s) + "'");
  }
  return value;
}

/// 64-bit FNV-1a, used for provenance fingerprints of written files.
class Fnv1a {
 public:
  void update(std::string_view bytes) noexcept {
    for (unsigned char c : bytes) {
      hash_ ^= c;
      hash_ *= 0x100000001b3ULL;
    }
  }
  std::uint64_t value() const noexcept { return hash_; }
  std::string hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out(16, '0');
    std::uint64_t h = hash_;
    for (int i = 15; i >= 0; --i) {
      out[static_cast<std::size_t>(i)] = kDigits[h & 0xF];
      h >>= 4;
    }
    return out;
  }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

}  // namespace concatmt::text
