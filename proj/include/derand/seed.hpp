/*
 * Copyright 2026 The derand Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "derand/error.hpp"

namespace derand {

/// SplitMix64 finalizer. Bijective on 64-bit words.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Sequential SplitMix64 stream; used to expand one 64-bit seed into field elements.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Seed for sub-stream `index` under `parent`. Distinct indices give distinct seeds
/// because mix64 is a bijection and the offsets are injective.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept {
  return mix64(parent ^ mix64(index + 0x632be59bd9b4e019ULL));
}

namespace hex {

[[nodiscard]] inline std::string encode_word(std::uint64_t v, unsigned digits) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(digits, '0');
  for (unsigned i = 0; i < digits; ++i) {
    out[digits - 1 - i] = kDigits[(v >> (4 * i)) & 0xF];
  }
  return out;
}

[[nodiscard]] inline std::uint64_t decode_word(std::string_view s) {
  if (s.empty() || s.size() > 16) throw ConfigError("hex word must have 1..16 digits");
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError("malformed hex: '" + std::string(s) + "'");
  }
  return v;
}

/// Digits needed for one w-bit word.
[[nodiscard]] constexpr unsigned digits_for(unsigned bits) noexcept { return (bits + 3) / 4; }

/// Fixed-width words, first word first.
[[nodiscard]] inline std::string encode_words(const std::vector<std::uint64_t>& words, unsigned bits) {
  std::string out;
  out.reserve(words.size() * digits_for(bits));
  for (auto w : words) out += encode_word(w, digits_for(bits));
  return out;
}

[[nodiscard]] inline std::vector<std::uint64_t> decode_words(std::string_view s, unsigned bits,
                                                             std::size_t count) {
  const unsigned digits = digits_for(bits);
  if (s.size() != static_cast<std::size_t>(digits) * count) {
    throw ConfigError("hex seed has " + std::to_string(s.size()) + " digits, expected " +
                      std::to_string(static_cast<std::size_t>(digits) * count));
  }
  std::vector<std::uint64_t> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(decode_word(s.substr(i * digits, digits)));
  return out;
}

/// Parse a 64-bit master seed: hex digits with optional 0x prefix.
[[nodiscard]] inline std::uint64_t parse_seed(std::string_view s) {
  if (s.starts_with("0x") || s.starts_with("0X")) s.remove_prefix(2);
  return decode_word(s);
}

[[nodiscard]] inline std::string format_seed(std::uint64_t seed) { return "0x" + encode_word(seed, 16); }

}  // namespace hex
}  // namespace derand
