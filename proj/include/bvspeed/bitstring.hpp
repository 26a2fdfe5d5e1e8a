// Copyright 2026 The bvspeed Authors
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

#include <bit>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "bvspeed/errors.hpp"

namespace bvspeed {

/**
 * Fixed-length bit string of at most 64 bits.
 *
 * Position 0 is the first character of the textual form and the most
 * significant bit of value(), so numeric order equals lexicographic order.
 * In BV data it is logical qubit 0.
 */
class Bitstring {
 public:
  static constexpr std::size_t kMaxLength = 64;

  Bitstring() = default;

  explicit Bitstring(std::size_t length, std::uint64_t value = 0) : length_(length) {
    if (length > kMaxLength) {
      throw ConfigError("bitstring length " + std::to_string(length) + " exceeds 64");
    }
    if (length < kMaxLength && (value >> length) != 0) {
      throw ConfigError("bitstring value does not fit in " + std::to_string(length) + " bits");
    }
    value_ = value;
  }

  static Bitstring parse(std::string_view text) {
    if (text.size() > kMaxLength) throw ConfigError("bitstring longer than 64 bits");
    std::uint64_t v = 0;
    for (char c : text) {
      if (c != '0' && c != '1') {
        throw ConfigError("invalid bitstring character '" + std::string(1, c) + "'");
      }
      v = (v << 1) | static_cast<std::uint64_t>(c == '1');
    }
    return Bitstring(text.size(), v);
  }

  /// 1^k 0^(n-k).
  static Bitstring ones_then_zeros(std::size_t n, std::size_t k) {
    if (k > n) throw ConfigError("more ones than bits");
    Bitstring b(n);
    for (std::size_t i = 0; i < k; ++i) b = b.with_bit(i, true);
    return b;
  }

  std::size_t size() const { return length_; }
  std::uint64_t value() const { return value_; }
  std::size_t hamming_weight() const { return static_cast<std::size_t>(std::popcount(value_)); }

  bool operator[](std::size_t i) const { return ((value_ >> shift(i)) & 1U) != 0; }

  Bitstring with_bit(std::size_t i, bool v) const {
    Bitstring out = *this;
    const std::uint64_t mask = std::uint64_t{1} << shift(i);
    out.value_ = v ? (value_ | mask) : (value_ & ~mask);
    return out;
  }

  /// First m positions.
  Bitstring prefix(std::size_t m) const {
    if (m > length_) throw ConfigError("prefix longer than bitstring");
    if (m == 0) return Bitstring(0);
    return Bitstring(m, value_ >> (length_ - m));
  }

  std::string to_string() const {
    std::string s(length_, '0');
    for (std::size_t i = 0; i < length_; ++i) {
      if ((*this)[i]) s[i] = '1';
    }
    return s;
  }

  friend bool operator==(const Bitstring&, const Bitstring&) = default;
  friend std::strong_ordering operator<=>(const Bitstring& a, const Bitstring& b) {
    if (auto c = a.length_ <=> b.length_; c != 0) return c;
    return a.value_ <=> b.value_;
  }

 private:
  std::size_t shift(std::size_t i) const {
    if (i >= length_) throw std::out_of_range("bit index out of range");
    return length_ - 1 - i;
  }

  std::size_t length_ = 0;
  std::uint64_t value_ = 0;
};

}  // namespace bvspeed
