// Copyright 2026 The ldphh Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LDPHH_BIT_VALUE_HPP_
#define LDPHH_BIT_VALUE_HPP_

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>

namespace ldphh {

// A private value as an MSB-first bit string of at most kMaxBits bits.
// prefix(j) keeps the j high-order bits. Bits beyond size() are always zero.
class BitValue {
 public:
  static constexpr unsigned kMaxBits = 256;
  static constexpr unsigned kWords = kMaxBits / 64;

  BitValue() = default;
  // All-zero string of the given length.
  explicit BitValue(unsigned length);

  // The integer `value` written with `length` bits. Throws InvalidArgument
  // when length > 64 or value does not fit.
  static BitValue from_uint(std::uint64_t value, unsigned length);
  // Bytes packed MSB-first, truncated or zero-padded to `length` bits.
  static BitValue from_bytes(std::span<const std::uint8_t> bytes,
                             unsigned length);
  // "0110" style literal.
  static BitValue from_binary(std::string_view bits);
  // Unsigned integer literals; the value must fit in `length` bits.
  static BitValue from_hex(std::string_view hex, unsigned length);
  static BitValue from_decimal(std::string_view digits, unsigned length);

  unsigned size() const noexcept { return length_; }
  bool empty() const noexcept { return length_ == 0; }

  bool bit(unsigned i) const;
  void set_bit(unsigned i, bool value);

  BitValue prefix(unsigned j) const;
  // This string followed by the low `bits` bits of `pattern` (MSB-first).
  BitValue append(std::uint64_t pattern, unsigned bits) const;
  // Bits [begin, begin+len) as an integer, len <= 64.
  std::uint64_t slice(unsigned begin, unsigned len) const;
  // Whole string as an integer; size() must be <= 64.
  std::uint64_t to_uint() const;

  std::string to_binary() const;
  // ceil(size/4) zero-padded hex digits of the integer value.
  std::string to_hex() const;
  std::string to_decimal() const;

  // Canonical 64-bit encoding of (length, bits) fed to the hash family.
  // Distinct strings of the same length <= 64 never share a key.
  std::uint64_t key() const noexcept;

  friend bool operator==(const BitValue&, const BitValue&) = default;
  // Shorter strings first; equal lengths compare as unsigned integers.
  friend std::strong_ordering operator<=>(const BitValue& a,
                                          const BitValue& b) noexcept;

 private:
  using Limbs = std::array<std::uint64_t, kWords>;  // little-endian integer
  Limbs to_limbs() const;
  static BitValue from_limbs(const Limbs& limbs, unsigned length);

  std::array<std::uint64_t, kWords> words_{};
  unsigned length_ = 0;
};

}  // namespace ldphh

template <>
struct std::hash<ldphh::BitValue> {
  std::size_t operator()(const ldphh::BitValue& v) const noexcept {
    return static_cast<std::size_t>(v.key());
  }
};

#endif  // LDPHH_BIT_VALUE_HPP_
