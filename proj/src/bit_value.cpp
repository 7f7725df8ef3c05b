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

#include "ldphh/bit_value.hpp"

#include <algorithm>

#include "ldphh/error.hpp"
#include "ldphh/hashing.hpp"

namespace ldphh {

namespace {

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

void check_length(unsigned length) {
  if (length > BitValue::kMaxBits) {
    throw InvalidArgument("bit length " + std::to_string(length) +
                          " exceeds " + std::to_string(BitValue::kMaxBits));
  }
}

}  // namespace

BitValue::BitValue(unsigned length) : length_(length) { check_length(length); }

BitValue BitValue::from_uint(std::uint64_t value, unsigned length) {
  if (length > 64) throw InvalidArgument("from_uint supports at most 64 bits");
  if (length < 64 && (value >> length) != 0) {
    throw InvalidArgument("value " + std::to_string(value) +
                          " does not fit in " + std::to_string(length) +
                          " bits");
  }
  BitValue out(length);
  if (length > 0) out.words_[0] = value << (64 - length);
  return out;
}

BitValue BitValue::from_bytes(std::span<const std::uint8_t> bytes,
                              unsigned length) {
  BitValue out(length);
  const std::size_t used = std::min<std::size_t>(bytes.size(), (length + 7) / 8);
  for (std::size_t i = 0; i < used; ++i) {
    out.words_[i / 8] |= std::uint64_t{bytes[i]} << (56 - 8 * (i % 8));
  }
  // Truncation may have cut into the last byte.
  return out.prefix(length);
}

BitValue BitValue::from_binary(std::string_view bits) {
  BitValue out(static_cast<unsigned>(bits.size()));
  for (unsigned i = 0; i < bits.size(); ++i) {
    if (bits[i] != '0' && bits[i] != '1') {
      throw InvalidArgument("not a binary literal: " + std::string(bits));
    }
    out.set_bit(i, bits[i] == '1');
  }
  return out;
}

BitValue BitValue::from_hex(std::string_view hex, unsigned length) {
  check_length(length);
  if (hex.empty()) throw InvalidArgument("empty hex literal");
  Limbs limbs{};
  for (char c : hex) {
    const int d = hex_digit(c);
    if (d < 0) throw InvalidArgument("not a hex literal: " + std::string(hex));
    if (limbs[kWords - 1] >> 60) {
      throw InvalidArgument("hex literal exceeds 256 bits");
    }
    for (unsigned i = kWords - 1; i > 0; --i) {
      limbs[i] = (limbs[i] << 4) | (limbs[i - 1] >> 60);
    }
    limbs[0] = (limbs[0] << 4) | static_cast<std::uint64_t>(d);
  }
  return from_limbs(limbs, length);
}

BitValue BitValue::from_decimal(std::string_view digits, unsigned length) {
  check_length(length);
  if (digits.empty()) throw InvalidArgument("empty integer literal");
  Limbs limbs{};
  for (char c : digits) {
    if (c < '0' || c > '9') {
      throw InvalidArgument("not a decimal integer: " + std::string(digits));
    }
    unsigned __int128 carry = static_cast<unsigned>(c - '0');
    for (auto& limb : limbs) {
      const unsigned __int128 t = static_cast<unsigned __int128>(limb) * 10 + carry;
      limb = static_cast<std::uint64_t>(t);
      carry = t >> 64;
    }
    if (carry != 0) throw InvalidArgument("integer exceeds 256 bits");
  }
  return from_limbs(limbs, length);
}

bool BitValue::bit(unsigned i) const {
  if (i >= length_) throw InvalidArgument("bit index out of range");
  return (words_[i / 64] >> (63 - i % 64)) & 1U;
}

void BitValue::set_bit(unsigned i, bool value) {
  if (i >= length_) throw InvalidArgument("bit index out of range");
  const std::uint64_t mask = std::uint64_t{1} << (63 - i % 64);
  if (value) {
    words_[i / 64] |= mask;
  } else {
    words_[i / 64] &= ~mask;
  }
}

BitValue BitValue::prefix(unsigned j) const {
  if (j > length_) throw InvalidArgument("prefix longer than value");
  BitValue out;
  out.length_ = j;
  for (unsigned w = 0; w < kWords; ++w) {
    const unsigned lo = 64 * w;
    if (j >= lo + 64) {
      out.words_[w] = words_[w];
    } else if (j > lo) {
      out.words_[w] = words_[w] & (~std::uint64_t{0} << (64 - (j - lo)));
    }
  }
  return out;
}

BitValue BitValue::append(std::uint64_t pattern, unsigned bits) const {
  if (bits > 64) throw InvalidArgument("append supports at most 64 bits");
  if (bits < 64 && (pattern >> bits) != 0) {
    throw InvalidArgument("pattern does not fit in the appended width");
  }
  check_length(length_ + bits);
  BitValue out = *this;
  out.length_ = length_ + bits;
  for (unsigned b = 0; b < bits; ++b) {
    if ((pattern >> (bits - 1 - b)) & 1U) {
      const unsigned i = length_ + b;
      out.words_[i / 64] |= std::uint64_t{1} << (63 - i % 64);
    }
  }
  return out;
}

std::uint64_t BitValue::slice(unsigned begin, unsigned len) const {
  if (len > 64 || begin + len > length_) {
    throw InvalidArgument("slice out of range");
  }
  std::uint64_t out = 0;
  for (unsigned i = begin; i < begin + len; ++i) {
    out = (out << 1) | ((words_[i / 64] >> (63 - i % 64)) & 1U);
  }
  return out;
}

std::uint64_t BitValue::to_uint() const {
  if (length_ > 64) throw InvalidArgument("value wider than 64 bits");
  return length_ == 0 ? 0 : words_[0] >> (64 - length_);
}

std::string BitValue::to_binary() const {
  std::string out(length_, '0');
  for (unsigned i = 0; i < length_; ++i) {
    if (bit(i)) out[i] = '1';
  }
  return out;
}

std::string BitValue::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  const unsigned ndigits = (length_ + 3) / 4;
  std::string out(ndigits, '0');
  for (unsigned t = 0; t < ndigits; ++t) {
    // Digit t counts from the least significant end.
    const unsigned end = length_ - 4 * t;
    const unsigned begin = end >= 4 ? end - 4 : 0;
    out[ndigits - 1 - t] = kDigits[slice(begin, end - begin)];
  }
  return out;
}

std::string BitValue::to_decimal() const {
  Limbs limbs = to_limbs();
  std::string out;
  auto is_zero = [&] {
    return std::all_of(limbs.begin(), limbs.end(),
                       [](std::uint64_t l) { return l == 0; });
  };
  do {
    unsigned __int128 rem = 0;
    for (unsigned i = kWords; i-- > 0;) {
      const unsigned __int128 cur = (rem << 64) | limbs[i];
      limbs[i] = static_cast<std::uint64_t>(cur / 10);
      rem = cur % 10;
    }
    out.push_back(static_cast<char>('0' + static_cast<int>(rem)));
  } while (!is_zero());
  std::reverse(out.begin(), out.end());
  return out;
}

std::uint64_t BitValue::key() const noexcept {
  std::uint64_t h = mix64(std::uint64_t{length_} ^ 0x6A09E667F3BCC909ULL);
  const unsigned nwords = (length_ + 63) / 64;
  for (unsigned w = 0; w < nwords; ++w) h = mix64(h ^ words_[w]);
  return h;
}

std::strong_ordering operator<=>(const BitValue& a, const BitValue& b) noexcept {
  if (auto c = a.length_ <=> b.length_; c != 0) return c;
  for (unsigned w = 0; w < BitValue::kWords; ++w) {
    if (auto c = a.words_[w] <=> b.words_[w]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

BitValue::Limbs BitValue::to_limbs() const {
  Limbs wide{};  // left-aligned 256-bit integer, little-endian limbs
  for (unsigned w = 0; w < kWords; ++w) wide[kWords - 1 - w] = words_[w];
  Limbs out{};
  if (length_ == 0) return out;
  const unsigned shift = kMaxBits - length_;
  const unsigned ws = shift / 64;
  const unsigned bs = shift % 64;
  for (unsigned i = 0; i + ws < kWords; ++i) {
    out[i] = wide[i + ws] >> bs;
    if (bs != 0 && i + ws + 1 < kWords) out[i] |= wide[i + ws + 1] << (64 - bs);
  }
  return out;
}

BitValue BitValue::from_limbs(const Limbs& limbs, unsigned length) {
  BitValue out(length);
  for (unsigned i = 0; i < kWords; ++i) {
    const unsigned lo = 64 * i;
    const std::uint64_t over =
        length >= lo + 64 ? 0
        : length > lo     ? limbs[i] >> (length - lo)
                          : limbs[i];
    if (over != 0) {
      throw InvalidArgument("integer does not fit in " +
                            std::to_string(length) + " bits");
    }
  }
  if (length == 0) return out;
  const unsigned shift = kMaxBits - length;
  const unsigned ws = shift / 64;
  const unsigned bs = shift % 64;
  Limbs wide{};
  for (unsigned i = 0; i + ws < kWords; ++i) {
    wide[i + ws] |= limbs[i] << bs;
    if (bs != 0 && i + ws + 1 < kWords) wide[i + ws + 1] |= limbs[i] >> (64 - bs);
  }
  for (unsigned w = 0; w < kWords; ++w) out.words_[w] = wide[kWords - 1 - w];
  return out;
}

}  // namespace ldphh
