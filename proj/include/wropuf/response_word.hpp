#pragma once

#include "wropuf/error.hpp"

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wropuf {

// Fixed-length bit vector holding a raw sampled word or a composed PUF ID.
// Bit 0 is the first sample taken.
class ResponseWord {
public:
  ResponseWord() = default;
  explicit ResponseWord(std::size_t length) : bits_(length, 0) {}
  ResponseWord(std::initializer_list<int> bits) {
    bits_.reserve(bits.size());
    for (int b : bits) bits_.push_back(b ? 1 : 0);
  }

  // "0110" -> {0,1,1,0}. Any character other than '0'/'1' is rejected.
  static ResponseWord from_bits(std::string_view text) {
    ResponseWord w(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] != '0' && text[i] != '1')
        throw ArgumentError("bit string contains '" + std::string(1, text[i]) + "'");
      w.bits_[i] = text[i] == '1';
    }
    return w;
  }

  // Low `length` bits of `value`, bit i of the word = bit i of the integer.
  static ResponseWord from_uint(std::uint64_t value, std::size_t length) {
    ResponseWord w(length);
    for (std::size_t i = 0; i < length && i < 64; ++i) w.bits_[i] = (value >> i) & 1U;
    return w;
  }

  // Hex text where bit 0 is the most significant bit of the first digit.
  // Words whose length is not a multiple of four are zero padded at the end.
  static ResponseWord from_hex(std::string_view hex, std::size_t length) {
    if (hex.size() != (length + 3) / 4)
      throw ArgumentError("hex word '" + std::string(hex) + "' does not hold " +
                          std::to_string(length) + " bits");
    ResponseWord w(length);
    for (std::size_t d = 0; d < hex.size(); ++d) {
      const int nibble = hex_value(hex[d]);
      if (nibble < 0) throw ArgumentError("invalid hex digit in '" + std::string(hex) + "'");
      for (int j = 0; j < 4; ++j) {
        const std::size_t i = 4 * d + static_cast<std::size_t>(j);
        const bool bit = (nibble >> (3 - j)) & 1;
        if (i < length) {
          w.bits_[i] = bit;
        } else if (bit) {
          throw ArgumentError("nonzero padding in hex word '" + std::string(hex) + "'");
        }
      }
    }
    return w;
  }

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }

  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  bool at(std::size_t i) const {
    if (i >= bits_.size()) throw ArgumentError("bit index out of range");
    return bits_[i] != 0;
  }
  void set(std::size_t i, bool value) { bits_.at(i) = value ? 1 : 0; }
  void push_back(bool value) { bits_.push_back(value ? 1 : 0); }

  std::size_t count_ones() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
  }

  ResponseWord complement() const {
    ResponseWord w = *this;
    for (auto &b : w.bits_) b ^= 1;
    return w;
  }

  ResponseWord slice(std::size_t first, std::size_t count) const {
    if (first + count > size()) throw ArgumentError("slice out of range");
    ResponseWord w;
    w.bits_.assign(bits_.begin() + static_cast<std::ptrdiff_t>(first),
                   bits_.begin() + static_cast<std::ptrdiff_t>(first + count));
    return w;
  }

  // Bits [first, first+count) packed LSB-first into an integer.
  std::uint64_t to_uint(std::size_t first, std::size_t count) const {
    if (count > 64 || first + count > size()) throw ArgumentError("to_uint out of range");
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < count; ++i)
      v |= static_cast<std::uint64_t>(bits_[first + i]) << i;
    return v;
  }

  std::string to_hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve((size() + 3) / 4);
    for (std::size_t d = 0; d < (size() + 3) / 4; ++d) {
      int nibble = 0;
      for (int j = 0; j < 4; ++j) {
        const std::size_t i = 4 * d + static_cast<std::size_t>(j);
        nibble = (nibble << 1) | (i < size() ? bits_[i] : 0);
      }
      out.push_back(digits[nibble]);
    }
    return out;
  }

  std::string to_bits() const {
    std::string out;
    out.reserve(size());
    for (auto b : bits_) out.push_back(b ? '1' : '0');
    return out;
  }

  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  friend bool operator==(const ResponseWord &, const ResponseWord &) = default;
  friend auto operator<=>(const ResponseWord &, const ResponseWord &) = default;

private:
  static int hex_value(char c) noexcept {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  }

  std::vector<std::uint8_t> bits_;
};

// Concatenation in the given order.
inline ResponseWord compose_id(std::span<const ResponseWord> words) {
  if (words.empty()) throw ArgumentError("compose_id needs at least one word");
  ResponseWord id;
  for (const auto &w : words)
    for (std::size_t i = 0; i < w.size(); ++i) id.push_back(w[i]);
  return id;
}

} // namespace wropuf
