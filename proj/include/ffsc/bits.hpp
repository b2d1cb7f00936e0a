#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ffsc {

/// Length-explicit packed bit vector. Bit i lives in byte i/8 at position 7 - i%8
/// (most significant first), so a byte-aligned BitString is just its bytes.
/// Storage bits past size() are always zero.
class BitString {
 public:
  BitString() = default;
  /// Takes the first `bits` bits of `bytes`; bits beyond are cleared.
  BitString(std::vector<std::uint8_t> bytes, std::size_t bits);

  static BitString from_bytes(std::span<const std::uint8_t> bytes);
  /// Parses a string over {'0','1'}.
  static BitString from_string(std::string_view s);

  [[nodiscard]] std::size_t size() const noexcept { return bits_; }
  [[nodiscard]] bool empty() const noexcept { return bits_ == 0; }
  [[nodiscard]] bool operator[](std::size_t i) const noexcept {
    return (bytes_[i >> 3] >> (7 - (i & 7))) & 1u;
  }
  [[nodiscard]] std::span<const std::uint8_t> bytes() const noexcept { return bytes_; }
  /// Byte k of the storage, or zero past the end.
  [[nodiscard]] std::uint8_t byte_or_zero(std::size_t k) const noexcept {
    return k < bytes_.size() ? bytes_[k] : std::uint8_t{0};
  }

  void push_back(bool bit);
  /// First n bits; n must not exceed size().
  [[nodiscard]] BitString prefix(std::size_t n) const;
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t bits_ = 0;
};

}  // namespace ffsc
