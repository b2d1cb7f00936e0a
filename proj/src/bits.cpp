#include "ffsc/bits.hpp"

#include "ffsc/error.hpp"

namespace ffsc {

BitString::BitString(std::vector<std::uint8_t> bytes, std::size_t bits)
    : bytes_(std::move(bytes)), bits_(bits) {
  if (bits_ > bytes_.size() * 8) throw InvalidArgument("BitString: bit count exceeds storage");
  bytes_.resize((bits_ + 7) / 8);
  if (bits_ % 8 != 0) bytes_.back() &= static_cast<std::uint8_t>(0xFF00u >> (bits_ % 8));
}

BitString BitString::from_bytes(std::span<const std::uint8_t> bytes) {
  return BitString(std::vector<std::uint8_t>(bytes.begin(), bytes.end()), bytes.size() * 8);
}

BitString BitString::from_string(std::string_view s) {
  BitString out;
  for (char c : s) {
    if (c != '0' && c != '1') throw InvalidArgument("BitString: expected only '0' and '1'");
    out.push_back(c == '1');
  }
  return out;
}

void BitString::push_back(bool bit) {
  if (bits_ % 8 == 0) bytes_.push_back(0);
  if (bit) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (bits_ % 8));
  ++bits_;
}

BitString BitString::prefix(std::size_t n) const {
  if (n > bits_) throw InvalidArgument("BitString::prefix: longer than the string");
  return BitString(std::vector<std::uint8_t>(bytes_.begin(), bytes_.begin() + (n + 7) / 8), n);
}

std::string BitString::to_string() const {
  std::string s;
  s.reserve(bits_);
  for (std::size_t i = 0; i < bits_; ++i) s.push_back((*this)[i] ? '1' : '0');
  return s;
}

}  // namespace ffsc
