#pragma once

// Byte-oriented range coder with exact carry propagation.
//
// The coder state denotes a sub-interval [L, L + R * 2^-s) of [0, 1), where the
// bytes emitted so far plus the 32-bit `low` window spell L to s bits and
// s = 32 + 8 * (bytes emitted). Each symbol splits the current range into
// slices r * freq (r = R >> precision); the model's top symbol takes the whole
// remainder so the slices tile the range with no gap. Decoding any bit stream
// therefore always lands in a slice, which is what lets the decoder double as
// a shaper for arbitrary input bits.

#include <cassert>
#include <cstdint>
#include <vector>

#include "ffsc/coder.hpp"
#include "ffsc/error.hpp"

namespace ffsc::rc {

inline constexpr std::uint64_t kFull = std::uint64_t{1} << 32;
inline constexpr std::uint64_t kBottom = std::uint64_t{1} << 24;

class Encoder {
 public:
  void encode(const QuantizedModel& m, Symbol s) {
    const std::uint32_t f = m.freq(s);
    if (f == 0) throw ZeroProbability("range coder: symbol has zero frequency");
    const std::uint64_t r = range_ >> m.precision();
    const std::uint64_t base = r * m.cum(s);
    low_ += base;
    range_ = (s == m.top()) ? range_ - base : r * f;
    if (low_ >= kFull) {
      carry();
      low_ -= kFull;
    }
    while (range_ < kBottom) {
      out_.push_back(static_cast<std::uint8_t>(low_ >> 24));
      low_ = (low_ << 8) & (kFull - 1);
      range_ <<= 8;
    }
  }

  /// Appends all 32 bits of `low`: the output is exactly L.
  std::vector<std::uint8_t> finish_exact() && {
    for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(low_ >> shift));
    return std::move(out_);
  }

  /// Appends the fewest bytes such that every continuation of the output stays
  /// inside the final interval.
  std::vector<std::uint8_t> finish_minimal() && {
    for (unsigned extra = 0; extra <= 4; ++extra) {
      const unsigned g = 32 - 8 * extra;
      const std::uint64_t unit = std::uint64_t{1} << g;
      const std::uint64_t k = (low_ + unit - 1) >> g;
      if (((k + 1) << g) <= low_ + range_) {
        std::uint64_t v = k << g;
        if (v >= kFull) {
          carry();
          v -= kFull;
        }
        for (unsigned i = 0; i < extra; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (24 - 8 * i)));
        return std::move(out_);
      }
    }
    assert(false && "unreachable: a single-ulp interval always fits");
    return std::move(out_);
  }

  [[nodiscard]] std::size_t bytes_emitted() const noexcept { return out_.size(); }
  [[nodiscard]] std::uint64_t range() const noexcept { return range_; }

 private:
  void carry() {
    for (std::size_t i = out_.size(); i-- > 0;) {
      if (++out_[i] != 0) return;
    }
    assert(false && "carry out of the unit interval");
  }

  std::vector<std::uint8_t> out_;
  std::uint64_t low_ = 0;
  std::uint64_t range_ = kFull;
};

/// `Source` is a callable returning the next input byte.
template <class Source>
class Decoder {
 public:
  explicit Decoder(Source src) : src_(std::move(src)) {
    for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | src_();
  }

  Symbol decode(const QuantizedModel& m) {
    const std::uint64_t r = range_ >> m.precision();
    std::uint64_t slot = code_ / r;
    if (slot >= m.total()) slot = m.total() - 1;
    const Symbol s = m.lookup(static_cast<std::uint32_t>(slot));
    const std::uint64_t base = r * m.cum(s);
    code_ -= base;
    range_ = (s == m.top()) ? range_ - base : r * m.freq(s);
    while (range_ < kBottom) {
      code_ = (code_ << 8) | src_();
      range_ <<= 8;
      ++shifts_;
    }
    return s;
  }

  /// Offset of the input from L, in units of 2^-scale_bits().
  [[nodiscard]] std::uint64_t code() const noexcept { return code_; }
  [[nodiscard]] std::uint64_t range() const noexcept { return range_; }
  /// s: bits of input consumed so far.
  [[nodiscard]] std::uint64_t scale_bits() const noexcept { return 32 + 8 * shifts_; }

 private:
  Source src_;
  std::uint64_t code_ = 0;
  std::uint64_t range_ = kFull;
  std::uint64_t shifts_ = 0;
};

}  // namespace ffsc::rc
