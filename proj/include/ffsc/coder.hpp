#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ffsc/bits.hpp"
#include "ffsc/error.hpp"
#include "ffsc/model.hpp"

namespace ffsc {

/// Finite-precision realization of a Pmf: integer frequencies summing to 2^precision.
class QuantizedModel {
 public:
  QuantizedModel(std::vector<std::uint32_t> freq, unsigned precision);

  [[nodiscard]] unsigned precision() const noexcept { return precision_; }
  [[nodiscard]] std::uint32_t total() const noexcept { return std::uint32_t{1} << precision_; }
  [[nodiscard]] std::size_t size() const noexcept { return freq_.size(); }
  [[nodiscard]] std::uint32_t freq(Symbol s) const noexcept { return freq_[s]; }
  [[nodiscard]] std::uint32_t cum(Symbol s) const noexcept { return cum_[s]; }
  [[nodiscard]] std::span<const std::uint32_t> freqs() const noexcept { return freq_; }
  /// Highest symbol with non-zero frequency; it absorbs the coder's rounding slack.
  [[nodiscard]] Symbol top() const noexcept { return top_; }

  /// Symbol whose cumulative slot range [cum, cum + freq) holds `slot` (< total()).
  [[nodiscard]] Symbol lookup(std::uint32_t slot) const noexcept;

  friend bool operator==(const QuantizedModel& a, const QuantizedModel& b) {
    return a.precision_ == b.precision_ && a.freq_ == b.freq_;
  }

 private:
  std::vector<std::uint32_t> freq_;
  std::vector<std::uint32_t> cum_;  // size() + 1 entries
  unsigned precision_;
  Symbol top_ = 0;
};

inline constexpr unsigned kDefaultPrecision = 16;

/// Largest-remainder rounding of p to 2^precision slots. Symbols with p > 0 get at
/// least one slot; symbols with p == 0 get none.
[[nodiscard]] QuantizedModel quantize(const Pmf& p, unsigned precision = kDefaultPrecision);

/// Self-delimiting compressed block: symbol count plus range-coded payload.
struct Frame {
  std::uint64_t symbol_count = 0;
  BitString payload;  // always byte-aligned

  friend bool operator==(const Frame&, const Frame&) = default;
};

[[nodiscard]] Frame compress(std::span<const Symbol> symbols, const QuantizedModel& model);

/// Exact inverse of compress. Rejects payloads that are not the canonical encoding of
/// the symbols they decode to, so any altered payload either errors or decodes differently.
[[nodiscard]] std::vector<Symbol> decompress(const Frame& frame, const QuantizedModel& model);

/// Header plus payload bits.
[[nodiscard]] std::size_t coded_length(const Frame& frame);

/// Byte layout: LEB128 symbol_count, then payload bytes.
[[nodiscard]] std::vector<std::uint8_t> serialize(const Frame& frame);

struct FrameDecode {
  std::vector<Symbol> symbols;
  std::size_t bytes = 0;  // bytes the frame occupied at the front of the input
};

/// Decodes the frame at the front of `bytes`; whatever follows it is ignored.
/// `max_symbols` bounds the header's symbol count.
[[nodiscard]] FrameDecode decode_frame(std::span<const std::uint8_t> bytes,
                                       const QuantizedModel& model,
                                       std::uint64_t max_symbols = UINT64_MAX);

void write_varint(std::vector<std::uint8_t>& out, std::uint64_t v);
/// Returns {value, bytes used}. Throws FormatError on truncation or overflow.
[[nodiscard]] std::pair<std::uint64_t, std::size_t> read_varint(std::span<const std::uint8_t> in);

}  // namespace ffsc
