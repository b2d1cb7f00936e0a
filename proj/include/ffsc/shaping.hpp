#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ffsc/bits.hpp"
#include "ffsc/coder.hpp"
#include "ffsc/model.hpp"

namespace ffsc {

/// Quantized rows of a test channel; row x drives the shaper when the side sample is x.
class ConditionalModel {
 public:
  explicit ConditionalModel(std::vector<QuantizedModel> rows);
  static ConditionalModel from_channel(const TestChannel& ch, unsigned precision = kDefaultPrecision);

  [[nodiscard]] std::size_t input_size() const noexcept { return rows_.size(); }
  [[nodiscard]] std::size_t output_size() const noexcept { return rows_.front().size(); }
  [[nodiscard]] unsigned precision() const noexcept { return rows_.front().precision(); }
  [[nodiscard]] const QuantizedModel& row(Symbol x) const;
  [[nodiscard]] std::span<const QuantizedModel> rows() const noexcept { return rows_; }

 private:
  std::vector<QuantizedModel> rows_;
};

/// Pull-based, single-consumer source of side samples.
class SideProvider {
 public:
  virtual ~SideProvider() = default;
  /// Next sample, or nullopt once exhausted.
  virtual std::optional<Symbol> next() = 0;
};

/// Walks a span front-to-back, or back-to-front when `reversed`.
class SpanSide final : public SideProvider {
 public:
  explicit SpanSide(std::span<const Symbol> data, bool reversed = false)
      : data_(data), reversed_(reversed) {}

  std::optional<Symbol> next() override {
    if (pos_ == data_.size()) return std::nullopt;
    const std::size_t i = reversed_ ? data_.size() - 1 - pos_ : pos_;
    ++pos_;
    return data_[i];
  }
  [[nodiscard]] std::size_t consumed() const noexcept { return pos_; }

 private:
  std::span<const Symbol> data_;
  bool reversed_;
  std::size_t pos_ = 0;
};

struct ShapeResult {
  std::vector<Symbol> symbols;
  std::size_t consumed_side = 0;  // always symbols.size()
};

/// Maps the bits of `b` onto a reconstruction sequence whose i-th symbol follows row
/// cm[x_i]. Runs the range decoder on b followed by a one-bit-then-zeros pad and stops
/// at the first symbol count whose coding interval lies inside the dyadic interval of b,
/// so the sequence pins down b exactly and no earlier prefix does.
[[nodiscard]] ShapeResult shape(const BitString& b, SideProvider& side, const ConditionalModel& cm);

/// Range-encodes xhat against rows cm[x_i] and returns the exact low end of the coding
/// interval. Every shaping of some b onto x that produced xhat has b as a prefix of it.
[[nodiscard]] BitString reencode(std::span<const Symbol> xhat, std::span<const Symbol> x,
                                 const ConditionalModel& cm);

/// True when shape(b, x) reproduces xhat exactly.
[[nodiscard]] bool is_shaping_of(const BitString& b, std::span<const Symbol> xhat,
                                 std::span<const Symbol> x, const ConditionalModel& cm);

/// Recovers the m bits that shape consumed to produce xhat from side x.
/// Throws ZeroProbability for an impossible (x, xhat) pair and FormatError when the
/// pair is not a shaping of any m-bit string.
[[nodiscard]] BitString deshape(std::span<const Symbol> xhat, std::span<const Symbol> x,
                                const ConditionalModel& cm, std::size_t m);

/// Predicted shaped length m / H(xhat|x); for planning and loose assertions only.
[[nodiscard]] double shaped_length(std::size_t m, const Pmf& prior, const TestChannel& ch);

}  // namespace ffsc
