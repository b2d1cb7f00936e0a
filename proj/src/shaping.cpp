#include "ffsc/shaping.hpp"

#include <algorithm>
#include <string>

#include "ffsc/error.hpp"
#include "ffsc/range_coder.hpp"

namespace ffsc {

ConditionalModel::ConditionalModel(std::vector<QuantizedModel> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw InvalidArgument("conditional model needs at least one row");
  for (const auto& r : rows_) {
    if (r.size() != rows_.front().size() || r.precision() != rows_.front().precision()) {
      throw InvalidArgument("conditional model rows must share alphabet and precision");
    }
  }
}

ConditionalModel ConditionalModel::from_channel(const TestChannel& ch, unsigned precision) {
  std::vector<QuantizedModel> rows;
  rows.reserve(ch.input_size());
  for (std::size_t x = 0; x < ch.input_size(); ++x) rows.push_back(quantize(ch.row(x), precision));
  return ConditionalModel(std::move(rows));
}

const QuantizedModel& ConditionalModel::row(Symbol x) const {
  if (x >= rows_.size()) throw InvalidArgument("side symbol outside the conditional model");
  return rows_[x];
}

namespace {

// Bytes of b, then a single 1 bit, then zeros: the midpoint of b's dyadic interval.
struct PadSource {
  const BitString* b;
  std::size_t pos = 0;
  std::uint8_t operator()() noexcept {
    const std::size_t k = pos++;
    std::uint8_t v = b->byte_or_zero(k);
    if (k == b->size() / 8) v |= static_cast<std::uint8_t>(0x80u >> (b->size() % 8));
    return v;
  }
};

// The decoder sits at offset code from L with width range, both in units of 2^-s.
// The input point is the midpoint of b's interval, whose half-width is 2^e units.
template <class D>
bool interval_inside(const D& dec, std::uint64_t m) {
  const std::uint64_t s = dec.scale_bits();
  if (s < m + 1 + 23) return false;
  const std::uint64_t e = s - m - 1;
  if (e >= 32) return true;
  const std::uint64_t half = std::uint64_t{1} << e;
  return dec.code() <= half && dec.range() - dec.code() <= half;
}

}  // namespace

ShapeResult shape(const BitString& b, SideProvider& side, const ConditionalModel& cm) {
  ShapeResult res;
  rc::Decoder dec(PadSource{&b});
  const std::uint64_t m = b.size();
  while (!interval_inside(dec, m)) {
    const auto x = side.next();
    if (!x) throw SourceExhausted("shape: side information exhausted");
    res.symbols.push_back(dec.decode(cm.row(*x)));
  }
  res.consumed_side = res.symbols.size();
  return res;
}

BitString reencode(std::span<const Symbol> xhat, std::span<const Symbol> x, const ConditionalModel& cm) {
  if (xhat.size() != x.size()) throw InvalidArgument("reencode: sequence lengths differ");
  rc::Encoder enc;
  for (std::size_t i = 0; i < xhat.size(); ++i) {
    const QuantizedModel& row = cm.row(x[i]);
    if (xhat[i] >= row.size()) throw InvalidArgument("reencode: symbol outside the output alphabet");
    enc.encode(row, xhat[i]);
  }
  return BitString::from_bytes(std::move(enc).finish_exact());
}

bool is_shaping_of(const BitString& b, std::span<const Symbol> xhat, std::span<const Symbol> x,
                   const ConditionalModel& cm) {
  if (xhat.size() != x.size()) return false;
  SpanSide side(x);
  try {
    const ShapeResult r = shape(b, side, cm);
    return std::equal(r.symbols.begin(), r.symbols.end(), xhat.begin(), xhat.end());
  } catch (const SourceExhausted&) {
    return false;
  }
}

BitString deshape(std::span<const Symbol> xhat, std::span<const Symbol> x, const ConditionalModel& cm,
                  std::size_t m) {
  const BitString full = reencode(xhat, x, cm);
  if (full.size() < m) throw FormatError("deshape: re-encoded length shorter than m");
  BitString b = full.prefix(m);
  if (!is_shaping_of(b, xhat, x, cm)) {
    throw FormatError("deshape: sequence is not the shaping of any " + std::to_string(m) + "-bit string");
  }
  return b;
}

double shaped_length(std::size_t m, const Pmf& prior, const TestChannel& ch) {
  if (m == 0) return 0.0;
  const double h = conditional_entropy(ch, prior);
  if (h <= 0.0) throw InvalidArgument("shaped_length: H(xhat|x) must be positive");
  return static_cast<double>(m) / h;
}

}  // namespace ffsc
