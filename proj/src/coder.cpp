#include "ffsc/coder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ffsc/range_coder.hpp"

namespace ffsc {

QuantizedModel::QuantizedModel(std::vector<std::uint32_t> freq, unsigned precision)
    : freq_(std::move(freq)), precision_(precision) {
  if (precision_ < 2 || precision_ > 24) throw InvalidArgument("precision must lie in [2, 24]");
  Alphabet{freq_.size()};
  cum_.resize(freq_.size() + 1);
  std::uint64_t acc = 0;
  for (std::size_t s = 0; s < freq_.size(); ++s) {
    cum_[s] = static_cast<std::uint32_t>(acc);
    acc += freq_[s];
    if (freq_[s] != 0) top_ = static_cast<Symbol>(s);
  }
  if (acc != total()) {
    throw InvalidArgument("quantized frequencies sum to " + std::to_string(acc) + ", expected " +
                          std::to_string(total()));
  }
  cum_.back() = total();
}

Symbol QuantizedModel::lookup(std::uint32_t slot) const noexcept {
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), slot);
  return static_cast<Symbol>((it - cum_.begin()) - 1);
}

QuantizedModel quantize(const Pmf& p, unsigned precision) {
  if (precision < 2 || precision > 24) throw InvalidArgument("precision must lie in [2, 24]");
  const std::uint64_t total = std::uint64_t{1} << precision;
  const std::size_t n = p.size();
  if (n > total) throw InvalidArgument("alphabet larger than the quantization total");

  std::vector<std::uint32_t> f(n, 0);
  std::vector<double> rem(n, 0.0);
  std::int64_t sum = 0;
  for (std::size_t s = 0; s < n; ++s) {
    const double exact = p[s] * static_cast<double>(total);
    const double fl = std::floor(exact);
    f[s] = static_cast<std::uint32_t>(fl);
    rem[s] = exact - fl;
    if (p[s] > 0.0 && f[s] == 0) {
      f[s] = 1;
      rem[s] = -1.0;  // already rounded up
    }
    sum += f[s];
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::int64_t diff = static_cast<std::int64_t>(total) - sum;
  if (diff > 0) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
    for (std::size_t i = 0; diff > 0; i = (i + 1) % n) {
      if (p[order[i]] > 0.0) {
        ++f[order[i]];
        --diff;
      }
    }
  }
  while (diff < 0) {
    // Forced minimum slots overshot the total; take them back from the largest entries.
    const auto big = std::max_element(f.begin(), f.end());
    if (*big <= 1) throw InvalidArgument("alphabet larger than the quantization total");
    --*big;
    ++diff;
  }
  return QuantizedModel(std::move(f), precision);
}

void write_varint(std::vector<std::uint8_t>& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<std::uint8_t>(v | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<std::uint8_t>(v));
}

std::pair<std::uint64_t, std::size_t> read_varint(std::span<const std::uint8_t> in) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < in.size() && i < 10; ++i) {
    const std::uint64_t part = in[i] & 0x7Fu;
    if (i == 9 && part > 1) throw FormatError("varint overflows 64 bits");
    v |= part << (7 * i);
    if ((in[i] & 0x80u) == 0) return {v, i + 1};
  }
  throw FormatError("truncated varint");
}

namespace {

std::vector<std::uint8_t> encode_payload(std::span<const Symbol> symbols,
                                         const QuantizedModel& model) {
  rc::Encoder enc;
  for (Symbol s : symbols) {
    if (s >= model.size()) throw InvalidArgument("symbol outside the model alphabet");
    enc.encode(model, s);
  }
  return std::move(enc).finish_minimal();
}

struct SpanBytes {
  std::span<const std::uint8_t> data;
  std::size_t pos = 0;
  std::uint8_t operator()() noexcept { return pos < data.size() ? data[pos++] : std::uint8_t{0}; }
};

// Decodes `count` symbols from the front of `payload`, then checks that the payload
// begins with the canonical encoding of those symbols. Returns the canonical length.
std::size_t decode_payload(std::span<const std::uint8_t> payload, std::uint64_t count,
                           const QuantizedModel& model, std::vector<Symbol>& out) {
  out.clear();
  out.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, std::uint64_t{1} << 26)));
  rc::Decoder dec(SpanBytes{payload});
  for (std::uint64_t i = 0; i < count; ++i) out.push_back(dec.decode(model));
  const std::vector<std::uint8_t> canonical = encode_payload(out, model);
  if (canonical.size() > payload.size()) throw FormatError("truncated payload");
  if (!std::equal(canonical.begin(), canonical.end(), payload.begin())) {
    throw FormatError("payload is not a valid encoding for its symbol count");
  }
  return canonical.size();
}

}  // namespace

Frame compress(std::span<const Symbol> symbols, const QuantizedModel& model) {
  return Frame{symbols.size(), BitString::from_bytes(encode_payload(symbols, model))};
}

std::vector<Symbol> decompress(const Frame& frame, const QuantizedModel& model) {
  if (frame.payload.size() % 8 != 0) throw FormatError("frame payload is not byte-aligned");
  std::vector<Symbol> out;
  const std::size_t used = decode_payload(frame.payload.bytes(), frame.symbol_count, model, out);
  if (used != frame.payload.bytes().size()) {
    throw FormatError("symbol_count inconsistent with payload length");
  }
  return out;
}

std::size_t coded_length(const Frame& frame) {
  std::vector<std::uint8_t> header;
  write_varint(header, frame.symbol_count);
  return header.size() * 8 + frame.payload.size();
}

std::vector<std::uint8_t> serialize(const Frame& frame) {
  std::vector<std::uint8_t> out;
  write_varint(out, frame.symbol_count);
  const auto payload = frame.payload.bytes();
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

FrameDecode decode_frame(std::span<const std::uint8_t> bytes, const QuantizedModel& model,
                         std::uint64_t max_symbols) {
  const auto [count, header] = read_varint(bytes);
  if (count > max_symbols) throw FormatError("frame symbol count exceeds what the caller can accept");
  FrameDecode fd;
  fd.bytes = header + decode_payload(bytes.subspan(header), count, model, fd.symbols);
  return fd;
}

}  // namespace ffsc
