#include "ffsc/codec.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <string>

#include "ffsc/error.hpp"

namespace ffsc {

void CodecConfig::validate() const {
  if (channel.input_size() != prior.size()) throw InvalidArgument("channel input alphabet differs from the prior");
  if (distortion.rows() != prior.size() || distortion.cols() != channel.output_size()) {
    throw InvalidArgument("distortion matrix dimensions do not match the channel");
  }
  if (min_block < 1 || min_block > UINT32_MAX) throw InvalidArgument("min_block must lie in [1, 2^32)");
  if (passes < 1 || passes > UINT16_MAX) throw InvalidArgument("passes must lie in [1, 65535]");
  if (precision < 2 || precision > 24) throw InvalidArgument("precision must lie in [2, 24]");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
  if (seed_block_mode == SeedBlockMode::raw && channel.output_size() < channel.input_size()) {
    throw InvalidArgument("raw seed block needs the source alphabet inside the reconstruction alphabet");
  }
  (void)growth_factor(prior, channel);
}

void FeedforwardOracle::emitted(std::size_t count) {
  if (count < audit_.high_water) throw InvalidArgument("oracle: emission count moved backwards");
  if (count > truth_.size()) throw InvalidArgument("oracle: more reconstructions than source samples");
  audit_.high_water = count;
}

Symbol FeedforwardOracle::reveal(std::size_t i) {
  if (keep_log_) log_.push_back({i, audit_.high_water});
  if (i >= audit_.high_water) {
    audit_.clean = false;
    throw CausalityViolation("oracle: sample " + std::to_string(i) + " requested with only " +
                             std::to_string(audit_.high_water) + " reconstructions emitted");
  }
  ++audit_.reveals;
  audit_.max_revealed = std::max<std::int64_t>(audit_.max_revealed, static_cast<std::int64_t>(i));
  return truth_[i];
}

namespace {

constexpr std::uint8_t kMagic[4] = {'F', 'F', 'S', 'C'};

template <class T>
void put_le(std::vector<std::uint8_t>& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

template <class T>
T get_le(std::span<const std::uint8_t> in, std::size_t at) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(in[at + i]) << (8 * i);
  return v;
}

struct Fnv1a {
  std::uint64_t h = 0xcbf29ce484222325ull;
  void byte(std::uint8_t b) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) byte(static_cast<std::uint8_t>(v >> (8 * i)));
  }
};

}  // namespace

void write_header(std::vector<std::uint8_t>& out, const StreamHeader& h) {
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  out.push_back(h.version);
  out.push_back(h.precision);
  put_le(out, h.passes);
  put_le(out, h.min_block);
  put_le(out, h.seed);
  put_le(out, h.digest);
}

StreamHeader read_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes) throw FormatError("bitstream shorter than its header");
  if (!std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) throw FormatError("bad magic");
  StreamHeader h;
  h.version = bytes[4];
  if (h.version != kFormatVersion) throw FormatError("unsupported format version " + std::to_string(h.version));
  h.precision = bytes[5];
  h.passes = get_le<std::uint16_t>(bytes, 6);
  h.min_block = get_le<std::uint32_t>(bytes, 8);
  h.seed = get_le<std::uint64_t>(bytes, 12);
  h.digest = get_le<std::uint64_t>(bytes, 20);
  return h;
}

std::uint64_t model_digest(const QuantizedModel& marginal, const ConditionalModel& cm) {
  Fnv1a f;
  f.u32(static_cast<std::uint32_t>(cm.input_size()));
  f.u32(static_cast<std::uint32_t>(cm.output_size()));
  f.byte(static_cast<std::uint8_t>(marginal.precision()));
  for (std::uint32_t v : marginal.freqs()) f.u32(v);
  for (const auto& row : cm.rows()) {
    for (std::uint32_t v : row.freqs()) f.u32(v);
  }
  return f.h;
}

namespace {

const CodecConfig& validated(const CodecConfig& cfg) {
  cfg.validate();
  return cfg;
}

BitString frame_bits(std::span<const Symbol> block, const QuantizedModel& model) {
  return BitString::from_bytes(serialize(compress(block, model)));
}

}  // namespace

FeedforwardCodec::FeedforwardCodec(CodecConfig cfg)
    : cfg_(validated(cfg)),
      marginal_(quantize(cfg_.channel.marginal(cfg_.prior), cfg_.precision)),
      cm_(ConditionalModel::from_channel(cfg_.channel, cfg_.precision)),
      digest_(model_digest(marginal_, cm_)) {}

EncodeResult FeedforwardCodec::encode(std::span<const Symbol> source) const {
  const std::size_t N = source.size();
  const std::size_t M = cfg_.min_block;
  for (Symbol s : source) {
    if (s >= cfg_.prior.size()) throw InvalidArgument("source symbol outside the alphabet");
  }
  if (N < M) throw SourceExhausted("source shorter than the seed block");

  // Reversed view: y_t = source[N - 1 - t].
  auto y = [&](std::size_t t) { return source[N - 1 - t]; };
  const Pmf marginal = cfg_.channel.marginal(cfg_.prior);
  const TypicalityParams tp{cfg_.delta};

  EncodeResult res;
  std::vector<std::vector<Symbol>> blocks;
  blocks.reserve(cfg_.passes);

  std::vector<Symbol> seed_block(M);
  if (cfg_.seed_block_mode == SeedBlockMode::sampled) {
    std::mt19937_64 rng(cfg_.seed);
    const unsigned q = cfg_.precision;
    for (std::size_t t = 0; t < M; ++t) {
      const auto slot = static_cast<std::uint32_t>(rng() >> (64 - q));
      seed_block[t] = cm_.row(y(t)).lookup(slot);
    }
  } else {
    for (std::size_t t = 0; t < M; ++t) seed_block[t] = y(t);
  }
  blocks.push_back(std::move(seed_block));
  std::size_t T = M;

  for (std::size_t j = 1; j < cfg_.passes; ++j) {
    const BitString bits = frame_bits(blocks.back(), marginal_);
    SpanSide side(source.first(N - T), true);
    ShapeResult sr = shape(bits, side, cm_);
    T += sr.symbols.size();
    blocks.push_back(std::move(sr.symbols));
  }

  write_header(res.bitstream, StreamHeader{kFormatVersion, static_cast<std::uint8_t>(cfg_.precision),
                                           static_cast<std::uint16_t>(cfg_.passes),
                                           static_cast<std::uint32_t>(M), cfg_.seed, digest_});
  const auto final_frame = serialize(compress(blocks.back(), marginal_));
  res.bitstream.insert(res.bitstream.end(), final_frame.begin(), final_frame.end());

  res.n = T;
  res.offset = N - T;
  res.reconstruction.resize(T);
  std::vector<Symbol> side_block;
  std::size_t start = 0;
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    const auto& b = blocks[j];
    side_block.resize(b.size());
    for (std::size_t k = 0; k < b.size(); ++k) {
      res.reconstruction[T - 1 - (start + k)] = b[k];
      side_block[k] = y(start + k);
    }
    if (!is_strongly_typical(side_block, cfg_.prior, tp) || !is_strongly_typical(b, marginal, tp)) {
      res.atypical_passes.push_back(j + 1);
    }
    res.pass_lengths.push_back(b.size());
    start += b.size();
  }
  res.total_bits = res.bitstream.size() * 8;
  res.rate = static_cast<double>(res.total_bits) / static_cast<double>(res.n);
  return res;
}

DecodeResult FeedforwardCodec::decode(std::span<const std::uint8_t> bitstream, FeedforwardOracle& oracle) const {
  const StreamHeader h = read_header(bitstream);
  if (h.precision != cfg_.precision) throw FormatError("stream precision differs from the configuration");
  if (h.digest != digest_) throw FormatError("model digest mismatch");
  if (h.passes < 1) throw FormatError("stream declares zero passes");

  DecodeResult res;
  const auto body = bitstream.subspan(kHeaderBytes);
  FrameDecode fd = decode_frame(body, marginal_, oracle.size());
  if (fd.bytes != body.size()) throw FormatError("trailing bytes after the final frame");

  std::vector<Symbol> block = std::move(fd.symbols);
  std::vector<Symbol> side(block.size());
  std::vector<std::size_t> lengths;
  std::size_t tau = 0;
  for (std::size_t j = h.passes; j >= 1; --j) {
    const std::size_t L = block.size();
    if (j == 1 && L != h.min_block) throw FormatError("seed block length differs from the header");
    // Within a block, encoding order runs backwards in time.
    for (std::size_t k = 0; k < L; ++k) res.reconstruction.push_back(block[L - 1 - k]);
    oracle.emitted(tau + L);
    side.resize(L);
    for (std::size_t k = 0; k < L; ++k) side[L - 1 - k] = oracle.reveal(tau + k);
    lengths.push_back(L);
    tau += L;
    if (j == 1) break;

    const BitString expansion = reencode(block, side, cm_);
    FrameDecode prev = decode_frame(expansion.bytes(), marginal_, oracle.size() - tau);
    const BitString bits = expansion.prefix(prev.bytes * 8);
    if (!is_shaping_of(bits, block, side, cm_)) {
      throw FormatError("deshape: block " + std::to_string(j) + " is not a shaping of its predecessor");
    }
    block = std::move(prev.symbols);
  }

  res.pass_lengths.assign(lengths.rbegin(), lengths.rend());
  res.distortions.resize(tau);
  double sum = 0.0;
  for (std::size_t i = 0; i < tau; ++i) {
    res.distortions[i] = cfg_.distortion(oracle.reveal(i), res.reconstruction[i]);
    sum += res.distortions[i];
  }
  res.mean_distortion = tau ? sum / static_cast<double>(tau) : 0.0;
  res.total_bits = bitstream.size() * 8;
  res.audit = oracle.audit();
  return res;
}

EncodeResult encode(std::span<const Symbol> source, const CodecConfig& cfg) {
  return FeedforwardCodec(cfg).encode(source);
}

DecodeResult decode(std::span<const std::uint8_t> bitstream, FeedforwardOracle& oracle, const CodecConfig& cfg) {
  return FeedforwardCodec(cfg).decode(bitstream, oracle);
}

double predicted_length(std::size_t min_block, double rho, std::size_t passes) {
  const double M = static_cast<double>(min_block);
  if (std::abs(rho - 1.0) < 1e-12) return M * static_cast<double>(passes);
  return M * (std::pow(rho, static_cast<double>(passes)) - 1.0) / (rho - 1.0);
}

std::size_t plan_passes(std::size_t min_block, double rho, double target_n) {
  if (min_block < 1) throw InvalidArgument("min_block must be positive");
  if (!(rho >= 1.0) || !std::isfinite(rho)) throw InvalidArgument("growth factor must be finite and >= 1");
  for (std::size_t K = 1; K <= UINT16_MAX; ++K) {
    if (predicted_length(min_block, rho, K) >= target_n) return K;
  }
  throw InvalidArgument("target length needs more than 65535 passes");
}

std::size_t plan_passes(const CodecConfig& cfg, double target_n) {
  return plan_passes(cfg.min_block, growth_factor(cfg.prior, cfg.channel), target_n);
}

Measurement measure(std::span<const Symbol> x, std::span<const Symbol> xhat, std::size_t total_bits,
                    const DistortionMatrix& d, const Pmf& prior) {
  if (x.size() != xhat.size()) throw InvalidArgument("measure: sequence lengths differ");
  if (x.empty()) throw InvalidArgument("measure: empty sequences");
  Measurement m;
  m.distortions.resize(x.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    m.distortions[i] = d(x[i], xhat[i]);
    sum += m.distortions[i];
  }
  m.mean_distortion = sum / static_cast<double>(x.size());
  m.rate = static_cast<double>(total_bits) / static_cast<double>(x.size());
  m.rd_reference = blahut_arimoto(prior, d, std::clamp(m.mean_distortion, 0.0, d.d_max())).rate;
  m.gap = m.rate - m.rd_reference;
  return m;
}

Measurement measure(std::span<const Symbol> x, const DecodeResult& result, const DistortionMatrix& d,
                    const Pmf& prior) {
  return measure(x, result.reconstruction, result.total_bits, d, prior);
}

}  // namespace ffsc
