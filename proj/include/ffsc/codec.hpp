#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ffsc/coder.hpp"
#include "ffsc/model.hpp"
#include "ffsc/shaping.hpp"

namespace ffsc {

enum class SeedBlockMode { sampled, raw };

struct CodecConfig {
  Pmf prior = Pmf::uniform(2);
  TestChannel channel = TestChannel::binary_symmetric(0.11);
  DistortionMatrix distortion = DistortionMatrix::hamming(2);
  std::size_t min_block = 4096;  // M
  std::size_t passes = 5;        // K
  unsigned precision = kDefaultPrecision;
  std::uint64_t seed = 1;
  SeedBlockMode seed_block_mode = SeedBlockMode::sampled;
  double delta = 0.02;

  /// Throws InvalidArgument on inconsistent dimensions or out-of-range parameters.
  void validate() const;
};

/// Releases true sample i only once reconstruction i has been emitted.
class FeedforwardOracle {
 public:
  struct Access {
    std::size_t index;
    std::size_t high_water;
  };
  struct Audit {
    std::size_t reveals = 0;
    std::size_t high_water = 0;
    std::int64_t max_revealed = -1;
    bool clean = true;
  };

  explicit FeedforwardOracle(std::span<const Symbol> truth, bool keep_log = false)
      : truth_(truth), keep_log_(keep_log) {}

  [[nodiscard]] std::size_t size() const noexcept { return truth_.size(); }
  [[nodiscard]] std::size_t high_water() const noexcept { return audit_.high_water; }

  /// Reports that reconstructions [0, count) are out. Must not move backwards.
  void emitted(std::size_t count);
  /// Throws CausalityViolation unless i < high_water().
  [[nodiscard]] Symbol reveal(std::size_t i);

  [[nodiscard]] const Audit& audit() const noexcept { return audit_; }
  [[nodiscard]] const std::vector<Access>& log() const noexcept { return log_; }

 private:
  std::span<const Symbol> truth_;
  bool keep_log_;
  Audit audit_;
  std::vector<Access> log_;
};

inline constexpr std::size_t kHeaderBytes = 28;
inline constexpr std::uint8_t kFormatVersion = 1;

struct StreamHeader {
  std::uint8_t version = kFormatVersion;
  std::uint8_t precision = kDefaultPrecision;
  std::uint16_t passes = 0;
  std::uint32_t min_block = 0;
  std::uint64_t seed = 0;
  std::uint64_t digest = 0;

  friend bool operator==(const StreamHeader&, const StreamHeader&) = default;
};

void write_header(std::vector<std::uint8_t>& out, const StreamHeader& h);
/// Checks magic and version. Throws FormatError.
[[nodiscard]] StreamHeader read_header(std::span<const std::uint8_t> bytes);

/// 64-bit FNV-1a over the quantized marginal and conditional tables.
[[nodiscard]] std::uint64_t model_digest(const QuantizedModel& marginal, const ConditionalModel& cm);

struct EncodeResult {
  std::vector<std::uint8_t> bitstream;
  /// Encoder-side reconstruction in original time, aligned with source[offset, offset + n).
  std::vector<Symbol> reconstruction;
  std::size_t n = 0;
  std::size_t offset = 0;
  std::vector<std::size_t> pass_lengths;  // L_1..L_K in encoding order
  std::size_t total_bits = 0;
  double rate = 0.0;
  std::vector<std::size_t> atypical_passes;  // 1-based pass indices
};

struct DecodeResult {
  std::vector<Symbol> reconstruction;
  std::vector<double> distortions;
  double mean_distortion = 0.0;
  std::vector<std::size_t> pass_lengths;  // same order as EncodeResult::pass_lengths
  std::size_t total_bits = 0;
  FeedforwardOracle::Audit audit;
};

class FeedforwardCodec {
 public:
  explicit FeedforwardCodec(CodecConfig cfg);

  /// Codes the trailing n samples of `source`, where n follows from the data.
  /// Throws SourceExhausted when the source is too short for K passes.
  [[nodiscard]] EncodeResult encode(std::span<const Symbol> source) const;

  /// `oracle` holds the coded segment, source[offset, offset + n) or any extension of it.
  [[nodiscard]] DecodeResult decode(std::span<const std::uint8_t> bitstream, FeedforwardOracle& oracle) const;

  [[nodiscard]] const CodecConfig& config() const noexcept { return cfg_; }
  [[nodiscard]] const QuantizedModel& marginal_model() const noexcept { return marginal_; }
  [[nodiscard]] const ConditionalModel& conditional_model() const noexcept { return cm_; }
  [[nodiscard]] std::uint64_t digest() const noexcept { return digest_; }

 private:
  CodecConfig cfg_;
  QuantizedModel marginal_;
  ConditionalModel cm_;
  std::uint64_t digest_;
};

[[nodiscard]] EncodeResult encode(std::span<const Symbol> source, const CodecConfig& cfg);
[[nodiscard]] DecodeResult decode(std::span<const std::uint8_t> bitstream, FeedforwardOracle& oracle,
                                  const CodecConfig& cfg);

/// Smallest K with M (rho^K - 1) / (rho - 1) >= target_n.
[[nodiscard]] std::size_t plan_passes(std::size_t min_block, double rho, double target_n);
[[nodiscard]] std::size_t plan_passes(const CodecConfig& cfg, double target_n);
/// M (rho^K - 1) / (rho - 1).
[[nodiscard]] double predicted_length(std::size_t min_block, double rho, std::size_t passes);

struct Measurement {
  std::vector<double> distortions;
  double mean_distortion = 0.0;
  double rate = 0.0;
  double rd_reference = 0.0;  // R(mean_distortion)
  double gap = 0.0;           // rate - rd_reference
};

[[nodiscard]] Measurement measure(std::span<const Symbol> x, std::span<const Symbol> xhat,
                                  std::size_t total_bits, const DistortionMatrix& d, const Pmf& prior);
[[nodiscard]] Measurement measure(std::span<const Symbol> x, const DecodeResult& result,
                                  const DistortionMatrix& d, const Pmf& prior);

}  // namespace ffsc
