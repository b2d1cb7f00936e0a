#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ffsc/bits.hpp"
#include "ffsc/codec.hpp"
#include "ffsc/model.hpp"

namespace ffsc {

/// '*' is stored as this value in the 3-ary source alphabet.
inline constexpr Symbol kErased = 2;

/// Sequence over {0, 1, *}.
class ErasureSource {
 public:
  ErasureSource() = default;
  explicit ErasureSource(std::vector<Symbol> symbols);
  static ErasureSource from_string(std::string_view s);

  [[nodiscard]] std::size_t size() const noexcept { return symbols_.size(); }
  [[nodiscard]] std::size_t erasures() const noexcept { return erasures_; }
  [[nodiscard]] std::span<const Symbol> symbols() const noexcept { return symbols_; }
  [[nodiscard]] std::string to_string() const;

 private:
  std::vector<Symbol> symbols_;
  std::size_t erasures_ = 0;
};

/// Erased channel uses, numbered from 1.
class ErasurePattern {
 public:
  ErasurePattern() = default;
  explicit ErasurePattern(std::set<std::size_t> indices);
  /// Comma-separated list such as "2,3,6,7"; empty string means no erasures.
  static ErasurePattern parse(std::string_view s);

  [[nodiscard]] bool erased(std::size_t use) const { return indices_.count(use) != 0; }
  [[nodiscard]] std::size_t size() const noexcept { return indices_.size(); }
  [[nodiscard]] const std::set<std::size_t>& indices() const noexcept { return indices_; }

 private:
  std::set<std::size_t> indices_;
};

/// Formats symbols over {0, 1, 2} with 2 shown as '*'.
[[nodiscard]] std::string format_ternary(std::span<const Symbol> s);
/// d(0,1) = d(1,0) = 1, everything else 0; rows are {0, 1, *}, columns {0, 1}.
[[nodiscard]] DistortionMatrix erasure_distortion();

/// The non-erased values in order.
[[nodiscard]] BitString beq_encode(const ErasureSource& src);

/// Emits the current message bit at each time, then learns x_i through the oracle and
/// moves to the next bit only if x_i was not erased. Emits 0 once the message runs out.
/// Throws FormatError if the message and source disagree.
[[nodiscard]] std::vector<Symbol> beq_decode(const BitString& m, FeedforwardOracle& oracle);

struct BecTransmission {
  BitString sent;
  std::size_t uses = 0;
  std::size_t erasures = 0;  // erased uses during the transmission
};

/// Repeats each bit until a use outside `pattern` delivers it.
/// max_uses = 0 means message length plus pattern size, which always suffices.
[[nodiscard]] BecTransmission bec_feedback_send(const BitString& message, const ErasurePattern& pattern,
                                                std::size_t max_uses = 0);
/// Channel output for the given inputs: erased uses become '*'.
[[nodiscard]] std::vector<Symbol> bec_channel(const BitString& sent, const ErasurePattern& pattern);
/// Each non-erased output is the next message bit.
[[nodiscard]] BitString bec_feedback_receive(std::span<const Symbol> outputs);

struct BeqTranscript {
  std::string source;
  std::string message;
  std::string reconstruction;
  std::size_t n = 0;
  std::size_t erasures = 0;
  double distortion = 0.0;
  bool causality_clean = false;
};

struct BecTranscript {
  std::string message;
  std::string pattern;
  std::string sent;
  std::string received;
  std::string decoded;
  std::size_t uses = 0;
  double rate = 0.0;
};

[[nodiscard]] BeqTranscript run_beq(const ErasureSource& src);
[[nodiscard]] BecTranscript run_bec(const BitString& message, const ErasurePattern& pattern);
/// One `key value` line per field.
[[nodiscard]] std::string format_transcript(const BeqTranscript& t);
[[nodiscard]] std::string format_transcript(const BecTranscript& t);

}  // namespace ffsc
