#include "ffsc/erasure.hpp"

#include <charconv>
#include <cstdio>

#include "ffsc/error.hpp"

namespace ffsc {

ErasureSource::ErasureSource(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {
  for (Symbol s : symbols_) {
    if (s > kErased) throw InvalidArgument("erasure source symbols must be 0, 1 or *");
    erasures_ += s == kErased;
  }
}

ErasureSource ErasureSource::from_string(std::string_view s) {
  std::vector<Symbol> v;
  v.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '0': v.push_back(0); break;
      case '1': v.push_back(1); break;
      case '*': v.push_back(kErased); break;
      default: throw InvalidArgument(std::string("unexpected character in erasure source: ") + c);
    }
  }
  return ErasureSource(std::move(v));
}

std::string ErasureSource::to_string() const { return format_ternary(symbols_); }

ErasurePattern::ErasurePattern(std::set<std::size_t> indices) : indices_(std::move(indices)) {
  if (!indices_.empty() && *indices_.begin() == 0) throw InvalidArgument("erasure indices start at 1");
}

ErasurePattern ErasurePattern::parse(std::string_view s) {
  std::set<std::size_t> out;
  while (!s.empty()) {
    const auto comma = s.find(',');
    const std::string_view tok = s.substr(0, comma);
    std::size_t v = 0;
    const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size()) {
      throw InvalidArgument("bad erasure index '" + std::string(tok) + "'");
    }
    if (!out.insert(v).second) throw InvalidArgument("duplicate erasure index " + std::string(tok));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return ErasurePattern(std::move(out));
}

std::string format_ternary(std::span<const Symbol> s) {
  std::string out;
  out.reserve(s.size());
  for (Symbol v : s) out.push_back(v == kErased ? '*' : static_cast<char>('0' + v));
  return out;
}

DistortionMatrix erasure_distortion() {
  return DistortionMatrix(std::vector<std::vector<double>>{{0, 1}, {1, 0}, {0, 0}});
}

BitString beq_encode(const ErasureSource& src) {
  BitString m;
  for (Symbol s : src.symbols()) {
    if (s != kErased) m.push_back(s == 1);
  }
  return m;
}

std::vector<Symbol> beq_decode(const BitString& m, FeedforwardOracle& oracle) {
  std::vector<Symbol> out;
  out.reserve(oracle.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    out.push_back(k < m.size() && m[k] ? 1 : 0);
    oracle.emitted(i + 1);
    if (oracle.reveal(i) == kErased) continue;
    if (k == m.size()) throw FormatError("message exhausted before all constrained positions were matched");
    ++k;
  }
  if (k != m.size()) throw FormatError("message longer than the number of constrained positions");
  return out;
}

BecTransmission bec_feedback_send(const BitString& message, const ErasurePattern& pattern, std::size_t max_uses) {
  if (max_uses == 0) max_uses = message.size() + pattern.size();
  BecTransmission t;
  std::size_t k = 0;
  while (k < message.size()) {
    if (t.uses == max_uses) throw InvalidArgument("erasures exhausted the channel-use budget");
    ++t.uses;
    t.sent.push_back(message[k]);
    if (pattern.erased(t.uses)) {
      ++t.erasures;
    } else {
      ++k;
    }
  }
  return t;
}

std::vector<Symbol> bec_channel(const BitString& sent, const ErasurePattern& pattern) {
  std::vector<Symbol> out(sent.size());
  for (std::size_t i = 0; i < sent.size(); ++i) out[i] = pattern.erased(i + 1) ? kErased : Symbol{sent[i]};
  return out;
}

BitString bec_feedback_receive(std::span<const Symbol> outputs) {
  BitString m;
  for (Symbol z : outputs) {
    if (z > kErased) throw InvalidArgument("channel outputs must be 0, 1 or *");
    if (z != kErased) m.push_back(z == 1);
  }
  return m;
}

BeqTranscript run_beq(const ErasureSource& src) {
  BeqTranscript t;
  const BitString m = beq_encode(src);
  FeedforwardOracle oracle(src.symbols());
  const auto xhat = beq_decode(m, oracle);
  const DistortionMatrix d = erasure_distortion();
  double sum = 0.0;
  for (std::size_t i = 0; i < xhat.size(); ++i) sum += d(src.symbols()[i], xhat[i]);
  t.source = src.to_string();
  t.message = m.to_string();
  t.reconstruction = format_ternary(xhat);
  t.n = src.size();
  t.erasures = src.erasures();
  t.distortion = xhat.empty() ? 0.0 : sum / static_cast<double>(xhat.size());
  t.causality_clean = oracle.audit().clean;
  return t;
}

BecTranscript run_bec(const BitString& message, const ErasurePattern& pattern) {
  BecTranscript t;
  const BecTransmission tx = bec_feedback_send(message, pattern);
  const auto z = bec_channel(tx.sent, pattern);
  t.message = message.to_string();
  for (std::size_t i : pattern.indices()) t.pattern += (t.pattern.empty() ? "" : ",") + std::to_string(i);
  t.sent = tx.sent.to_string();
  t.received = format_ternary(z);
  t.decoded = bec_feedback_receive(z).to_string();
  t.uses = tx.uses;
  t.rate = tx.uses ? static_cast<double>(message.size()) / static_cast<double>(tx.uses) : 0.0;
  return t;
}

namespace {

std::string fmt_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string format_transcript(const BeqTranscript& t) {
  std::string s;
  s += "source " + t.source + "\n";
  s += "message " + t.message + "\n";
  s += "reconstruction " + t.reconstruction + "\n";
  s += "n " + std::to_string(t.n) + "\n";
  s += "erasures " + std::to_string(t.erasures) + "\n";
  s += "message_bits " + std::to_string(t.message.size()) + "\n";
  s += "distortion " + fmt_real(t.distortion) + "\n";
  s += std::string("causality ") + (t.causality_clean ? "clean" : "violated") + "\n";
  return s;
}

std::string format_transcript(const BecTranscript& t) {
  std::string s;
  s += "message " + t.message + "\n";
  s += "erasures " + (t.pattern.empty() ? std::string("-") : t.pattern) + "\n";
  s += "sent " + t.sent + "\n";
  s += "received " + t.received + "\n";
  s += "decoded " + t.decoded + "\n";
  s += "uses " + std::to_string(t.uses) + "\n";
  s += "rate " + fmt_real(t.rate) + "\n";
  return s;
}

}  // namespace ffsc
