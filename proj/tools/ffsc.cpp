// ffsc: command-line front end for the feedforward codec, the R(D) solver and the
// erasure experiments.

#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ffsc/codec.hpp"
#include "ffsc/erasure.hpp"
#include "ffsc/error.hpp"
#include "ffsc/experiment.hpp"
#include "ffsc/model_io.hpp"

namespace {

using namespace ffsc;
using nlohmann::ordered_json;

struct CodecFlags {
  std::string model = "binary-hamming";
  double target_d = 0.11;
  std::size_t min_block = 4096;
  std::size_t passes = 5;
  std::uint64_t seed = 1;
  unsigned precision = kDefaultPrecision;
  double delta = 0.02;
  std::string seed_block_mode = "sampled";
};

void add_codec_flags(CLI::App* app, CodecFlags& f, bool with_model = true) {
  if (with_model) {
    app->add_option("--model", f.model, "built-in model name or JSON model file")->capture_default_str();
  }
  app->add_option("--d0,--target-d", f.target_d, "target distortion for the test channel")->capture_default_str();
  app->add_option("--min-block", f.min_block, "seed block length M")->capture_default_str();
  app->add_option("--passes", f.passes, "number of passes K")->capture_default_str();
  app->add_option("--seed", f.seed, "seed for the noisy seed block")->capture_default_str();
  app->add_option("--precision", f.precision, "coder precision q")->capture_default_str();
  app->add_option("--delta", f.delta, "typicality threshold for the atypical-pass report")->capture_default_str();
  app->add_option("--seed-block-mode", f.seed_block_mode, "sampled or raw")
      ->check(CLI::IsMember({"sampled", "raw"}))
      ->capture_default_str();
}

CodecConfig make_config(const CodecFlags& f) {
  const SourceModel m = load_model(f.model);
  CodecConfig cfg;
  cfg.prior = m.prior;
  cfg.distortion = m.distortion;
  cfg.channel = m.channel ? *m.channel : blahut_arimoto(m.prior, m.distortion, f.target_d).channel;
  cfg.min_block = f.min_block;
  cfg.passes = f.passes;
  cfg.seed = f.seed;
  cfg.precision = f.precision;
  cfg.delta = f.delta;
  cfg.seed_block_mode = f.seed_block_mode == "raw" ? SeedBlockMode::raw : SeedBlockMode::sampled;
  cfg.validate();
  return cfg;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write '" + path + "'");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

// Raw mode: one symbol per byte. ASCII mode: digits, with '*' as symbol 2; whitespace skipped.
std::vector<Symbol> read_symbols(const std::string& path, bool ascii) {
  const auto bytes = read_file(path);
  std::vector<Symbol> out;
  out.reserve(bytes.size());
  for (std::uint8_t b : bytes) {
    if (!ascii) {
      out.push_back(b);
    } else if (b >= '0' && b <= '9') {
      out.push_back(static_cast<Symbol>(b - '0'));
    } else if (b == '*') {
      out.push_back(kErased);
    } else if (!std::isspace(b)) {
      throw InvalidArgument(std::string("unexpected character in ASCII symbol file: ") + static_cast<char>(b));
    }
  }
  return out;
}

std::string format_symbols(std::span<const Symbol> s, bool ascii) {
  std::string out;
  out.reserve(s.size() + 1);
  for (Symbol v : s) out.push_back(ascii ? static_cast<char>('0' + v) : static_cast<char>(v));
  if (ascii) out.push_back('\n');
  return out;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

int cmd_rd(const std::string& model_name, const std::vector<double>& grid, const std::string& out) {
  const SourceModel m = load_model(model_name);
  std::string csv = "D,R,achieved_D,channel_digest\n";
  for (double d : grid) {
    const RdPoint p = blahut_arimoto(m.prior, m.distortion, d);
    const auto cm = ConditionalModel::from_channel(p.channel);
    char digest[24];
    std::snprintf(digest, sizeof digest, "%016llx",
                  static_cast<unsigned long long>(model_digest(quantize(p.channel.marginal(m.prior)), cm)));
    csv += fmt(d) + "," + fmt(p.rate) + "," + fmt(p.distortion) + "," + digest + "\n";
  }
  emit(out, csv);
  return 0;
}

int cmd_encode(const CodecFlags& f, const std::string& src, const std::string& dst, bool ascii) {
  const CodecConfig cfg = make_config(f);
  const auto source = read_symbols(src, ascii);
  const EncodeResult r = encode(source, cfg);
  write_file(dst, std::string(r.bitstream.begin(), r.bitstream.end()));
  ordered_json j;
  j["n"] = r.n;
  j["offset"] = r.offset;
  j["pass_lengths"] = r.pass_lengths;
  j["total_bits"] = r.total_bits;
  j["rate"] = r.rate;
  j["atypical_passes"] = r.atypical_passes;
  write_file(dst + ".json", j.dump(2) + "\n");
  std::cout << "n " << r.n << "\noffset " << r.offset << "\nrate " << fmt(r.rate) << "\n";
  return 0;
}

int cmd_decode(const CodecFlags& f, const std::string& stream_path, const std::string& src,
               const std::string& recon_path, long long offset, bool ascii, const std::string& out) {
  const CodecConfig cfg = make_config(f);
  const auto stream = read_file(stream_path);
  if (offset < 0) {
    offset = 0;
    std::ifstream side(stream_path + ".json");
    if (side) offset = nlohmann::json::parse(side).value("offset", 0LL);
  }
  const auto source = read_symbols(src, ascii);
  if (static_cast<std::size_t>(offset) > source.size()) throw InvalidArgument("offset beyond the source file");
  FeedforwardOracle oracle(std::span<const Symbol>(source).subspan(static_cast<std::size_t>(offset)));
  const DecodeResult r = decode(stream, oracle, cfg);
  write_file(recon_path, format_symbols(r.reconstruction, ascii));
  const bool causal = r.audit.clean && r.audit.max_revealed < static_cast<std::int64_t>(r.audit.high_water);
  ordered_json j;
  j["n"] = r.reconstruction.size();
  j["pass_lengths"] = r.pass_lengths;
  j["mean_distortion"] = r.mean_distortion;
  j["rate"] = static_cast<double>(r.total_bits) / static_cast<double>(r.reconstruction.size());
  j["causality"] = causal ? "pass" : "fail";
  j["reveals"] = r.audit.reveals;
  emit(out, j.dump(2) + "\n");
  return causal ? 0 : 1;
}

int finish_experiment(const Report& r, const std::string& format, const std::string& out, bool timing) {
  emit(out, format == "json" ? report_json(r, timing) : report_csv(r, timing));
  for (const auto& v : r.violations) std::cerr << "threshold violated: " << v << "\n";
  return r.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lossy source coding with feedforward"};
  app.require_subcommand(1);

  std::string model = "binary-hamming";
  std::vector<double> grid{0.0, 0.05, 0.11, 0.25, 0.5};
  std::string out;
  auto* rd = app.add_subcommand("rd", "rate-distortion table via Blahut-Arimoto");
  rd->add_option("--model", model, "built-in model name or JSON model file")->capture_default_str();
  rd->add_option("--d,--target-d", grid, "distortion grid")->delimiter(',');
  rd->add_option("--out", out, "output file (default stdout)");

  CodecFlags enc_flags;
  std::string src, dst;
  bool ascii = false;
  auto* enc = app.add_subcommand("encode", "encode a symbol file");
  add_codec_flags(enc, enc_flags);
  enc->add_option("source", src, "source symbol file")->required();
  enc->add_option("bitstream", dst, "output bitstream")->required();
  enc->add_flag("--ascii", ascii, "symbol files are ASCII digits");

  CodecFlags dec_flags;
  std::string stream, recon;
  long long offset = -1;
  auto* dec = app.add_subcommand("decode", "decode a bitstream with the source as feedforward");
  add_codec_flags(dec, dec_flags);
  dec->add_option("bitstream", stream, "input bitstream")->required();
  dec->add_option("source", src, "source symbol file feeding the oracle")->required();
  dec->add_option("reconstruction", recon, "output reconstruction file")->required();
  dec->add_option("--offset", offset, "index of the coded segment in the source (default: from <bitstream>.json)");
  dec->add_flag("--ascii", ascii, "symbol files are ASCII digits");
  dec->add_option("--out", out, "report file (default stdout)");

  CodecFlags exp_flags;
  std::size_t trials = 20;
  std::string format = "csv";
  bool no_timing = false;
  auto add_exp_flags = [&](CLI::App* a) {
    a->add_option("--trials", trials, "number of trials")->capture_default_str();
    a->add_option("--out", out, "report file (default stdout)");
    a->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    a->add_flag("--no-timing", no_timing, "omit the wall-time column");
  };
  auto* eh = app.add_subcommand("exp-hamming", "binary Hamming benchmark");
  add_codec_flags(eh, exp_flags, false);
  add_exp_flags(eh);

  CodecFlags gen_flags;
  gen_flags.model = "ternary-hamming";
  gen_flags.target_d = 0.15;
  gen_flags.passes = 0;
  double target_n = 1e5;
  auto* eg = app.add_subcommand("exp-general", "general-alphabet run with a Blahut-Arimoto test channel");
  add_codec_flags(eg, gen_flags);
  eg->add_option("--target-n", target_n, "plan K for at least this many samples when --passes is 0")
      ->capture_default_str();
  add_exp_flags(eg);

  std::string beq_source = "0**10**1";
  auto* eb = app.add_subcommand("exp-beq", "binary erasure quantization with feedforward");
  eb->add_option("--source", beq_source, "source over {0,1,*}")->capture_default_str();
  eb->add_option("--out", out, "transcript file (default stdout)");

  std::string message = "0101", erasures = "2,3,6,7";
  auto* ed = app.add_subcommand("exp-duality", "erasure channel with feedback against its quantization dual");
  ed->add_option("--message", message, "message bits")->capture_default_str();
  ed->add_option("--erasures", erasures, "erased channel uses, 1-based, comma-separated")->capture_default_str();
  ed->add_option("--out", out, "transcript file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*rd) return cmd_rd(model, grid, out);
    if (*enc) return cmd_encode(enc_flags, src, dst, ascii);
    if (*dec) return cmd_decode(dec_flags, stream, src, recon, offset, ascii, out);
    if (*eh) {
      ExperimentSpec spec = hamming_experiment(exp_flags.target_d, trials);
      CodecConfig& c = spec.config;
      c.min_block = exp_flags.min_block;
      c.passes = exp_flags.passes;
      c.seed = exp_flags.seed;
      c.precision = exp_flags.precision;
      c.delta = exp_flags.delta;
      c.seed_block_mode = exp_flags.seed_block_mode == "raw" ? SeedBlockMode::raw : SeedBlockMode::sampled;
      return finish_experiment(run_experiment(spec), format, out, !no_timing);
    }
    if (*eg) {
      ExperimentSpec spec =
          general_experiment(load_model(gen_flags.model), gen_flags.target_d, trials, target_n, gen_flags.passes);
      CodecConfig& c = spec.config;
      c.min_block = gen_flags.min_block;
      c.passes = gen_flags.passes ? gen_flags.passes : plan_passes(c, target_n);
      c.seed = gen_flags.seed;
      c.precision = gen_flags.precision;
      c.delta = gen_flags.delta;
      c.seed_block_mode = gen_flags.seed_block_mode == "raw" ? SeedBlockMode::raw : SeedBlockMode::sampled;
      return finish_experiment(run_experiment(spec), format, out, !no_timing);
    }
    if (*eb) {
      const ErasureSource s = ErasureSource::from_string(beq_source);
      const BeqTranscript t = run_beq(s);
      emit(out, format_transcript(t));
      const bool ok = t.distortion == 0.0 && t.message.size() == t.n - t.erasures && t.causality_clean;
      return ok ? 0 : 1;
    }
    if (*ed) {
      const BitString m = BitString::from_string(message);
      const BecTranscript bec = run_bec(m, ErasurePattern::parse(erasures));
      const BeqTranscript beq = run_beq(ErasureSource::from_string(bec.received));
      const double beq_rate = beq.n ? static_cast<double>(beq.message.size()) / static_cast<double>(beq.n) : 0.0;
      char rate_line[40];
      std::snprintf(rate_line, sizeof rate_line, "rate %.6g\n", beq_rate);
      emit(out, "[channel]\n" + format_transcript(bec) + "[quantization]\n" + format_transcript(beq) +
                    "[duality]\n" + rate_line);
      const std::size_t erased_uses = beq.erasures;
      const bool ok = bec.decoded == bec.message && bec.uses == m.size() + erased_uses &&
                      beq.message == bec.message && beq.distortion == 0.0 && bec.rate == beq_rate;
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
