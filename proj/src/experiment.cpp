#include "ffsc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <thread>

#include <json.hpp>

#include "ffsc/error.hpp"

namespace ffsc {

ExperimentSpec hamming_experiment(double d0, std::size_t trials) {
  ExperimentSpec s;
  s.name = "exp-hamming";
  s.config.channel = TestChannel::binary_symmetric(d0);
  s.trials = trials;
  s.rate = {0.50, 0.56};
  s.distortion = {d0 - 0.01, d0 + 0.01};
  s.mutual_information = mutual_information(s.config.prior, s.config.channel);
  return s;
}

ExperimentSpec general_experiment(const SourceModel& model, double target_d, std::size_t trials,
                                  double target_n, std::size_t passes) {
  ExperimentSpec s;
  s.name = "exp-general";
  s.config.prior = model.prior;
  s.config.distortion = model.distortion;
  s.config.channel = model.channel ? *model.channel : blahut_arimoto(model.prior, model.distortion, target_d).channel;
  s.config.passes = passes ? passes : plan_passes(s.config, target_n);
  s.trials = trials;
  s.mutual_information = mutual_information(s.config.prior, s.config.channel);
  s.rate = {0.9 * s.mutual_information, 1.1 * s.mutual_information};
  // A model with its own channel is judged against that channel's distortion.
  const double center = model.channel ? expected_distortion(s.config.prior, s.config.channel, s.config.distortion)
                                      : target_d;
  s.distortion = {center - 0.015, center + 0.015};
  return s;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

TrialRow run_trial(const FeedforwardCodec& base, std::size_t i) {
  const auto t0 = std::chrono::steady_clock::now();
  CodecConfig cfg = base.config();
  cfg.seed = base.config().seed + i;
  const FeedforwardCodec codec(cfg);
  const double rho = growth_factor(cfg.prior, cfg.channel);
  const auto length = static_cast<std::size_t>(1.5 * predicted_length(cfg.min_block, rho, cfg.passes)) + 4096;
  const auto source = sample_source(cfg.prior, length, cfg.seed);

  const EncodeResult enc = codec.encode(source);
  const std::span<const Symbol> segment = std::span<const Symbol>(source).subspan(enc.offset);
  FeedforwardOracle oracle(segment);
  const DecodeResult dec = codec.decode(enc.bitstream, oracle);
  const Measurement m = measure(segment, dec, cfg.distortion, cfg.prior);

  TrialRow row;
  row.trial = i;
  row.seed = cfg.seed;
  row.n = enc.n;
  row.passes = cfg.passes;
  row.rate = m.rate;
  row.distortion = m.mean_distortion;
  row.rd_reference = m.rd_reference;
  row.gap = m.gap;
  row.atypical_passes = enc.atypical_passes.size();
  row.transport_ok = dec.reconstruction == enc.reconstruction && dec.pass_lengths == enc.pass_lengths;
  row.causality_clean = dec.audit.clean &&
                        dec.audit.max_revealed < static_cast<std::int64_t>(dec.audit.high_water);
  row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

std::pair<double, double> mean_sd(const std::vector<TrialRow>& rows, double TrialRow::*field) {
  double sum = 0.0;
  for (const auto& r : rows) sum += r.*field;
  const double mean = sum / static_cast<double>(rows.size());
  double ss = 0.0;
  for (const auto& r : rows) ss += (r.*field - mean) * (r.*field - mean);
  const double sd = rows.size() > 1 ? std::sqrt(ss / static_cast<double>(rows.size() - 1)) : 0.0;
  return {mean, sd};
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::vector<Symbol> sample_source(const Pmf& prior, std::size_t length, std::uint64_t seed) {
  const QuantizedModel q = quantize(prior, 24);
  std::mt19937_64 rng(splitmix64(seed));
  std::vector<Symbol> out(length);
  for (auto& s : out) s = q.lookup(static_cast<std::uint32_t>(rng() >> 40));
  return out;
}

std::size_t worker_threads() {
  if (const char* env = std::getenv("FFSC_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Report run_experiment(const ExperimentSpec& spec) {
  if (spec.trials < 1) throw InvalidArgument("an experiment needs at least one trial");
  const FeedforwardCodec base(spec.config);

  Report rep;
  rep.name = spec.name;
  rep.rows.resize(spec.trials);
  std::vector<std::string> errors(spec.trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < spec.trials;) {
      try {
        rep.rows[i] = run_trial(base, i);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const std::size_t nthreads = std::min(worker_threads(), spec.trials);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (std::size_t i = 0; i < spec.trials; ++i) {
    if (!errors[i].empty()) throw Error("trial " + std::to_string(i) + " failed: " + errors[i]);
  }

  auto& s = rep.summary;
  std::tie(s.mean_rate, s.sd_rate) = mean_sd(rep.rows, &TrialRow::rate);
  std::tie(s.mean_distortion, s.sd_distortion) = mean_sd(rep.rows, &TrialRow::distortion);
  std::tie(s.mean_gap, s.sd_gap) = mean_sd(rep.rows, &TrialRow::gap);
  double n_sum = 0.0;
  for (const auto& r : rep.rows) n_sum += static_cast<double>(r.n);
  s.mean_n = n_sum / static_cast<double>(rep.rows.size());

  if (!spec.rate.contains(s.mean_rate)) {
    rep.violations.push_back("mean rate " + fmt(s.mean_rate) + " outside [" + fmt(spec.rate.lo) + ", " +
                             fmt(spec.rate.hi) + "]");
  }
  if (!spec.distortion.contains(s.mean_distortion)) {
    rep.violations.push_back("mean distortion " + fmt(s.mean_distortion) + " outside [" +
                             fmt(spec.distortion.lo) + ", " + fmt(spec.distortion.hi) + "]");
  }
  for (const auto& r : rep.rows) {
    if (!r.transport_ok) rep.violations.push_back("trial " + std::to_string(r.trial) + ": transport mismatch");
    if (!r.causality_clean) rep.violations.push_back("trial " + std::to_string(r.trial) + ": causality audit failed");
  }
  return rep;
}

std::string report_csv(const Report& r, bool include_timing) {
  std::string out = "trial,seed,n,K,rate,distortion,rd_reference,gap,atypical_passes,transport,causality";
  if (include_timing) out += ",wall_ms";
  out += "\n";
  for (const auto& row : r.rows) {
    out += std::to_string(row.trial) + "," + std::to_string(row.seed) + "," + std::to_string(row.n) + "," +
           std::to_string(row.passes) + "," + fmt(row.rate) + "," + fmt(row.distortion) + "," +
           fmt(row.rd_reference) + "," + fmt(row.gap) + "," + std::to_string(row.atypical_passes) + "," +
           (row.transport_ok ? "ok" : "mismatch") + "," + (row.causality_clean ? "clean" : "violated");
    if (include_timing) out += "," + fmt(row.wall_ms);
    out += "\n";
  }
  const auto& s = r.summary;
  const std::string tail = include_timing ? ",,,,\n" : ",,,\n";
  out += "mean,," + fmt(s.mean_n) + ",," + fmt(s.mean_rate) + "," + fmt(s.mean_distortion) + ",," +
         fmt(s.mean_gap) + tail;
  out += "sd,,,," + fmt(s.sd_rate) + "," + fmt(s.sd_distortion) + ",," + fmt(s.sd_gap) + tail;
  return out;
}

std::string report_json(const Report& r, bool include_timing) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["experiment"] = r.name;
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows) {
    ordered_json o;
    o["trial"] = row.trial;
    o["seed"] = row.seed;
    o["n"] = row.n;
    o["K"] = row.passes;
    o["rate"] = row.rate;
    o["distortion"] = row.distortion;
    o["rd_reference"] = row.rd_reference;
    o["gap"] = row.gap;
    o["atypical_passes"] = row.atypical_passes;
    o["transport"] = row.transport_ok ? "ok" : "mismatch";
    o["causality"] = row.causality_clean ? "clean" : "violated";
    if (include_timing) o["wall_ms"] = row.wall_ms;
    rows.push_back(std::move(o));
  }
  j["trials"] = std::move(rows);
  const auto& s = r.summary;
  j["summary"] = {{"mean_n", s.mean_n},         {"mean_rate", s.mean_rate},
                  {"sd_rate", s.sd_rate},       {"mean_distortion", s.mean_distortion},
                  {"sd_distortion", s.sd_distortion}, {"mean_gap", s.mean_gap},
                  {"sd_gap", s.sd_gap}};
  j["violations"] = r.violations;
  j["pass"] = r.ok();
  return j.dump(2) + "\n";
}

}  // namespace ffsc
