#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ffsc/codec.hpp"
#include "ffsc/model_io.hpp"

namespace ffsc {

/// Closed acceptance window for a summary mean.
struct Window {
  double lo;
  double hi;
  [[nodiscard]] bool contains(double v) const noexcept { return v >= lo && v <= hi; }
};

struct ExperimentSpec {
  std::string name;
  CodecConfig config;
  std::size_t trials = 20;
  Window rate{0.0, 1e300};
  Window distortion{0.0, 1e300};
  double mutual_information = 0.0;  // of the configured test channel
};

/// Binary uniform source, BSC(d0) test channel, Hamming distortion.
[[nodiscard]] ExperimentSpec hamming_experiment(double d0 = 0.11, std::size_t trials = 20);
/// Test channel from the model, or from Blahut-Arimoto at target_d when it has none. K is planned
/// for at least target_n samples unless `passes` is nonzero.
[[nodiscard]] ExperimentSpec general_experiment(const SourceModel& model, double target_d,
                                                std::size_t trials = 20, double target_n = 1e5,
                                                std::size_t passes = 0);

struct TrialRow {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t passes = 0;
  double rate = 0.0;
  double distortion = 0.0;
  double rd_reference = 0.0;
  double gap = 0.0;
  std::size_t atypical_passes = 0;
  bool transport_ok = false;
  bool causality_clean = false;
  double wall_ms = 0.0;
};

struct Summary {
  double mean_rate = 0.0, sd_rate = 0.0;
  double mean_distortion = 0.0, sd_distortion = 0.0;
  double mean_gap = 0.0, sd_gap = 0.0;
  double mean_n = 0.0;
};

struct Report {
  std::string name;
  std::vector<TrialRow> rows;  // ordered by trial index
  Summary summary;
  std::vector<std::string> violations;
  [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
};

/// Source samples for one trial, drawn i.i.d. from the prior with a generator derived from `seed`.
[[nodiscard]] std::vector<Symbol> sample_source(const Pmf& prior, std::size_t length, std::uint64_t seed);

/// Runs trial i with seed config.seed + i. Trials run on up to FFSC_THREADS threads.
[[nodiscard]] Report run_experiment(const ExperimentSpec& spec);

[[nodiscard]] std::string report_csv(const Report& r, bool include_timing = true);
[[nodiscard]] std::string report_json(const Report& r, bool include_timing = true);

/// Worker count: FFSC_THREADS if set and positive, else hardware concurrency.
[[nodiscard]] std::size_t worker_threads();

}  // namespace ffsc
