#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ffsc/error.hpp"
#include "ffsc/experiment.hpp"
#include "ffsc/model_io.hpp"

using namespace ffsc;

namespace {

ExperimentSpec small_spec() {
  ExperimentSpec s = hamming_experiment(0.11, 4);
  s.config.min_block = 512;
  s.config.passes = 4;
  return s;
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("reports are deterministic apart from timing") {
  const auto spec = small_spec();
  setenv("FFSC_THREADS", "1", 1);
  const Report a = run_experiment(spec);
  setenv("FFSC_THREADS", "3", 1);
  const Report b = run_experiment(spec);
  unsetenv("FFSC_THREADS");
  CHECK(report_csv(a, false) == report_csv(b, false));
  CHECK(report_json(a, false) == report_json(b, false));
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].trial == i);
    CHECK(a.rows[i].seed == spec.config.seed + i);
  }
}

TEST_CASE("csv layout") {
  const Report r = run_experiment(small_spec());
  const std::string csv = report_csv(r, true);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "trial,seed,n,K,rate,distortion,rd_reference,gap,atypical_passes,transport,causality,wall_ms");
  CHECK(count_lines(csv) == r.rows.size() + 3);
  std::string line;
  while (std::getline(in, line)) CHECK(std::count(line.begin(), line.end(), ',') == 11);
  const std::string no_time = report_csv(r, false);
  CHECK(no_time.find("wall_ms") == std::string::npos);
}

TEST_CASE("json mirrors csv fields") {
  const Report r = run_experiment(small_spec());
  const auto j = nlohmann::json::parse(report_json(r, true));
  CHECK(j["experiment"] == "exp-hamming");
  CHECK(j["trials"].size() == r.rows.size());
  CHECK(j["trials"][0].contains("wall_ms"));
  CHECK(j["trials"][0]["transport"] == "ok");
  CHECK(j["summary"]["mean_rate"].get<double>() == doctest::Approx(r.summary.mean_rate));
  CHECK(j["pass"].get<bool>() == r.ok());
}

TEST_CASE("thresholds drive the verdict") {
  auto spec = small_spec();
  spec.rate = {0.0, 0.1};
  const Report r = run_experiment(spec);
  CHECK_FALSE(r.ok());
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].find("mean rate") == 0);

  auto loose = small_spec();
  loose.rate = {0.0, 10.0};
  loose.distortion = {0.0, 1.0};
  CHECK(run_experiment(loose).ok());
}

TEST_CASE("general experiment plans K for the target length") {
  const ExperimentSpec g = general_experiment(ternary_hamming_model(), 0.15, 2, 1e5);
  CHECK(g.config.passes == 5);
  CHECK(g.mutual_information == doctest::Approx(0.825).epsilon(0.001));
  CHECK(g.rate.lo == doctest::Approx(0.9 * g.mutual_information));
  CHECK(g.distortion.hi == doctest::Approx(0.165));

  SourceModel own = binary_hamming_model();
  own.channel = TestChannel::binary_symmetric(0.2);
  const ExperimentSpec o = general_experiment(own, 0.11, 2, 1e5);
  CHECK(o.distortion.lo == doctest::Approx(0.185));
  CHECK(o.distortion.hi == doctest::Approx(0.215));
}

TEST_CASE("sample_source follows the prior") {
  const auto s = sample_source(Pmf({0.7, 0.2, 0.1}), 200000, 3);
  std::size_t c[3] = {0, 0, 0};
  for (Symbol v : s) ++c[v];
  CHECK(c[0] / 2e5 == doctest::Approx(0.7).epsilon(0.01));
  CHECK(c[2] / 2e5 == doctest::Approx(0.1).epsilon(0.03));
  CHECK(sample_source(Pmf::uniform(2), 100, 9) == sample_source(Pmf::uniform(2), 100, 9));
  CHECK(sample_source(Pmf::uniform(2), 100, 9) != sample_source(Pmf::uniform(2), 100, 10));
}

TEST_CASE("model files") {
  const std::string text = R"({
    "name": "skewed",
    "alphabet_size": 3,
    "probs": [0.5, 0.3, 0.2],
    "distortion": [[0, 1, 2], [1, 0, 1], [2, 1, 0]]
  })";
  const SourceModel m = parse_model(text);
  CHECK(m.name == "skewed");
  CHECK(m.prior.size() == 3);
  CHECK(m.distortion(0, 2) == 2.0);
  CHECK_FALSE(m.channel.has_value());

  const SourceModel back = parse_model(model_to_json(m));
  CHECK(back.name == m.name);
  CHECK(back.distortion(2, 0) == 2.0);

  const std::string with_channel = R"({"alphabet_size": 2, "probs": [0.5, 0.5],
      "distortion": [[0, 1], [1, 0]], "channel": [[0.9, 0.1], [0.1, 0.9]]})";
  const SourceModel c = parse_model(with_channel);
  REQUIRE(c.channel.has_value());
  CHECK((*c.channel)(0, 1) == 0.1);

  CHECK_THROWS_AS((void)parse_model("{"), InvalidArgument);
  CHECK_THROWS_AS((void)parse_model(R"({"alphabet_size": 2, "probs": [1.0], "distortion": [[0]]})"), InvalidArgument);
  CHECK_THROWS_AS((void)parse_model(R"({"alphabet_size": 2, "probs": [0.5, 0.5]})"), InvalidArgument);
  CHECK_THROWS_AS((void)parse_model(R"({"alphabet_size": 2, "probs": [0.5, 0.5], "distortion": [[0, 1], [1, 0]],
      "reconstruction_size": 3})"), InvalidArgument);

  CHECK(load_model("binary-hamming").prior.size() == 2);
  CHECK(load_model("ternary-hamming").distortion.cols() == 3);
  CHECK_THROWS_AS((void)load_model("/nonexistent/model.json"), InvalidArgument);
}
