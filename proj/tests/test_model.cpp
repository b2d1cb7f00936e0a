#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ffsc/error.hpp"
#include "ffsc/model.hpp"
#include "oracles.hpp"

using namespace ffsc;
using doctest::Approx;

namespace {

Pmf random_pmf(std::mt19937_64& g, std::size_t k) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::vector<double> w(k);
  double s = 0;
  for (auto& v : w) s += (v = u(g));
  for (auto& v : w) v /= s;
  double t = 0;
  for (double v : w) t += v;
  w[0] += 1.0 - t;
  return Pmf(w);
}

}  // namespace

TEST_CASE("pmf validation") {
  CHECK_THROWS_AS(Pmf({0.5, 0.6}), InvalidArgument);
  CHECK_THROWS_AS(Pmf({-0.1, 1.1}), InvalidArgument);
  CHECK_THROWS_AS(Pmf({NAN, 1.0}), InvalidArgument);
  CHECK_NOTHROW(Pmf({0.0, 1.0}));
  CHECK_THROWS_AS(Alphabet{0}, InvalidArgument);
  CHECK_THROWS_AS(Alphabet{65537}, InvalidArgument);
}

TEST_CASE("entropy") {
  CHECK(entropy(Pmf::uniform(4)) == Approx(2.0).epsilon(1e-12));
  CHECK(entropy(Pmf::point_mass(5, 3)) == 0.0);
  CHECK(entropy(Pmf::bernoulli(0.11)) == Approx(oracle::h(0.11)).epsilon(1e-12));
  CHECK(entropy(Pmf::bernoulli(0.11)) == Approx(0.49992).epsilon(1e-5));
  CHECK(binary_entropy(0.11) == Approx(oracle::h(0.11)).epsilon(1e-12));
}

TEST_CASE("conditional entropy and mutual information") {
  const Pmf u2 = Pmf::uniform(2);
  CHECK(conditional_entropy(TestChannel::identity(3), Pmf::uniform(3)) == 0.0);
  const Pmf out = Pmf({0.2, 0.3, 0.5});
  CHECK(conditional_entropy(TestChannel::independent(2, out), u2) == Approx(entropy(out)).epsilon(1e-12));
  CHECK(conditional_entropy(TestChannel::binary_symmetric(0.11), u2) == Approx(0.49992).epsilon(1e-5));

  CHECK(mutual_information(u2, TestChannel::independent(2, out)) == Approx(0.0).epsilon(1e-12));
  CHECK(mutual_information(u2, TestChannel::identity(2)) == Approx(1.0).epsilon(1e-12));
  CHECK(mutual_information(u2, TestChannel::binary_symmetric(0.11)) == Approx(1 - oracle::h(0.11)).epsilon(1e-12));
  CHECK(mutual_information(u2, TestChannel::binary_symmetric(0.11)) == Approx(0.50008).epsilon(1e-5));

  CHECK_THROWS_AS((void)conditional_entropy(TestChannel::identity(3), u2), InvalidArgument);
  CHECK_THROWS_AS((void)mutual_information(u2, TestChannel::identity(3)), InvalidArgument);
}

TEST_CASE("mutual information equals H(xhat) - H(xhat|x) on random channels") {
  std::mt19937_64 g(11);
  for (int t = 0; t < 200; ++t) {
    const std::size_t k = 2 + g() % 5, m = 2 + g() % 5;
    const Pmf prior = random_pmf(g, k);
    std::vector<Pmf> rows;
    for (std::size_t x = 0; x < k; ++x) rows.push_back(random_pmf(g, m));
    const TestChannel ch(rows);
    const double direct = mutual_information(prior, ch);
    const double via_h = entropy(ch.marginal(prior)) - conditional_entropy(ch, prior);
    CHECK(std::abs(direct - via_h) < 1e-10);
    CHECK(direct >= -1e-12);
    CHECK(conditional_entropy(ch, prior) <= std::log2(static_cast<double>(m)) + 1e-12);
  }
}

TEST_CASE("expected distortion") {
  const Pmf u2 = Pmf::uniform(2);
  const auto d = DistortionMatrix::hamming(2);
  CHECK(expected_distortion(u2, TestChannel::identity(2), d) == 0.0);
  CHECK(expected_distortion(u2, TestChannel::binary_symmetric(0.11), d) == Approx(0.11).epsilon(1e-12));
  CHECK(expected_distortion(u2, TestChannel::independent(2, u2), d) == Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS((void)expected_distortion(u2, TestChannel::identity(2), DistortionMatrix::hamming(3)),
                  InvalidArgument);
  CHECK_THROWS_AS(DistortionMatrix({{0, -1}, {1, 0}}), InvalidArgument);
  CHECK(DistortionMatrix({{0, 3}, {1, 0}}).d_max() == 3.0);
}

TEST_CASE("growth factor") {
  const Pmf u2 = Pmf::uniform(2);
  CHECK(growth_factor(u2, TestChannel::binary_symmetric(0.11)) == Approx(1 / oracle::h(0.11)).epsilon(1e-12));
  CHECK(growth_factor(u2, TestChannel::binary_symmetric(0.11)) == Approx(2.0003).epsilon(1e-4));
  CHECK(growth_factor(u2, TestChannel::independent(2, Pmf::bernoulli(0.3))) == Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_WITH_AS((void)growth_factor(u2, TestChannel::identity(2)), "infinite growth factor: test channel is deterministic (H(xhat|x) = 0)", InvalidArgument);
}

TEST_CASE("strong typicality") {
  const TypicalityParams tp{0.05};
  std::vector<Symbol> exact(100, 0);
  for (int i = 0; i < 11; ++i) exact[i * 9] = 1;
  CHECK(is_strongly_typical(exact, Pmf::bernoulli(0.11), tp));
  CHECK_FALSE(is_strongly_typical(std::vector<Symbol>(100, 1), Pmf::bernoulli(0.11), tp));
  std::vector<Symbol> with_zero = {0, 1, 0, 1, 2};
  CHECK_FALSE(is_strongly_typical(with_zero, Pmf({0.5, 0.5, 0.0}), TypicalityParams{0.5}));
  CHECK_FALSE(is_strongly_typical(std::vector<Symbol>{}, Pmf::uniform(2), tp));
  CHECK_THROWS_AS(TypicalityParams{0.0}, InvalidArgument);
  CHECK_THROWS_AS(TypicalityParams{1.0}, InvalidArgument);
}

TEST_CASE("strong typicality accepts long i.i.d. sequences") {
  std::mt19937_64 g(5);
  const Pmf p = Pmf::bernoulli(0.11);
  std::bernoulli_distribution bit(0.11);
  int failures = 0;
  for (int run = 0; run < 100; ++run) {
    std::vector<Symbol> s(100000);
    for (auto& v : s) v = bit(g);
    failures += !is_strongly_typical(s, p, TypicalityParams{0.02});
  }
  CHECK(failures < 5);
}

TEST_CASE("joint typicality") {
  const Pmf u2 = Pmf::uniform(2);
  const auto bsc = TestChannel::binary_symmetric(0.11);
  const TypicalityParams tp{0.02};
  std::vector<Symbol> x, xh;
  for (int rep = 0; rep < 2; ++rep) {
    for (int i = 0; i < 89; ++i) x.push_back(0), xh.push_back(0);
    for (int i = 0; i < 11; ++i) x.push_back(0), xh.push_back(1);
    for (int i = 0; i < 89; ++i) x.push_back(1), xh.push_back(1);
    for (int i = 0; i < 11; ++i) x.push_back(1), xh.push_back(0);
  }
  CHECK(is_jointly_typical(x, xh, u2, bsc, tp));

  std::mt19937_64 g(3);
  std::vector<Symbol> y(100000);
  for (auto& v : y) v = g() & 1u;
  CHECK_FALSE(is_jointly_typical(y, y, u2, bsc, tp));

  std::vector<Symbol> a = {0, 1}, b = {1, 0};
  CHECK_FALSE(is_jointly_typical(a, b, u2, TestChannel::identity(2), TypicalityParams{0.9}));
  CHECK_THROWS_AS((void)is_jointly_typical(a, std::vector<Symbol>{0}, u2, bsc, tp), InvalidArgument);
}

TEST_CASE("blahut-arimoto matches 1 - h(D) for the binary Hamming case") {
  const Pmf u2 = Pmf::uniform(2);
  const auto d = DistortionMatrix::hamming(2);
  for (double D : {0.05, 0.11, 0.25}) {
    const RdPoint p = blahut_arimoto(u2, d, D);
    CHECK(std::abs(p.rate - oracle::rd_uniform_hamming(2, D)) < 1e-4);
    CHECK(std::abs(p.distortion - D) < 1e-6);
  }
  const RdPoint p = blahut_arimoto(u2, d, 0.11);
  CHECK(p.rate == Approx(0.5001).epsilon(1e-4));
  CHECK(p.channel(0, 1) == Approx(0.11).epsilon(1e-4));
  CHECK(p.channel(1, 0) == Approx(0.11).epsilon(1e-4));
}

TEST_CASE("blahut-arimoto endpoints") {
  const Pmf u2 = Pmf::uniform(2);
  const auto d = DistortionMatrix::hamming(2);
  const RdPoint zero = blahut_arimoto(u2, d, 0.0);
  CHECK(std::abs(zero.rate - 1.0) < 1e-9);
  CHECK(zero.channel(0, 0) == Approx(1.0).epsilon(1e-9));
  CHECK(zero.channel(1, 1) == Approx(1.0).epsilon(1e-9));
  CHECK(zero_rate_distortion(u2, d) == 0.5);
  CHECK(std::abs(blahut_arimoto(u2, d, 0.5).rate) < 1e-9);
  CHECK(std::abs(blahut_arimoto(u2, d, 0.9).rate) < 1e-9);

  const Pmf skew = Pmf::bernoulli(0.2);
  CHECK(std::abs(blahut_arimoto(skew, d, 0.0).rate - oracle::h(0.2)) < 1e-9);
  CHECK(std::abs(blahut_arimoto(skew, d, 0.2).rate) < 1e-9);
  CHECK(std::abs(blahut_arimoto(skew, d, 0.1).rate - (oracle::h(0.2) - oracle::h(0.1))) < 1e-6);

  const RdPoint t0 = blahut_arimoto(Pmf::uniform(3), DistortionMatrix::hamming(3), 0.0);
  CHECK(std::abs(t0.rate - std::log2(3.0)) < 1e-9);

  CHECK_THROWS_AS((void)blahut_arimoto(u2, d, -0.1), InvalidArgument);
  CHECK_THROWS_AS((void)blahut_arimoto(u2, d, 1.5), InvalidArgument);
}

TEST_CASE("blahut-arimoto on the ternary Hamming case") {
  const Pmf u3 = Pmf::uniform(3);
  const auto d = DistortionMatrix::hamming(3);
  for (double D : {0.05, 0.15, 0.4}) {
    const RdPoint p = blahut_arimoto(u3, d, D);
    CHECK(std::abs(p.rate - oracle::rd_uniform_hamming(3, D)) < 1e-6);
    CHECK(std::abs(expected_distortion(u3, p.channel, d) - D) < 1e-6);
    CHECK(std::abs(mutual_information(u3, p.channel) - p.rate) < 1e-9);
  }
}

TEST_CASE("R(D) is convex and non-increasing on a grid") {
  const Pmf prior({0.5, 0.3, 0.2});
  const DistortionMatrix d({{0, 1, 4}, {1, 0, 1}, {2, 1, 0}});
  std::vector<double> D, R;
  const double top = zero_rate_distortion(prior, d);
  for (int i = 0; i <= 30; ++i) {
    D.push_back(top * i / 30.0);
    R.push_back(blahut_arimoto(prior, d, D.back()).rate);
  }
  for (std::size_t i = 1; i < R.size(); ++i) CHECK(R[i] <= R[i - 1] + 1e-9);
  for (std::size_t i = 2; i < R.size(); ++i) {
    const double s1 = (R[i - 1] - R[i - 2]) / (D[i - 1] - D[i - 2]);
    const double s2 = (R[i] - R[i - 1]) / (D[i] - D[i - 1]);
    CHECK(s2 >= s1 - 1e-5);
  }
}

TEST_CASE("blahut-arimoto reports non-convergence with its last iterate") {
  RdOptions opts;
  opts.max_iter = 1;
  opts.tol = 1e-15;
  try {
    (void)blahut_arimoto(Pmf({0.5, 0.3, 0.2}), DistortionMatrix({{0, 1, 4}, {1, 0, 1}, {2, 1, 0}}), 0.2, opts);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.last().iterations >= 1);
    CHECK(e.last().rate > 0.0);
  }
}

TEST_CASE("rectangular distortion for erasure-style sources") {
  // Source {0, 1, *}, reconstruction {0, 1}; the * column pair costs nothing.
  const double eps = 0.3;
  const Pmf prior({(1 - eps) / 2, (1 - eps) / 2, eps});
  const DistortionMatrix d({{0, 1}, {1, 0}, {0, 0}});
  CHECK(min_distortion(prior, d) == 0.0);
  CHECK(std::abs(blahut_arimoto(prior, d, 0.0).rate - (1 - eps)) < 1e-6);
}
