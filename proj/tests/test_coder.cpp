#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <random>
#include <vector>

#include "ffsc/coder.hpp"
#include "ffsc/error.hpp"
#include "oracles.hpp"
#include "properties.hpp"

using namespace ffsc;
using doctest::Approx;

namespace {

// Exactly round(p * m) ones, shuffled.
std::vector<Symbol> exact_bernoulli(std::size_t m, double p, std::uint64_t seed) {
  std::vector<Symbol> s(m, 0);
  const auto ones = static_cast<std::size_t>(std::llround(p * static_cast<double>(m)));
  std::fill(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(ones), Symbol{1});
  std::mt19937_64 g(seed);
  std::shuffle(s.begin(), s.end(), g);
  return s;
}

double seconds_to_compress(const std::vector<Symbol>& s, const QuantizedModel& q) {
  std::vector<double> t;
  for (int rep = 0; rep < 3; ++rep) {
    const auto t0 = std::chrono::steady_clock::now();
    const Frame f = compress(s, q);
    t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    REQUIRE(f.symbol_count == s.size());
  }
  std::sort(t.begin(), t.end());
  return t[1];
}

}  // namespace

TEST_CASE("quantize examples") {
  const auto half = quantize(Pmf::bernoulli(0.5), 16);
  CHECK(half.freq(0) == 32768);
  CHECK(half.freq(1) == 32768);

  const auto p11 = quantize(Pmf::bernoulli(0.11), 16);
  const auto expect = oracle::largest_remainder({0.89, 0.11}, 65536);
  CHECK(p11.freq(0) == expect[0]);
  CHECK(p11.freq(1) == expect[1]);
  CHECK(p11.freq(0) == 58327);
  CHECK(p11.freq(1) == 7209);

  // True zeros stay zero, so the point mass takes the whole total.
  const auto pm = quantize(Pmf::point_mass(2, 0), 16);
  CHECK(pm.freq(0) == 65536);
  CHECK(pm.freq(1) == 0);

  CHECK_THROWS_AS((void)quantize(Pmf::uniform(5), 2), InvalidArgument);
  CHECK_THROWS_AS((void)quantize(Pmf::uniform(2), 1), InvalidArgument);
  CHECK_THROWS_AS((void)quantize(Pmf::uniform(2), 25), InvalidArgument);
}

TEST_CASE("quantize error bound and minimum slots") {
  std::mt19937_64 g(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t k = 2 + g() % 30;
    const unsigned q = 6 + static_cast<unsigned>(g() % 19);
    std::vector<double> w(k);
    double s = 0;
    for (auto& v : w) s += (v = (u(g) < 0.2 ? 0.0 : std::pow(u(g), 4)));
    if (s == 0) s += (w[0] = 1.0);
    for (auto& v : w) v /= s;
    double r = 0;
    for (double v : w) r += v;
    *std::max_element(w.begin(), w.end()) += 1 - r;
    const Pmf p(w);
    if (k > (std::size_t{1} << q)) continue;
    const auto m = quantize(p, q);
    const double total = static_cast<double>(m.total());
    std::uint64_t sum = 0;
    for (std::size_t x = 0; x < k; ++x) {
      sum += m.freq(static_cast<Symbol>(x));
      CHECK(std::abs(m.freq(static_cast<Symbol>(x)) / total - p[x]) <= std::ldexp(1.0, 1 - static_cast<int>(q)) * k);
      CHECK((p[x] > 0) == (m.freq(static_cast<Symbol>(x)) > 0));
    }
    CHECK(sum == m.total());
  }
}

TEST_CASE("round trip over random models") {
  CHECK(props::coder_round_trip(10000, 1) == 0);
}

TEST_CASE("empty sequence") {
  const auto q = quantize(Pmf::bernoulli(0.11));
  const Frame f = compress(std::vector<Symbol>{}, q);
  CHECK(f.symbol_count == 0);
  CHECK(f.payload.size() <= 64);
  CHECK(decompress(f, q).empty());
}

TEST_CASE("payload size for typical Bernoulli(0.11) input") {
  const auto q = quantize(Pmf::bernoulli(0.11));
  const auto s = exact_bernoulli(10000, 0.11, 4);
  CHECK(is_strongly_typical(s, Pmf::bernoulli(0.11), TypicalityParams{0.01}));
  const Frame f = compress(s, q);
  CHECK(f.payload.size() <= 5200);
  CHECK(decompress(f, q) == s);
}

TEST_CASE("rate bound h(0.11) + 0.02 on exact-frequency inputs") {
  const auto q = quantize(Pmf::bernoulli(0.11));
  const double bound = oracle::h(0.11) + 0.02;
  for (std::size_t m : {1000u, 10000u, 100000u}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto s = exact_bernoulli(m, 0.11, seed);
      const Frame f = compress(s, q);
      CHECK(static_cast<double>(f.payload.size()) / static_cast<double>(m) <= bound);
    }
  }
}

TEST_CASE("rate bound on i.i.d. inputs at m = 1e5") {
  const auto q = quantize(Pmf::bernoulli(0.11));
  std::mt19937_64 g(8);
  std::bernoulli_distribution bit(0.11);
  for (int t = 0; t < 10; ++t) {
    std::vector<Symbol> s(100000);
    for (auto& v : s) v = bit(g);
    if (!is_strongly_typical(s, Pmf::bernoulli(0.11), TypicalityParams{0.01})) continue;
    CHECK(compress(s, q).payload.size() / 1e5 <= oracle::h(0.11) + 0.02);
  }
}

TEST_CASE("coded length") {
  const auto q = quantize(Pmf::bernoulli(0.11));
  const Frame f0 = compress(std::vector<Symbol>{}, q);
  CHECK(coded_length(f0) == 8 + f0.payload.size());
  const auto s100 = exact_bernoulli(100, 0.11, 2);
  const Frame f100 = compress(s100, q);
  CHECK(coded_length(f100) == 8 + f100.payload.size());
  const auto s1e4 = exact_bernoulli(10000, 0.11, 2);
  const Frame f1e4 = compress(s1e4, q);
  CHECK(coded_length(f1e4) == 16 + f1e4.payload.size());
  CHECK(coded_length(f1e4) == Approx(5000 + 16).epsilon(0.01));
  CHECK(serialize(f1e4).size() * 8 == coded_length(f1e4));
}

TEST_CASE("every single-bit corruption is detected") {
  const auto q = quantize(Pmf::bernoulli(0.3));
  std::mt19937_64 g(99);
  std::vector<Symbol> s(100);
  for (auto& v : s) v = (g() % 10) < 3;
  const Frame f = compress(s, q);
  for (std::size_t i = 0; i < f.payload.size(); ++i) {
    std::vector<std::uint8_t> bytes(f.payload.bytes().begin(), f.payload.bytes().end());
    bytes[i / 8] ^= static_cast<std::uint8_t>(0x80u >> (i % 8));
    const Frame bad{f.symbol_count, BitString::from_bytes(bytes)};
    bool detected = false;
    try {
      detected = decompress(bad, q) != s;
    } catch (const FormatError&) {
      detected = true;
    }
    CHECK(detected);
  }
}

TEST_CASE("malformed frames") {
  const auto q = quantize(Pmf::bernoulli(0.3));
  std::vector<Symbol> s(500);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = (i * 7 % 10) < 3;
  const Frame f = compress(s, q);
  const auto bytes = f.payload.bytes();

  const Frame truncated{f.symbol_count, BitString::from_bytes(bytes.first(bytes.size() - 2))};
  CHECK_THROWS_AS((void)decompress(truncated, q), FormatError);

  const Frame miscounted{f.symbol_count - 50, f.payload};
  CHECK_THROWS_AS((void)decompress(miscounted, q), FormatError);

  std::vector<std::uint8_t> longer(bytes.begin(), bytes.end());
  longer.push_back(0);
  CHECK_THROWS_AS((void)decompress(Frame{f.symbol_count, BitString::from_bytes(longer)}, q), FormatError);

  CHECK_THROWS_AS((void)compress(std::vector<Symbol>{0, 1, 0}, quantize(Pmf::point_mass(2, 0))), ZeroProbability);
  CHECK_THROWS_AS((void)decode_frame(serialize(f), q, 499), FormatError);
}

TEST_CASE("frames are self-delimiting") {
  const auto q = quantize(Pmf({0.1, 0.2, 0.7}));
  std::mt19937_64 g(5);
  for (int t = 0; t < 200; ++t) {
    std::vector<Symbol> s(g() % 400);
    for (auto& v : s) v = static_cast<Symbol>(g() % 3);
    auto bytes = serialize(compress(s, q));
    const std::size_t len = bytes.size();
    for (int k = 0; k < 8; ++k) bytes.push_back(static_cast<std::uint8_t>(g()));
    const FrameDecode fd = decode_frame(bytes, q);
    CHECK(fd.symbols == s);
    CHECK(fd.bytes == len);
  }
}

TEST_CASE("varint") {
  for (std::uint64_t v : {0ull, 1ull, 127ull, 128ull, 300ull, 1ull << 35, ~0ull}) {
    std::vector<std::uint8_t> b;
    write_varint(b, v);
    const auto [got, used] = read_varint(b);
    CHECK(got == v);
    CHECK(used == b.size());
  }
  CHECK_THROWS_AS((void)read_varint(std::vector<std::uint8_t>{0x80, 0x80}), FormatError);
  CHECK_THROWS_AS((void)read_varint(std::vector<std::uint8_t>(10, 0xFF)), FormatError);
}

TEST_CASE("compression time is linear in length") {
  const auto q = quantize(Pmf::bernoulli(0.11));
  const auto a = exact_bernoulli(1000000, 0.11, 1);
  const auto b = exact_bernoulli(2000000, 0.11, 1);
  const double ta = seconds_to_compress(a, q);
  const double tb = seconds_to_compress(b, q);
  MESSAGE("m=1e6: " << ta << " s, m=2e6: " << tb << " s");
  CHECK(tb <= 2.5 * ta);
}
