#include "ffsc/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ffsc {

namespace {

constexpr double kSumTolerance = 1e-12;

double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

void require_same(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw InvalidArgument(std::string(what) + ": alphabet mismatch (" + std::to_string(a) +
                          " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

Alphabet::Alphabet(std::size_t size) : size_(size) {
  if (size == 0 || size > kMaxAlphabet) {
    throw InvalidArgument("alphabet size must be in [1, 65536], got " + std::to_string(size));
  }
}

Pmf::Pmf(std::vector<double> probs) : probs_(std::move(probs)) {
  Alphabet{probs_.size()};
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || p > 1.0) throw InvalidArgument("pmf entry outside [0,1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw InvalidArgument("pmf does not sum to 1 (sum = " + std::to_string(sum) + ")");
  }
}

Pmf Pmf::uniform(std::size_t size) {
  Alphabet{size};
  return Pmf(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

Pmf Pmf::bernoulli(double p_one) { return Pmf({1.0 - p_one, p_one}); }

Pmf Pmf::point_mass(std::size_t size, Symbol at) {
  std::vector<double> probs(size, 0.0);
  probs.at(at) = 1.0;
  return Pmf(std::move(probs));
}

TestChannel::TestChannel(std::vector<Pmf> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw InvalidArgument("test channel needs at least one row");
  Alphabet{rows_.size()};
  for (const auto& r : rows_) require_same(r.size(), rows_.front().size(), "test channel row");
}

TestChannel::TestChannel(const std::vector<std::vector<double>>& rows)
    : TestChannel([&] {
        std::vector<Pmf> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.emplace_back(r);
        return out;
      }()) {}

TestChannel TestChannel::binary_symmetric(double crossover) {
  return TestChannel(std::vector<Pmf>{Pmf({1.0 - crossover, crossover}),
                                      Pmf({crossover, 1.0 - crossover})});
}

TestChannel TestChannel::identity(std::size_t size) {
  std::vector<Pmf> rows;
  rows.reserve(size);
  for (std::size_t x = 0; x < size; ++x) rows.push_back(Pmf::point_mass(size, static_cast<Symbol>(x)));
  return TestChannel(std::move(rows));
}

TestChannel TestChannel::independent(std::size_t input_size, const Pmf& output) {
  return TestChannel(std::vector<Pmf>(input_size, output));
}

Pmf TestChannel::marginal(const Pmf& prior) const {
  require_same(prior.size(), input_size(), "marginal");
  std::vector<double> out(output_size(), 0.0);
  for (std::size_t x = 0; x < input_size(); ++x) {
    const double px = prior[x];
    if (px == 0.0) continue;
    for (std::size_t y = 0; y < output_size(); ++y) out[y] += px * rows_[x][y];
  }
  // Rounding can push the sum a few ulps away from one.
  const double sum = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& v : out) v = std::clamp(v / sum, 0.0, 1.0);
  return Pmf(std::move(out));
}

DistortionMatrix::DistortionMatrix(std::vector<std::vector<double>> entries)
    : rows_(entries.size()), cols_(entries.empty() ? 0 : entries.front().size()), d_max_(0.0) {
  if (rows_ == 0 || cols_ == 0) throw InvalidArgument("distortion matrix must be non-empty");
  Alphabet{rows_};
  Alphabet{cols_};
  entries_.reserve(rows_ * cols_);
  for (const auto& row : entries) {
    require_same(row.size(), cols_, "distortion row");
    for (double v : row) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw InvalidArgument("distortion entries must be finite and non-negative");
      }
      d_max_ = std::max(d_max_, v);
      entries_.push_back(v);
    }
  }
}

DistortionMatrix DistortionMatrix::hamming(std::size_t size) {
  std::vector<std::vector<double>> e(size, std::vector<double>(size, 1.0));
  for (std::size_t i = 0; i < size; ++i) e[i][i] = 0.0;
  return DistortionMatrix(std::move(e));
}

TypicalityParams::TypicalityParams(double d) : delta(d) {
  if (!(d > 0.0 && d < 1.0)) throw InvalidArgument("typicality delta must lie in (0, 1)");
}

double binary_entropy(double p) { return -plogp(p) - plogp(1.0 - p); }

double entropy(const Pmf& p) {
  double h = 0.0;
  for (double v : p.probs()) h -= plogp(v);
  return std::max(h, 0.0);
}

double conditional_entropy(const TestChannel& ch, const Pmf& prior) {
  require_same(prior.size(), ch.input_size(), "conditional_entropy");
  double h = 0.0;
  for (std::size_t x = 0; x < ch.input_size(); ++x) {
    if (prior[x] > 0.0) h += prior[x] * entropy(ch.row(x));
  }
  return h;
}

double mutual_information(const Pmf& prior, const TestChannel& ch) {
  require_same(prior.size(), ch.input_size(), "mutual_information");
  // Direct sum over the joint rather than H(xhat) - H(xhat|x), so the entropy
  // identity stays an independent check.
  const Pmf q = ch.marginal(prior);
  double info = 0.0;
  for (std::size_t x = 0; x < ch.input_size(); ++x) {
    if (prior[x] == 0.0) continue;
    for (std::size_t y = 0; y < ch.output_size(); ++y) {
      const double pyx = ch(x, y);
      if (pyx > 0.0) info += prior[x] * pyx * std::log2(pyx / q[y]);
    }
  }
  return std::max(info, 0.0);
}

double expected_distortion(const Pmf& prior, const TestChannel& ch, const DistortionMatrix& d) {
  require_same(prior.size(), ch.input_size(), "expected_distortion");
  require_same(d.rows(), ch.input_size(), "expected_distortion rows");
  require_same(d.cols(), ch.output_size(), "expected_distortion cols");
  double acc = 0.0;
  for (std::size_t x = 0; x < ch.input_size(); ++x) {
    if (prior[x] == 0.0) continue;
    for (std::size_t y = 0; y < ch.output_size(); ++y) acc += prior[x] * ch(x, y) * d(x, y);
  }
  return acc;
}

double growth_factor(const Pmf& prior, const TestChannel& ch) {
  const double hc = conditional_entropy(ch, prior);
  if (hc <= 1e-15) {
    throw InvalidArgument("infinite growth factor: test channel is deterministic (H(xhat|x) = 0)");
  }
  return entropy(ch.marginal(prior)) / hc;
}

bool is_strongly_typical(std::span<const Symbol> seq, const Pmf& p,
                         const TypicalityParams& params) {
  if (seq.empty()) return false;
  std::vector<std::size_t> counts(p.size(), 0);
  for (Symbol s : seq) {
    if (s >= p.size() || p[s] == 0.0) return false;
    ++counts[s];
  }
  const double n = static_cast<double>(seq.size());
  for (std::size_t a = 0; a < p.size(); ++a) {
    if (std::abs(static_cast<double>(counts[a]) / n - p[a]) > params.delta) return false;
  }
  return true;
}

bool is_jointly_typical(std::span<const Symbol> x, std::span<const Symbol> xhat, const Pmf& prior,
                        const TestChannel& ch, const TypicalityParams& params) {
  if (x.size() != xhat.size()) throw InvalidArgument("is_jointly_typical: length mismatch");
  require_same(prior.size(), ch.input_size(), "is_jointly_typical");
  const std::size_t cols = ch.output_size();
  std::vector<double> joint(prior.size() * cols);
  for (std::size_t a = 0; a < prior.size(); ++a) {
    for (std::size_t b = 0; b < cols; ++b) joint[a * cols + b] = prior[a] * ch(a, b);
  }
  std::vector<Symbol> pairs;
  pairs.reserve(x.size());
  if (joint.size() > kMaxAlphabet) throw InvalidArgument("joint alphabet too large");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] >= prior.size() || xhat[i] >= cols) return false;
    pairs.push_back(static_cast<Symbol>(x[i] * cols + xhat[i]));
  }
  // The joint may not sum to exactly one after the products; renormalize.
  const double sum = std::accumulate(joint.begin(), joint.end(), 0.0);
  for (double& v : joint) v = std::clamp(v / sum, 0.0, 1.0);
  return is_strongly_typical(pairs, Pmf(std::move(joint)), params);
}

}  // namespace ffsc
