#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ffsc/error.hpp"

namespace ffsc {

/// Source and reconstruction symbols are small unsigned integers 0..size-1.
using Symbol = std::uint16_t;

inline constexpr std::size_t kMaxAlphabet = std::size_t{1} << 16;

class Alphabet {
 public:
  explicit Alphabet(std::size_t size);

  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] bool contains(std::size_t s) const noexcept { return s < size_; }

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  std::size_t size_;
};

/// Probability mass function over an alphabet. Sums to one within 1e-12.
class Pmf {
 public:
  explicit Pmf(std::vector<double> probs);

  static Pmf uniform(std::size_t size);
  static Pmf bernoulli(double p_one);
  static Pmf point_mass(std::size_t size, Symbol at);

  [[nodiscard]] Alphabet alphabet() const noexcept { return Alphabet{probs_.size()}; }
  [[nodiscard]] std::size_t size() const noexcept { return probs_.size(); }
  [[nodiscard]] double operator[](std::size_t s) const { return probs_[s]; }
  [[nodiscard]] std::span<const double> probs() const noexcept { return probs_; }

 private:
  std::vector<double> probs_;
};

/// Conditional distribution p(xhat | x): one Pmf over the output alphabet per input symbol.
class TestChannel {
 public:
  explicit TestChannel(std::vector<Pmf> rows);
  /// Row-major convenience constructor; rows.size() == input size.
  explicit TestChannel(const std::vector<std::vector<double>>& rows);

  static TestChannel binary_symmetric(double crossover);
  static TestChannel identity(std::size_t size);
  /// Every row equal to `output`, i.e. xhat independent of x.
  static TestChannel independent(std::size_t input_size, const Pmf& output);

  [[nodiscard]] Alphabet input_alphabet() const noexcept { return Alphabet{rows_.size()}; }
  [[nodiscard]] Alphabet output_alphabet() const noexcept { return Alphabet{rows_.front().size()}; }
  [[nodiscard]] std::size_t input_size() const noexcept { return rows_.size(); }
  [[nodiscard]] std::size_t output_size() const noexcept { return rows_.front().size(); }
  [[nodiscard]] const Pmf& row(std::size_t x) const { return rows_.at(x); }
  [[nodiscard]] double operator()(std::size_t x, std::size_t xhat) const { return rows_[x][xhat]; }

  /// Output marginal sum_x prior(x) p(xhat|x).
  [[nodiscard]] Pmf marginal(const Pmf& prior) const;

 private:
  std::vector<Pmf> rows_;
};

/// Distortion table d(x, xhat), rows indexed by source symbol, columns by reconstruction.
class DistortionMatrix {
 public:
  explicit DistortionMatrix(std::vector<std::vector<double>> entries);

  static DistortionMatrix hamming(std::size_t size);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] double d_max() const noexcept { return d_max_; }
  [[nodiscard]] double operator()(std::size_t x, std::size_t xhat) const {
    return entries_[x * cols_ + xhat];
  }

 private:
  std::vector<double> entries_;
  std::size_t rows_;
  std::size_t cols_;
  double d_max_;
};

struct TypicalityParams {
  explicit TypicalityParams(double delta);
  double delta;
};

/// Binary entropy h(p) in bits.
[[nodiscard]] double binary_entropy(double p);

[[nodiscard]] double entropy(const Pmf& p);
[[nodiscard]] double conditional_entropy(const TestChannel& ch, const Pmf& prior);
[[nodiscard]] double mutual_information(const Pmf& prior, const TestChannel& ch);
[[nodiscard]] double expected_distortion(const Pmf& prior, const TestChannel& ch,
                                         const DistortionMatrix& d);

/// H(xhat) / H(xhat|x): the ratio by which consecutive encoder blocks grow.
/// Throws InvalidArgument for a deterministic channel (H(xhat|x) = 0).
[[nodiscard]] double growth_factor(const Pmf& prior, const TestChannel& ch);

/// Every empirical frequency within delta of p, and no zero-probability symbol present.
/// An empty sequence is not typical.
[[nodiscard]] bool is_strongly_typical(std::span<const Symbol> seq, const Pmf& p,
                                       const TypicalityParams& params);

/// Strong typicality of the pair sequence against p(x) p(xhat|x).
[[nodiscard]] bool is_jointly_typical(std::span<const Symbol> x, std::span<const Symbol> xhat,
                                      const Pmf& prior, const TestChannel& ch,
                                      const TypicalityParams& params);

// Rate-distortion solver.

struct RdOptions {
  double tol = 1e-9;
  std::size_t max_iter = 10000;
};

struct RdPoint {
  TestChannel channel;
  double rate;         // bits/symbol
  double distortion;
  double slope;        // Lagrange multiplier (nats per unit distortion); infinite at D_min
  std::size_t iterations;
};

/// Thrown when an inner iteration fails to converge; carries the last iterate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, RdPoint last) : Error(what), last_(std::move(last)) {}
  [[nodiscard]] const RdPoint& last() const noexcept { return last_; }

 private:
  RdPoint last_;
};

/// Smallest achievable distortion: sum_x p(x) min_xhat d(x, xhat).
[[nodiscard]] double min_distortion(const Pmf& prior, const DistortionMatrix& d);
/// Distortion of the best constant reconstruction: min_xhat sum_x p(x) d(x, xhat).
[[nodiscard]] double zero_rate_distortion(const Pmf& prior, const DistortionMatrix& d);

/// R(D) and an achieving test channel, via Blahut-Arimoto in the slope parameterization
/// with bisection on the slope to meet target_d.
[[nodiscard]] RdPoint blahut_arimoto(const Pmf& prior, const DistortionMatrix& d, double target_d,
                                     const RdOptions& options = {});

}  // namespace ffsc
