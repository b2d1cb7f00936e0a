#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "ffsc/model.hpp"

namespace ffsc {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kInfSlope = std::numeric_limits<double>::infinity();

struct Dims {
  std::size_t rows;
  std::size_t cols;
};

Dims check_dims(const Pmf& prior, const DistortionMatrix& d) {
  if (prior.size() != d.rows()) {
    throw InvalidArgument("blahut_arimoto: prior size does not match distortion rows");
  }
  return {d.rows(), d.cols()};
}

std::vector<double> row_minima(const DistortionMatrix& d) {
  std::vector<double> m(d.rows(), std::numeric_limits<double>::infinity());
  for (std::size_t x = 0; x < d.rows(); ++x) {
    for (std::size_t y = 0; y < d.cols(); ++y) m[x] = std::min(m[x], d(x, y));
  }
  return m;
}

TestChannel normalized_channel(std::vector<std::vector<double>> rows) {
  for (auto& r : rows) {
    const double s = std::accumulate(r.begin(), r.end(), 0.0);
    for (double& v : r) v = std::clamp(v / s, 0.0, 1.0);
  }
  return TestChannel(rows);
}

// One fixed-slope solve. `weight(x, y)` is exp(-beta (d - dmin_x)) or, at
// infinite slope, the indicator of a distortion-minimizing cell.
template <class Weight>
RdPoint solve_fixed_slope(const Pmf& prior, const DistortionMatrix& d, double beta, Weight weight,
                          const RdOptions& opt) {
  const auto [rows, cols] = check_dims(prior, d);
  std::vector<double> w(rows * cols);
  for (std::size_t x = 0; x < rows; ++x) {
    for (std::size_t y = 0; y < cols; ++y) w[x * cols + y] = weight(x, y);
  }
  std::vector<double> q(cols, 1.0 / static_cast<double>(cols));
  std::vector<double> z(rows);
  std::vector<double> c(cols);

  auto channel_rows = [&] {
    std::vector<std::vector<double>> ch(rows, std::vector<double>(cols));
    for (std::size_t x = 0; x < rows; ++x) {
      double zx = 0.0;
      for (std::size_t y = 0; y < cols; ++y) zx += q[y] * w[x * cols + y];
      if (zx <= 0.0) {
        // q vanished on every admissible cell of this row; fall back to the weights alone.
        for (std::size_t y = 0; y < cols; ++y) ch[x][y] = w[x * cols + y];
      } else {
        for (std::size_t y = 0; y < cols; ++y) ch[x][y] = q[y] * w[x * cols + y] / zx;
      }
    }
    return ch;
  };
  auto finish = [&](std::size_t iter) {
    TestChannel ch = normalized_channel(channel_rows());
    const double rate = mutual_information(prior, ch);
    const double dist = expected_distortion(prior, ch, d);
    return RdPoint{std::move(ch), rate, dist, beta, iter};
  };

  for (std::size_t iter = 1; iter <= opt.max_iter; ++iter) {
    for (std::size_t x = 0; x < rows; ++x) {
      double zx = 0.0;
      for (std::size_t y = 0; y < cols; ++y) zx += q[y] * w[x * cols + y];
      z[x] = zx;
    }
    std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t x = 0; x < rows; ++x) {
      if (prior[x] == 0.0) continue;
      if (z[x] <= 0.0) throw InvalidArgument("blahut_arimoto: row with no admissible reconstruction");
      const double scale = prior[x] / z[x];
      for (std::size_t y = 0; y < cols; ++y) c[y] += scale * w[x * cols + y];
    }
    // Gap between the upper and lower bounds on the slope functional:
    // log max c - sum q' log c, with q' = q c.
    double max_log_c = -std::numeric_limits<double>::infinity();
    double avg_log_c = 0.0;
    for (std::size_t y = 0; y < cols; ++y) {
      const double qn = q[y] * c[y];
      if (c[y] > 0.0) {
        max_log_c = std::max(max_log_c, std::log(c[y]));
        if (qn > 0.0) avg_log_c += qn * std::log(c[y]);
      }
      q[y] = qn;
    }
    const double qs = std::accumulate(q.begin(), q.end(), 0.0);
    for (double& v : q) v /= qs;
    if ((max_log_c - avg_log_c) / kLn2 < opt.tol) return finish(iter);
  }
  throw ConvergenceError("blahut_arimoto: no convergence within max_iter", finish(opt.max_iter));
}

RdPoint solve_slope(const Pmf& prior, const DistortionMatrix& d, const std::vector<double>& dmin,
                    double beta, const RdOptions& opt) {
  return solve_fixed_slope(
      prior, d, beta, [&](std::size_t x, std::size_t y) { return std::exp(-beta * (d(x, y) - dmin[x])); },
      opt);
}

RdPoint solve_infinite_slope(const Pmf& prior, const DistortionMatrix& d,
                             const std::vector<double>& dmin, const RdOptions& opt) {
  return solve_fixed_slope(
      prior, d, kInfSlope,
      [&](std::size_t x, std::size_t y) { return d(x, y) <= dmin[x] ? 1.0 : 0.0; }, opt);
}

RdPoint zero_rate_point(const Pmf& prior, const DistortionMatrix& d) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t y = 0; y < d.cols(); ++y) {
    double acc = 0.0;
    for (std::size_t x = 0; x < d.rows(); ++x) acc += prior[x] * d(x, y);
    if (acc < best_d) {
      best_d = acc;
      best = y;
    }
  }
  TestChannel ch = TestChannel::independent(d.rows(), Pmf::point_mass(d.cols(), static_cast<Symbol>(best)));
  return RdPoint{std::move(ch), 0.0, best_d, 0.0, 0};
}

// Time-share two solutions bracketing target_d. D is linear in the channel and I is
// convex, so on a straight segment of R(D) the mixture is optimal.
RdPoint mix(const Pmf& prior, const DistortionMatrix& d, const RdPoint& lo, const RdPoint& hi,
            double target_d) {
  const double span = lo.distortion - hi.distortion;
  const double lambda = span > 0.0 ? std::clamp((target_d - hi.distortion) / span, 0.0, 1.0) : 0.0;
  std::vector<std::vector<double>> rows(d.rows(), std::vector<double>(d.cols()));
  for (std::size_t x = 0; x < d.rows(); ++x) {
    for (std::size_t y = 0; y < d.cols(); ++y) {
      rows[x][y] = lambda * lo.channel(x, y) + (1.0 - lambda) * hi.channel(x, y);
    }
  }
  TestChannel ch = normalized_channel(std::move(rows));
  const double rate = mutual_information(prior, ch);
  const double dist = expected_distortion(prior, ch, d);
  return RdPoint{std::move(ch), rate, dist, std::sqrt(lo.slope * hi.slope),
                 lo.iterations + hi.iterations};
}

}  // namespace

double min_distortion(const Pmf& prior, const DistortionMatrix& d) {
  check_dims(prior, d);
  const auto m = row_minima(d);
  double acc = 0.0;
  for (std::size_t x = 0; x < d.rows(); ++x) acc += prior[x] * m[x];
  return acc;
}

double zero_rate_distortion(const Pmf& prior, const DistortionMatrix& d) {
  check_dims(prior, d);
  return zero_rate_point(prior, d).distortion;
}

RdPoint blahut_arimoto(const Pmf& prior, const DistortionMatrix& d, double target_d,
                       const RdOptions& opt) {
  check_dims(prior, d);
  if (!(target_d >= 0.0) || target_d > d.d_max()) {
    throw InvalidArgument("blahut_arimoto: target distortion must lie in [0, d_max]");
  }
  const auto dmin = row_minima(d);
  const double d_floor = min_distortion(prior, d);
  RdPoint zero = zero_rate_point(prior, d);
  if (target_d >= zero.distortion) return zero;
  if (target_d <= d_floor + opt.tol) return solve_infinite_slope(prior, d, dmin, opt);

  // D(beta) is non-increasing in beta. Bracket target_d, then bisect on log(beta).
  double beta_hi = 1.0;
  std::optional<RdPoint> hi;
  for (int i = 0; i < 200; ++i) {
    RdPoint p = solve_slope(prior, d, dmin, beta_hi, opt);
    if (p.distortion <= target_d) {
      hi = std::move(p);
      break;
    }
    beta_hi *= 2.0;
  }
  // Small slopes near a tie between zero-rate reconstructions converge sublinearly.
  // Such probes count as lying above target_d and the zero-rate point stands in for them.
  double beta_lo = beta_hi / 2.0;
  std::optional<RdPoint> lo;
  for (int i = 0; i < 200; ++i) {
    try {
      RdPoint p = solve_slope(prior, d, dmin, beta_lo, opt);
      if (p.distortion >= target_d) {
        lo = std::move(p);
        break;
      }
    } catch (const ConvergenceError&) {
      break;
    }
    beta_lo /= 2.0;
  }
  if (!hi) hi = solve_infinite_slope(prior, d, dmin, opt);
  if (!lo) lo = zero;

  for (int i = 0; i < 400; ++i) {
    if (std::abs(hi->distortion - target_d) <= opt.tol) return *hi;
    if (std::abs(lo->distortion - target_d) <= opt.tol) return *lo;
    if (!(beta_hi / beta_lo - 1.0 > 1e-15)) break;
    const double mid = std::sqrt(beta_lo * beta_hi);
    std::optional<RdPoint> probe;
    try {
      probe = solve_slope(prior, d, dmin, mid, opt);
    } catch (const ConvergenceError&) {
      beta_lo = mid;
      continue;
    }
    RdPoint& p = *probe;
    if (p.distortion > target_d) {
      beta_lo = mid;
      lo = std::move(p);
    } else {
      beta_hi = mid;
      hi = std::move(p);
    }
  }
  return mix(prior, d, *lo, *hi, target_d);
}

}  // namespace ffsc
