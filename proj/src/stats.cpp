#include "brwlab/stats.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace brw {

Rng trial_rng(std::uint64_t master, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return Rng(seq);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line needs >= 2 paired points");
  const auto n = static_cast<Eigen::Index>(x.size());
  // Centre the abscissa so the normal equations stay well conditioned.
  const double xbar = Eigen::Map<const Eigen::VectorXd>(x.data(), n).mean();
  Eigen::MatrixXd A(n, 2);
  A.col(0).setOnes();
  A.col(1) = Eigen::Map<const Eigen::VectorXd>(x.data(), n).array() - xbar;
  const Eigen::Vector2d c = A.colPivHouseholderQr().solve(Eigen::Map<const Eigen::VectorXd>(y.data(), n));
  return {c(1), c(0) - c(1) * xbar};
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  return {successes == 0 ? 0.0 : std::max(0.0, centre - half), successes == trials ? 1.0 : std::min(1.0, centre + half)};
}

MeanEstimate mean_estimate(const std::vector<double>& samples, double z) {
  MeanEstimate e;
  e.n = samples.size();
  if (samples.empty()) return e;
  double mean = 0.0, m2 = 0.0;
  std::uint64_t k = 0;
  for (double s : samples) {
    ++k;
    const double d = s - mean;
    mean += d / static_cast<double>(k);
    m2 += d * (s - mean);
  }
  e.mean = mean;
  e.std_error = e.n > 1 ? std::sqrt(m2 / static_cast<double>(e.n - 1) / static_cast<double>(e.n)) : 0.0;
  e.ci = {mean - z * e.std_error, mean + z * e.std_error};
  return e;
}

double quantile(std::vector<double> samples, double q) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const double pos = q * static_cast<double>(samples.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, samples.size() - 1);
  return samples[lo] + (pos - static_cast<double>(lo)) * (samples[hi] - samples[lo]);
}

namespace {

double clamped_normal(Rng& rng, double mean, double var, double hi) {
  std::normal_distribution<double> nd(mean, std::sqrt(std::max(var, 0.0)));
  return std::clamp(std::round(nd(rng)), 0.0, hi);
}

}  // namespace

double sample_binomial(Rng& rng, double n, double p) {
  if (n <= 0.0 || p <= 0.0) return 0.0;
  if (p >= 1.0) return n;
  if (n <= kExactCountLimit) {
    std::binomial_distribution<long long> bd(static_cast<long long>(n), p);
    return static_cast<double>(bd(rng));
  }
  return clamped_normal(rng, n * p, n * p * (1 - p), n);
}

double sample_negative_binomial(Rng& rng, double k, double p) {
  if (k <= 0.0) return 0.0;
  if (p >= 1.0) return 0.0;
  if (p <= 0.0) throw std::invalid_argument("negative binomial needs p > 0");
  if (k <= kExactCountLimit) {
    std::negative_binomial_distribution<long long> nb(static_cast<long long>(k), p);
    return static_cast<double>(nb(rng));
  }
  const double mean = k * (1 - p) / p;
  return clamped_normal(rng, mean, mean / p, std::numeric_limits<double>::max());
}

}  // namespace brw
