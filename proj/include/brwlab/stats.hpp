#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace brw {

using Rng = std::mt19937_64;

/// Independent stream for trial `trial` of an experiment seeded with
/// `master`: mt19937_64 seeded through seed_seq{master lo/hi, trial lo/hi}.
Rng trial_rng(std::uint64_t master, std::uint64_t trial);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least-squares line y ≈ intercept + slope * x.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return lo <= v && v <= hi; }
};

/// Wilson score interval for a binomial proportion (95% by default).
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054);

/// Sample mean with standard error and a normal 95% interval.
struct MeanEstimate {
  std::uint64_t n = 0;
  double mean = 0.0;
  double std_error = 0.0;
  Interval ci;
};

MeanEstimate mean_estimate(const std::vector<double>& samples, double z = 1.959963984540054);

/// Empirical quantile (linear interpolation); `samples` need not be sorted.
double quantile(std::vector<double> samples, double q);

// Count samplers. Counts are doubles so populations may exceed 2^63;
// beyond kExactCountLimit a moment-matched normal is used.
inline constexpr double kExactCountLimit = 1e12;

double sample_binomial(Rng& rng, double n, double p);
/// Sum of `k` independent geometric variables with P(j) = (1-p)^j p.
double sample_negative_binomial(Rng& rng, double k, double p);

}  // namespace brw
