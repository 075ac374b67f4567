#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "brwlab/stats.hpp"

namespace brw {

enum class LawKind { explicit_pmf, point_mass, edge_breeding, geometric, power_log_tail };

/// Offspring distribution ν on {0, 1, 2, ...}.
class OffspringLaw {
 public:
  /// Finite-support pmf; entries must be >= 0 and sum to 1 within 1e-12.
  static OffspringLaw from_pmf(std::vector<double> pmf);
  static OffspringLaw point_mass(std::uint32_t k);
  /// P(n) = (λd)^n / (1+λd)^{n+1}; mean λd.
  static OffspringLaw edge_breeding(double lambda, std::uint32_t degree);
  /// The same geometric family parametrized by its mean.
  static OffspringLaw geometric_with_mean(double m);
  /// ν(n) ∝ n^{-a} (log n)^{-b} for n >= 2. Needs a finite mean.
  static OffspringLaw power_log_tail(double a, double b);

  LawKind kind() const { return kind_; }
  double pmf(std::uint64_t n) const;
  double mean() const { return mean_; }
  bool is_supercritical() const { return mean_ > 1.0; }
  std::string describe() const;

  std::uint64_t sample(Rng& rng) const;
  /// Total offspring of `count` independent particles.
  double sample_total(Rng& rng, double count) const;

  /// Geometric parameter r (= λd); only for edge_breeding / geometric.
  double ratio() const { return r_; }
  double tail_a() const { return a_; }
  double tail_b() const { return b_; }
  const std::vector<double>& atoms() const { return pmf_; }

 private:
  OffspringLaw() = default;
  void build_power_table();

  LawKind kind_ = LawKind::point_mass;
  std::vector<double> pmf_;  // explicit / point mass
  double r_ = 0.0;           // geometric ratio
  double a_ = 0.0, b_ = 0.0, log_norm_ = 0.0;
  double mean_ = 0.0;
  std::string label_;
  // Inverse-CDF table for the power-log law; the tail beyond it is drawn from
  // a Pareto with the same power exponent.
  std::shared_ptr<const std::vector<double>> cdf_;
};

enum class MomentStatus { finite, infinite, indeterminate };
std::string to_string(MomentStatus s);

struct MomentCheck {
  MomentStatus status = MomentStatus::finite;
  double partial_sum = 0.0;
  double tail_bound = 0.0;
  std::uint64_t truncation = 0;
};

/// E[L^2 log L] = sum_N ν(N) N^2 log N: partial sum up to `truncation`
/// (extended as needed for geometric tails to get a tail bound < 1e-9) and
/// the tail bound or divergence verdict.
MomentCheck l2logl_check(const OffspringLaw& law, std::uint64_t truncation = 1000);

}  // namespace brw
