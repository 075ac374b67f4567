#pragma once

// Spectral radii, stay probabilities and Green-function partial sums, all
// computed by exact sparse DP (log domain) on explored balls.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "brwlab/chain.hpp"
#include "brwlab/kernel.hpp"

namespace brw {

class PeriodError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TransitivityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// gcd of the return times n <= depth with p^{(n)}(x,x) > 0.
int detect_period(const TransitionKernel& kernel, const VertexId& x, int depth = 50);

struct RadiusEstimate {
  double value = 0.0;
  int period = 1;
  int depth = 0;
  bool lumped = false;
};

/// exp of the slope of log p^{(kd)}(x,x) against kd, fitted over the top half
/// of the multiples of the period d up to n_max.
RadiusEstimate spectral_radius_estimate(const TransitionKernel& kernel, const VertexId& x, int n_max);

/// Same estimator applied to a precomputed log series (index = step count).
double radius_from_log_series(const std::vector<double>& log_values, int period);

/// P_x(E_N) = sum_y p_U^{(N)}(x, y).
double stay_prob(const TransitionKernel& P, const SubgraphSpec& U, const VertexId& x, int N);

struct ZetaEstimate {
  double value = 0.0;
  int depth = 0;
  /// First N with P_x(E_N) = 0, when the stay probability dies out.
  std::optional<int> underflow_depth;
};

/// Extrapolated limit of P_x(E_N)^{1/N} (log-linear fit over the top half).
ZetaEstimate zeta_estimate(const TransitionKernel& P, const SubgraphSpec& U, const VertexId& x, int N_max);
ZetaEstimate growth_from_log_mass(const std::vector<double>& log_mass);

/// sum_{j<=J} p^{(j)}(x,y) z^j.
double green_partial(const TransitionKernel& kernel, const VertexId& x, const VertexId& y, double z, int J);

struct IdentityCheck {
  double max_abs = 0.0;
  double max_rel = 0.0;
  int worst_j = 0;
};

/// max_{j<=J} |q_U^{(j)}(x,y) - p_U^{(j)}(x,y)/zeta^j| with its relative
/// counterpart. Rows of pU met within radius J must share one sum δ, else
/// TransitivityError.
IdentityCheck kernel_identity_check(const TransitionKernel& pU, const TransitionKernel& qU, double zeta,
                                    const VertexId& x, const VertexId& y, int J);

enum class EstimateMethod { closed_form, dp_extrapolation };
std::string to_string(EstimateMethod m);

struct SpectralSummary {
  double rho_U = 0.0;
  double phi_U = 0.0;
  double zeta = 0.0;
  double m1 = 0.0;
  int period = 1;
  int depth = 0;
  EstimateMethod method = EstimateMethod::dp_extrapolation;
};

SpectralSummary make_summary(double rho_U, double phi_U, int period, int depth, EstimateMethod method);

/// DP estimates of ρ_U (from P_U) and φ_U (from Q_U) at base vertex x.
SpectralSummary summarize_subgraph(const TransitionKernel& P, const SubgraphSpec& U, const VertexId& x,
                                   int depth);

}  // namespace brw
