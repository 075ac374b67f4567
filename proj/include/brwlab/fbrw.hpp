#pragma once

// Condition (c) for an induced BRW to be an F-BRW: quotient row sums
// sum_{w: g(w) = y} p_U(x, w) depend only on (g(x), y). Checked on a finite
// ball; a pass means "F-BRW up to radius r".

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "brwlab/kernel.hpp"
#include "brwlab/spectral.hpp"

namespace brw {

class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// g : vertices -> {0, ..., type_count - 1}. A label of -1 means "unknown"
/// (outside the region where an automatically built map is defined).
struct ProjectionMap {
  std::string name;
  std::function<int(const VertexId&)> label;
  int type_count = 1;
};

ProjectionMap constant_projection();

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

struct ProjectionWitness {
  VertexId x, x2;
  int type = 0;
  int target_type = 0;
  double value_x = 0.0, value_x2 = 0.0;
};

struct ProjectionCheck {
  Verdict verdict = Verdict::inconclusive;
  /// Radius actually covered; smaller than requested when the ball hit the
  /// vertex budget.
  int radius = 0;
  std::size_t vertices_checked = 0;
  std::vector<int> labels_seen;
  std::optional<ProjectionWitness> witness;
  std::string note;
  /// Quotient mean matrix; filled on pass.
  Eigen::MatrixXd quotient;
};

/// Explores the pU-ball of `ball_radius` around `base` and compares the
/// quotient rows of all its vertices. Exploration stops at the level where
/// the ball first exceeds `max_vertices`.
ProjectionCheck check_projection(const TransitionKernel& pU, const ProjectionMap& g, const VertexId& base,
                                 int ball_radius, std::size_t max_vertices = 1'000'000);

/// Q̄[g(x), y]; throws ContractError unless check_projection passes.
Eigen::MatrixXd quotient_kernel(const TransitionKernel& pU, const ProjectionMap& g, const VertexId& base,
                                int ball_radius, std::size_t max_vertices = 1'000'000);

/// Coarsest partition of the ball stable under quotient-row signatures
/// (probabilities rounded to 1e-12), labelled in BFS order. Defined on the
/// ball of radius `ball_radius + 1`; -1 elsewhere.
ProjectionMap refine_projection(const TransitionKernel& pU, const VertexId& base, int ball_radius,
                                int max_rounds = 8, std::size_t max_vertices = 1'000'000);

/// Perron root of a nonnegative quotient matrix.
double perron_root(const Eigen::MatrixXd& q);
/// Global-persistence threshold of the finite-type process: 1 / Perron root.
double quotient_m1(const Eigen::MatrixXd& q);

struct ThresholdEstimate {
  double value = 0.0;
  int depth = 0;
  std::optional<int> underflow_depth;
};

/// 1 / (extrapolated liminf of (sum_y p_U^{(n)}(x, y))^{1/n}).
ThresholdEstimate m1_threshold(const TransitionKernel& pU, const VertexId& x, int n_max);

enum class Regime { global_extinction, global_not_local, local_possible };
std::string to_string(Regime r);

struct RegimeLabel {
  Regime regime = Regime::global_extinction;
  double m = 0.0;
  double m1 = 0.0;       // φ_U / ρ_U
  double inv_rho = 0.0;  // 1 / ρ_U
};

/// m <= φ_U/ρ_U: global extinction; φ_U/ρ_U < m <= 1/ρ_U: global but not
/// local persistence; m > 1/ρ_U: local persistence possible. Rejects m <= 1.
RegimeLabel classify_regime(double m, const SpectralSummary& summary);

}  // namespace brw
