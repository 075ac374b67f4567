#pragma once

// Cartesian products of two homogeneous trees and free products of two
// groups (finite cyclic or free of finite rank).

#include <cstdint>
#include <string>
#include <vector>

#include "brwlab/kernel.hpp"
#include "brwlab/spectral.hpp"

namespace brw {

// --- Cartesian products -------------------------------------------------------

/// P = α₁ P₁ ⊗ I₂ + α₂ I₁ ⊗ P₂ with P_i the SRW on T_{d_i}.
struct ProductSpec {
  std::uint32_t d1 = 3, d2 = 100;
  double alpha1 = 3.0 / 103.0, alpha2 = 100.0 / 103.0;

  void validate() const;
  std::uint32_t degree(int fiber) const { return fiber == 1 ? d1 : d2; }
  double alpha(int fiber) const { return fiber == 1 ? alpha1 : alpha2; }
};

TransitionKernel product_kernel(const ProductSpec& spec);
/// Key packing the two tree distances to the start vertex.
std::int64_t product_distance_key(const VertexId& origin, const VertexId& v);

/// Fiber U_i through `base`: fiber 2 is {base.first} × T^{(2)}, fiber 1 is
/// T^{(1)} × {base.second}.
SubgraphSpec product_fiber(const ProductSpec& spec, int fiber, const ProductVertex& base = {});

struct ProductSummary {
  ProductSpec spec;
  SpectralSummary fiber[2];  // closed forms for U_1, U_2
  double phi[2] = {0, 0};    // 2√(d_i − 1)/d_i
  double rho_G = 0.0;        // α₁φ₁ + α₂φ₂
  double inv_rho_G = 0.0;
  /// φ_i / ρ_{U_i}^2 = m₁(U_i) / ρ_{U_i}.
  double recurrence_mean[2] = {0, 0};
};

ProductSummary product_spectral_summary(const ProductSpec& spec);

struct ProductDPCheck {
  int depth = 0;
  double rho_G = 0.0;  // from the exact binomial convolution of factor returns
  SpectralSummary fiber[2];
  double zeta[2] = {0, 0};  // zeta_estimate on each fiber
};

/// DP estimates of the same quantities. ρ_G uses
/// p^{(n)}((o,o),(o,o)) = sum_k C(n,k) α₁^k α₂^{n-k} p₁^{(k)} p₂^{(n-k)}.
ProductDPCheck product_dp_check(const ProductSpec& spec, int depth);

/// log p_G^{(n)}(o, o), n = 0..n_max, by the binomial convolution.
std::vector<double> product_log_returns(const ProductSpec& spec, int n_max);

struct Window {
  double lo = 0.0;  // φ_U / ρ_U
  double hi = 0.0;  // 1 / ρ_G
  bool empty() const { return !(lo < hi); }
};

/// (φ_U/ρ_U, 1/ρ_G]: the BRW is transient on G yet can persist in U_fiber.
Window transient_window(const ProductSpec& spec, int fiber);

// --- free products ------------------------------------------------------------

/// Z_k (cyclic, tokens are residues 1..k-1) or F_r (free, tokens ±1..±r).
struct FactorGroup {
  enum class Kind { cyclic, free };
  Kind kind = Kind::cyclic;
  std::uint32_t size = 2;  // k for Z_k, r for F_r
  /// Generator tokens and their step weights μ_i (summing to 1).
  std::vector<std::int32_t> gens;
  std::vector<double> mu;

  static FactorGroup cyclic(std::uint32_t k);  // gens {1, k-1} (or {1} for k = 2), uniform
  static FactorGroup free_group(std::uint32_t r);  // gens ±1..±r, uniform
  static FactorGroup parse(const std::string& text);  // "Z2", "Z5", "F2"
  std::string describe() const;
  bool valid_token(std::int32_t t) const;
  std::int32_t inverse(std::int32_t t) const;
  bool uniform_symmetric() const;
};

struct FreeProductSpec {
  FactorGroup g1 = FactorGroup::cyclic(2);
  FactorGroup g2 = FactorGroup::free_group(2);
  double alpha = 0.3;  // weight of factor 1

  void validate() const;
  const FactorGroup& factor(int f) const { return f == 1 ? g1 : g2; }
};

/// Throws EncodingError unless w is a reduced word for the spec.
void validate_word(const FreeProductSpec& spec, const GroupWord& w);
/// w · (token of factor f), reduced.
GroupWord multiply(const FreeProductSpec& spec, const GroupWord& w, std::uint8_t factor, std::int32_t token);
GroupWord multiply(const FreeProductSpec& spec, const GroupWord& a, const GroupWord& b);
GroupWord inverse(const FreeProductSpec& spec, const GroupWord& w);

/// p(x, y) = μ(x⁻¹y) with μ = α μ₁ + (1 − α) μ₂.
TransitionKernel free_product_kernel(const FreeProductSpec& spec);

/// The copy of Γ₂ through the identity. Carries a radial key (word length, or
/// circular distance for cyclic Γ₂) when μ₂ is uniform and symmetric.
SubgraphSpec gamma2_copy(const FreeProductSpec& spec);

struct FreeProductThresholds {
  double zeta = 0.0;        // 1 − α
  double zeta_stay = 0.0;   // P_e(E_1) by exact DP
  double zeta_dp = 0.0;     // zeta_estimate at the given depth
  double m0 = 0.0, m1 = 0.0;
  int depth = 0;
};

FreeProductThresholds free_product_thresholds(const FreeProductSpec& spec, int depth = 200);

}  // namespace brw
