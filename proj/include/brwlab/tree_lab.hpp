#pragma once

// Tree constructions: boundary measure, Galton–Watson percolation clusters,
// pruned trees, the edge-breeding BRW and its extinction recursion, and the
// boundary-dense sets used as counterexamples. Sets live in the homogeneous
// tree T_d with words as in tree_kernel(TreeSpec::homogeneous(d)).

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "brwlab/brw.hpp"
#include "brwlab/kernel.hpp"
#include "brwlab/offspring.hpp"
#include "brwlab/stats.hpp"

namespace brw {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// γ_o(∂T_x) = 1/|S_i| for x at depth i.
double boundary_measure(const TreeSpec& tree, const TreeWord& x);

/// Subset of a rooted tree with a subtree test: subtree_meets(v) is true iff
/// some vertex of T_v (v and its descendants) belongs to the set.
class TreeSet {
 public:
  virtual ~TreeSet() = default;
  virtual bool contains(const TreeWord& v) const = 0;
  virtual bool subtree_meets(const TreeWord& v) const = 0;
  virtual std::string describe() const = 0;
};
using TreeSetPtr = std::shared_ptr<const TreeSet>;

/// Spherically symmetric subtree of T_d: at depth i keep the first
/// sub.children(i) children.
TreeSetPtr branching_subtree(std::uint32_t d, const TreeSpec& sub);
/// The ray through `prefix` continued by cycling through `cycle`.
TreeSetPtr ray_set(std::vector<std::uint32_t> prefix, std::vector<std::uint32_t> cycle);
TreeSetPtr finite_set(std::vector<TreeWord> words);
/// T_c: c and all its descendants.
TreeSetPtr subtree_set(TreeWord c);
TreeSetPtr union_set(TreeSetPtr a, TreeSetPtr b);
TreeSetPtr empty_set();

/// Membership in T_d restricted to the set. The base vertex is the root.
/// `radial` attaches the tree-distance key (only valid for sets on which the
/// restricted walk is lumpable by distance to the root).
SubgraphSpec as_subgraph(TreeSetPtr set, std::uint32_t d, bool radial = false);

// --- Galton–Watson percolation --------------------------------------------

struct GWRealization {
  TreeSpec tree;
  std::vector<double> p;  // p_i for edges S_i -> S_{i+1}; the last entry repeats
  int depth = 0;
  std::unordered_set<TreeWord, VertexHash> retained;
  std::vector<std::uint64_t> level_counts;  // |Υ ∩ S_i|, i = 0..depth

  double p_at(std::size_t i) const { return i < p.size() ? p[i] : p.back(); }
  bool contains(const TreeWord& v) const { return retained.count(v) > 0; }
  /// |Υ ∩ S_depth| / |S_depth|.
  double boundary_estimate() const;
  /// prod_{j<i} p_j.
  double retention_probability(std::size_t i) const;
};

GWRealization gw_percolate(const TreeSpec& tree, std::vector<double> p, int depth, Rng& rng);
/// The cluster as a set of T_d words (the tree must embed in T_d).
TreeSetPtr gw_cluster_set(std::shared_ptr<const GWRealization> gw);

// --- pruned trees ---------------------------------------------------------------

/// T_d with the last child removed at every vertex of each listed level
/// (all levels when `every_level`). Levels must be strictly increasing.
TreeSetPtr pruned_tree(std::uint32_t d, std::vector<std::uint32_t> levels, bool every_level = false);
SubgraphSpec prune_tree(std::uint32_t d, std::vector<std::uint32_t> levels, bool every_level = false);

/// Exact |set ∩ S_D| by depth-first enumeration (the set must be prefix-closed
/// or at least have an exact subtree test).
std::uint64_t level_count(const TreeSet& set, std::uint32_t d, std::uint32_t D);

struct PrunedCertificate {
  std::uint32_t levels = 0;
  std::uint32_t depth = 0;
  std::uint64_t count = 0;       // |T' ∩ S_D|
  std::uint64_t level_size = 0;  // |S_D|
  bool within_bound = false;     // count / |S_D| <= ((d-1)/d)^levels, exactly
};

PrunedCertificate pruned_certificate(std::uint32_t d, const std::vector<std::uint32_t>& levels, std::uint32_t D);

// --- edge-breeding BRW ------------------------------------------------------------

OffspringLaw edge_breeding_law(double lambda, std::uint32_t degree);

enum class EdgeRegime { global_extinction, global_survival_local_extinction, local_survival };
std::string to_string(EdgeRegime r);
/// λ <= 1/d: global extinction; 1/d < λ <= 1/(2√(d-1)): global survival and
/// local extinction; larger λ: local survival.
EdgeRegime edge_breeding_regime(double lambda, std::uint32_t d);

struct RecursionSolution {
  double lambda = 0.0;
  std::uint32_t d = 0;
  std::vector<double> a;  // a_0 = 1, a_1, ...
  double a1 = 0.0;
  double decay_rate = 0.0;   // max a_{n+1}/a_n over the second half
  double fast_root = 0.0;    // smaller root of (d-1)t^2 - t/λ + 1 = 0
  double max_residual = 0.0;
  double tolerance = 0.0;
  int bisection_steps = 0;
};

/// Solves a_n = λS/(1+λS), S = a_{n-1} + (d-1)a_{n+1}, a_0 = 1, for the
/// probabilities a_n = 1 - q_0(o, {x}) with |x| = n, by shooting on a_1 with
/// the forward form. The probabilistic solution is the smallest a_1 whose
/// forward orbit never goes negative.
RecursionSolution solve_extinction_recursion(double lambda, std::uint32_t d, int N, double tol = 1e-12);

// --- boundary-dense sets --------------------------------------------------------

/// BFS rank of a T_d word (root = 0), saturating at UINT64_MAX.
std::uint64_t tree_rank(const TreeWord& v, std::uint32_t d);
TreeWord tree_unrank(std::uint64_t rank, std::uint32_t d);

struct AEmptyParams {
  std::uint32_t d = 3;
  double c = 1.0;       // a_n <= c * delta^n
  double delta = 0.5;
  std::uint32_t r0 = 0;
  std::uint32_t step = 1;  // Δ
  double epsilon = 0.0;
  double certified_sum = 0.0;  // sum_i c * delta^{r_i}
};

/// x_i = y_i padded with 0-children to depth r_i = r0 + iΔ, where y_1, y_2,
/// ... is the BFS enumeration of T_d minus the root. r0 is the smallest depth
/// with sum_i c δ^{r_i} < epsilon.
class AEmptySet : public TreeSet {
 public:
  AEmptySet(const RecursionSolution& sol, double epsilon, std::uint32_t step = 1);
  bool contains(const TreeWord& v) const override;
  bool subtree_meets(const TreeWord& v) const override;
  std::string describe() const override;
  const AEmptyParams& params() const { return params_; }
  TreeWord point(std::uint64_t i) const;

 private:
  AEmptyParams params_;
};

std::shared_ptr<const AEmptySet> construct_A_empty(const RecursionSolution& sol, double epsilon, std::uint32_t step = 1);

/// {w in S_D : T_w meets the set}, in lexicographic order of S_D.
std::vector<char> boundary_certificate(const TreeSet& set, std::uint32_t d, std::uint32_t D);

/// Connected set with the same depth-D boundary certificate: for |v| <= D,
/// v belongs iff some certified w in S_D descends from v; deeper v belong
/// iff T_v meets the set. An empty certificate gives the root singleton.
TreeSetPtr connected_hull(TreeSetPtr set, std::uint32_t d, std::uint32_t D);

// --- survival in A without visiting B -------------------------------------------

struct EventEstimate {
  std::uint64_t count = 0;
  double estimate = 0.0;
  Interval ci;
};

struct SurvivalEstimate {
  std::uint64_t trials = 0;
  EventEstimate survive_in_A;             // A occupied at every generation 1..stop
  EventEstimate survive_in_A_avoiding_B;  // the same and B never visited
  EventEstimate late_visit_A;             // A occupied in (horizon/2, horizon]
  EventEstimate late_visit_A_avoiding_B;
  std::uint64_t visited_B = 0;
  /// Largest generation at which any trial had a particle in A.
  int last_visit_A = -1;
};

/// Unrestricted BRW from x; a cap-stopped trial counts its events as observed
/// up to the stop.
SurvivalEstimate survival_without_visiting(const TransitionKernel& P, const OffspringLaw& law, const VertexId& x,
                                           const SubgraphSpec& A, const SubgraphSpec& B,
                                           const SimulationOptions& opt);

}  // namespace brw
