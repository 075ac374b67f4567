#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "brwlab/vertex.hpp"

namespace brw {

class KernelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NormalizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Step {
  VertexId to;
  double prob;
};

enum class KernelKind { stochastic, substochastic };

using NeighborFn = std::function<std::vector<Step>(const VertexId&)>;

/// Lumping label of `v` relative to a start vertex `origin`. A radial key must
/// make the kernel exactly lumpable started from `origin`, and the class of
/// `origin` itself must be the singleton {origin}.
using RadialKey = std::function<std::int64_t(const VertexId& origin, const VertexId& v)>;

/// Tolerance for row-sum checks; probabilities are doubles.
inline constexpr double kRowTolerance = 1e-12;

/// Nearest-neighbour transition kernel on a generator-backed graph.
/// Immutable and cheap to copy.
class TransitionKernel {
 public:
  TransitionKernel(std::string name, KernelKind kind, NeighborFn fn, RadialKey key = {});

  /// Row of the kernel at v. Validates positivity and the row-sum law.
  std::vector<Step> neighbors(const VertexId& v) const;
  double row_sum(const VertexId& v) const;

  KernelKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const RadialKey& radial_key() const { return key_; }
  bool has_radial_key() const { return static_cast<bool>(key_); }

 private:
  std::string name_;
  KernelKind kind_;
  NeighborFn fn_;
  RadialKey key_;
};

std::vector<Step> neighbors(const TransitionKernel& kernel, const VertexId& v);

/// A subset U of the graph, given by a membership predicate. Edges are
/// inherited from the kernel, so the induced-edge condition holds by
/// construction.
struct SubgraphSpec {
  std::string name;
  std::function<bool(const VertexId&)> contains;
  VertexId base;
  /// Set when the restricted kernel is lumpable by this key.
  RadialKey radial_key;
};

/// U = G. Carries over the kernel's radial key.
SubgraphSpec whole_graph(const TransitionKernel& kernel, VertexId base);

/// P -> P_U: rows filtered to members of U.
TransitionKernel restrict_kernel(const TransitionKernel& kernel, const SubgraphSpec& sub);

/// P_U -> Q_U: each row divided by its sum δ_x (rows already summing to one
/// are left untouched). A row with δ_x = 0 raises NormalizationError when it
/// is first visited.
TransitionKernel normalize_kernel(const TransitionKernel& pU);

/// Spherically symmetric rooted tree: every vertex at depth i has
/// children(i) >= 1 children. children(i) = prefix[i] for i < prefix.size(),
/// and cycles through `cycle` afterwards.
class TreeSpec {
 public:
  /// The homogeneous tree T_d rooted at o: the root has d children, every
  /// other vertex has d - 1.
  static TreeSpec homogeneous(std::uint32_t degree);
  static TreeSpec branching(std::vector<std::uint32_t> prefix, std::vector<std::uint32_t> cycle);

  std::uint32_t children(std::size_t depth) const;
  std::uint32_t degree(const TreeWord& w) const;
  bool valid(const TreeWord& w) const;
  /// |S_i| = prod_{j<i} children(j).
  double level_size(std::size_t depth) const;
  bool is_homogeneous() const { return homogeneous_degree_ != 0; }
  std::uint32_t homogeneous_degree() const { return homogeneous_degree_; }
  std::string describe() const;

 private:
  std::vector<std::uint32_t> prefix_;
  std::vector<std::uint32_t> cycle_;
  std::uint32_t homogeneous_degree_ = 0;
};

/// Simple random walk on the tree described by `spec`. Homogeneous trees get
/// the tree-distance radial key.
TransitionKernel tree_kernel(const TreeSpec& spec);

/// Tree-distance key for words of a homogeneous tree.
std::int64_t tree_distance_key(const VertexId& origin, const VertexId& v);

}  // namespace brw
