#pragma once

// Lazily explored state space of a transition kernel started at one vertex,
// optionally lumped by the kernel's radial key. Both the exact n-step
// dynamic programming and the count-based BRW simulation run on it.

#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "brwlab/kernel.hpp"

namespace brw {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

class ExploredChain {
 public:
  using State = std::uint32_t;
  struct Entry {
    State to;
    double prob;
    double log_prob;
  };

  /// With `lumped` set, states are classes of the kernel's radial key
  /// relative to `origin`; otherwise states are vertices. State 0 is origin.
  ExploredChain(TransitionKernel kernel, VertexId origin, bool lumped);

  bool lumped() const { return lumped_; }
  const TransitionKernel& kernel() const { return kernel_; }
  const VertexId& origin() const { return reps_.front(); }
  std::size_t size() const { return reps_.size(); }

  State intern(const VertexId& v);
  const VertexId& representative(State s) const { return reps_[s]; }
  /// Radial label of a lumped state; the state index otherwise.
  std::int64_t label(State s) const { return lumped_ ? labels_[s] : static_cast<std::int64_t>(s); }

  /// Aggregated row of state s, computed on first use. Lumped rows are sorted
  /// by target label so the result does not depend on exploration order.
  const std::vector<Entry>& row(State s);
  bool row_ready(State s) const { return s < ready_.size() && ready_[s]; }
  /// Row of an already expanded state; throws std::logic_error otherwise.
  const std::vector<Entry>& expanded_row(State s) const;
  double row_sum(State s);

  /// Computes rows of every state reachable from `from` in < depth steps.
  void expand(int depth, State from = 0);
  /// Drops everything except the origin.
  void reset();

 private:
  TransitionKernel kernel_;
  bool lumped_;
  std::vector<VertexId> reps_;
  std::vector<std::int64_t> labels_;
  std::unordered_map<std::int64_t, State> by_label_;
  std::unordered_map<VertexId, State, VertexHash> by_vertex_;
  std::vector<std::vector<Entry>> rows_;
  std::vector<char> ready_;
};

/// Log-domain forward propagation of a point mass at the chain origin.
class LogPropagator {
 public:
  explicit LogPropagator(ExploredChain& chain);

  int steps() const { return steps_; }
  const std::vector<double>& log_mass() const { return logp_; }
  double log_at(ExploredChain::State s) const { return s < logp_.size() ? logp_[s] : kLogZero; }
  double log_total() const;
  void step();

 private:
  ExploredChain& chain_;
  std::vector<double> logp_;
  std::vector<double> max_;
  std::vector<double> acc_;
  int steps_ = 0;
};

/// log p^{(n)}(x, x) for n = 0..n_max. Lumped when the kernel allows it.
std::vector<double> log_return_series(const TransitionKernel& kernel, const VertexId& x, int n_max,
                                      bool allow_lumping = true);

/// log sum_y p^{(n)}(x, y) for n = 0..n_max.
std::vector<double> log_mass_series(const TransitionKernel& kernel, const VertexId& x, int n_max,
                                    bool allow_lumping = true);

/// log p^{(n)}(x, y) for n = 0..n_max. With a radial key the chain is lumped
/// by the pair (key(x, .), key(y, .)), whose class of y is {y}; this is exact
/// when automorphisms fixing x and y act transitively on each pair class, as
/// on homogeneous trees and their products.
std::vector<double> log_transition_series(const TransitionKernel& kernel, const VertexId& x, const VertexId& y,
                                          int n_max, bool allow_lumping = true);

/// Exact n-step probability by sparse forward DP over the ball of radius n.
double n_step_prob(const TransitionKernel& kernel, const VertexId& x, const VertexId& y, int n);

/// Full n-step distribution p^{(n)}(x, .) (unlumped).
std::unordered_map<VertexId, double, VertexHash> n_step_distribution(const TransitionKernel& kernel,
                                                                      const VertexId& x, int n);

double log_sum_exp(double a, double b);

}  // namespace brw
