#include "brwlab/tree_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace brw {

namespace {

using u128 = unsigned __int128;
constexpr std::uint64_t kSat = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat(u128 v) { return v > kSat ? kSat : static_cast<std::uint64_t>(v); }

std::uint32_t td_children(std::uint32_t d, std::size_t depth) { return depth == 0 ? d : d - 1; }

bool valid_in(std::uint32_t d, const TreeWord& v) {
  for (std::size_t i = 0; i < v.path.size(); ++i)
    if (v.path[i] >= td_children(d, i)) return false;
  return true;
}

// Calls f(w) for every w in S_D of T_d, in lexicographic order.
template <class F>
void for_each_level(std::uint32_t d, std::uint32_t D, F f) {
  TreeWord w;
  w.path.assign(D, 0);
  for (;;) {
    f(w);
    int i = static_cast<int>(D) - 1;
    while (i >= 0 && w.path[i] + 1 == td_children(d, i)) w.path[i--] = 0;
    if (i < 0) return;
    ++w.path[i];
  }
}

class BranchingSubtree : public TreeSet {
 public:
  BranchingSubtree(std::uint32_t d, TreeSpec sub) : d_(d), sub_(std::move(sub)) {
    for (std::size_t i = 0; i < 64; ++i)
      if (sub_.children(i) > td_children(d_, i)) throw SpecError(sub_.describe() + " does not embed in T" + std::to_string(d));
  }
  bool contains(const TreeWord& v) const override {
    for (std::size_t i = 0; i < v.path.size(); ++i)
      if (v.path[i] >= sub_.children(i)) return false;
    return true;
  }
  bool subtree_meets(const TreeWord& v) const override { return contains(v); }
  std::string describe() const override { return sub_.describe() + " in T" + std::to_string(d_); }

 private:
  std::uint32_t d_;
  TreeSpec sub_;
};

class RaySet : public TreeSet {
 public:
  RaySet(std::vector<std::uint32_t> prefix, std::vector<std::uint32_t> cycle)
      : prefix_(std::move(prefix)), cycle_(std::move(cycle)) {
    if (cycle_.empty()) throw SpecError("ray needs a non-empty repeating part");
  }
  bool contains(const TreeWord& v) const override {
    for (std::size_t i = 0; i < v.path.size(); ++i)
      if (v.path[i] != at(i)) return false;
    return true;
  }
  bool subtree_meets(const TreeWord& v) const override { return contains(v); }
  std::string describe() const override { return "ray"; }

 private:
  std::uint32_t at(std::size_t i) const {
    return i < prefix_.size() ? prefix_[i] : cycle_[(i - prefix_.size()) % cycle_.size()];
  }
  std::vector<std::uint32_t> prefix_, cycle_;
};

class FiniteSet : public TreeSet {
 public:
  explicit FiniteSet(std::vector<TreeWord> words) : words_(std::move(words)) {}
  bool contains(const TreeWord& v) const override {
    return std::find(words_.begin(), words_.end(), v) != words_.end();
  }
  bool subtree_meets(const TreeWord& v) const override {
    return std::any_of(words_.begin(), words_.end(), [&v](const TreeWord& w) { return is_prefix(v, w); });
  }
  std::string describe() const override { return "finite(" + std::to_string(words_.size()) + ")"; }

 private:
  std::vector<TreeWord> words_;
};

class SubtreeSet : public TreeSet {
 public:
  explicit SubtreeSet(TreeWord c) : c_(std::move(c)) {}
  bool contains(const TreeWord& v) const override { return is_prefix(c_, v); }
  bool subtree_meets(const TreeWord& v) const override { return is_prefix(c_, v) || is_prefix(v, c_); }
  std::string describe() const override { return "T_" + to_string(c_); }

 private:
  TreeWord c_;
};

class UnionSet : public TreeSet {
 public:
  UnionSet(TreeSetPtr a, TreeSetPtr b) : a_(std::move(a)), b_(std::move(b)) {}
  bool contains(const TreeWord& v) const override { return a_->contains(v) || b_->contains(v); }
  bool subtree_meets(const TreeWord& v) const override { return a_->subtree_meets(v) || b_->subtree_meets(v); }
  std::string describe() const override { return a_->describe() + " u " + b_->describe(); }

 private:
  TreeSetPtr a_, b_;
};

class EmptySet : public TreeSet {
 public:
  bool contains(const TreeWord&) const override { return false; }
  bool subtree_meets(const TreeWord&) const override { return false; }
  std::string describe() const override { return "empty"; }
};

class PrunedTree : public TreeSet {
 public:
  PrunedTree(std::uint32_t d, std::vector<std::uint32_t> levels, bool every)
      : d_(d), levels_(std::move(levels)), every_(every) {
    if (d < 3) throw SpecError("pruning needs d >= 3");
    for (std::size_t i = 1; i < levels_.size(); ++i)
      if (levels_[i] <= levels_[i - 1]) throw SpecError("pruning levels must be strictly increasing");
  }
  bool pruned(std::size_t depth) const {
    return every_ || std::binary_search(levels_.begin(), levels_.end(), static_cast<std::uint32_t>(depth));
  }
  bool contains(const TreeWord& v) const override {
    for (std::size_t i = 0; i < v.path.size(); ++i)
      if (pruned(i) && v.path[i] + 1 == td_children(d_, i)) return false;
    return true;
  }
  bool subtree_meets(const TreeWord& v) const override { return contains(v); }
  std::string describe() const override {
    if (every_) return "T" + std::to_string(d_) + " pruned at every level";
    return "T" + std::to_string(d_) + " pruned at " + std::to_string(levels_.size()) + " levels";
  }

 private:
  std::uint32_t d_;
  std::vector<std::uint32_t> levels_;
  bool every_;
};

class GWClusterSet : public TreeSet {
 public:
  explicit GWClusterSet(std::shared_ptr<const GWRealization> gw) : gw_(std::move(gw)) {}
  bool contains(const TreeWord& v) const override { return gw_->contains(v); }
  bool subtree_meets(const TreeWord& v) const override { return gw_->contains(v); }
  std::string describe() const override { return "GW cluster of " + gw_->tree.describe(); }

 private:
  std::shared_ptr<const GWRealization> gw_;
};

class HullSet : public TreeSet {
 public:
  HullSet(TreeSetPtr set, std::uint32_t d, std::uint32_t D) : set_(std::move(set)), D_(D) {
    for_each_level(d, D, [this](const TreeWord& w) {
      if (!set_->subtree_meets(w)) return;
      TreeWord u = w;
      while (inner_.insert(u).second && !u.is_root()) u.path.pop_back();
    });
    singleton_ = inner_.empty();
    if (singleton_) inner_.insert(TreeWord{});
  }
  bool contains(const TreeWord& v) const override {
    if (v.depth() <= D_) return inner_.count(v) > 0;
    return !singleton_ && set_->subtree_meets(v);
  }
  bool subtree_meets(const TreeWord& v) const override { return contains(v); }
  std::string describe() const override { return "hull_" + std::to_string(D_) + "(" + set_->describe() + ")"; }

 private:
  TreeSetPtr set_;
  std::uint32_t D_;
  bool singleton_ = false;
  std::unordered_set<TreeWord, VertexHash> inner_;
};

}  // namespace

double boundary_measure(const TreeSpec& tree, const TreeWord& x) {
  if (!tree.valid(x)) throw EncodingError("word " + to_string(x) + " is not a vertex of " + tree.describe());
  return 1.0 / tree.level_size(x.depth());
}

TreeSetPtr branching_subtree(std::uint32_t d, const TreeSpec& sub) { return std::make_shared<BranchingSubtree>(d, sub); }
TreeSetPtr ray_set(std::vector<std::uint32_t> prefix, std::vector<std::uint32_t> cycle) {
  return std::make_shared<RaySet>(std::move(prefix), std::move(cycle));
}
TreeSetPtr finite_set(std::vector<TreeWord> words) { return std::make_shared<FiniteSet>(std::move(words)); }
TreeSetPtr subtree_set(TreeWord c) { return std::make_shared<SubtreeSet>(std::move(c)); }
TreeSetPtr union_set(TreeSetPtr a, TreeSetPtr b) { return std::make_shared<UnionSet>(std::move(a), std::move(b)); }
TreeSetPtr empty_set() { return std::make_shared<EmptySet>(); }

SubgraphSpec as_subgraph(TreeSetPtr set, std::uint32_t d, bool radial) {
  SubgraphSpec s;
  s.name = set->describe();
  s.base = TreeWord{};
  s.contains = [set, d](const VertexId& v) {
    const auto* w = std::get_if<TreeWord>(&v);
    return w && valid_in(d, *w) && set->contains(*w);
  };
  if (radial) s.radial_key = tree_distance_key;
  return s;
}

// ---------------------------------------------------------------------------

double GWRealization::boundary_estimate() const {
  return static_cast<double>(level_counts.at(depth)) / tree.level_size(depth);
}

double GWRealization::retention_probability(std::size_t i) const {
  double r = 1.0;
  for (std::size_t j = 0; j < i; ++j) r *= p_at(j);
  return r;
}

GWRealization gw_percolate(const TreeSpec& tree, std::vector<double> p, int depth, Rng& rng) {
  if (depth < 1) throw SpecError("percolation depth must be >= 1");
  if (p.empty()) throw SpecError("percolation needs at least one p_i");
  for (double q : p)
    if (!(q >= 0.0 && q <= 1.0)) throw SpecError("percolation parameters must lie in [0, 1]");
  GWRealization gw;
  gw.tree = tree;
  gw.p = std::move(p);
  gw.depth = depth;
  gw.level_counts.assign(depth + 1, 0);
  std::vector<TreeWord> level{TreeWord{}};
  gw.retained.insert(TreeWord{});
  gw.level_counts[0] = 1;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < depth; ++i) {
    std::vector<TreeWord> next;
    const double pi = gw.p_at(i);
    for (const auto& v : level)
      for (std::uint32_t c = 0; c < tree.children(i); ++c)
        if (u(rng) < pi) next.push_back(v.child(c));
    for (const auto& w : next) gw.retained.insert(w);
    gw.level_counts[i + 1] = next.size();
    level = std::move(next);
  }
  return gw;
}

TreeSetPtr gw_cluster_set(std::shared_ptr<const GWRealization> gw) { return std::make_shared<GWClusterSet>(std::move(gw)); }

TreeSetPtr pruned_tree(std::uint32_t d, std::vector<std::uint32_t> levels, bool every_level) {
  return std::make_shared<PrunedTree>(d, std::move(levels), every_level);
}

SubgraphSpec prune_tree(std::uint32_t d, std::vector<std::uint32_t> levels, bool every_level) {
  // Pruning every level leaves a (d-1)-regular tree, radially symmetric about o.
  return as_subgraph(pruned_tree(d, std::move(levels), every_level), d, every_level);
}

std::uint64_t level_count(const TreeSet& set, std::uint32_t d, std::uint32_t D) {
  std::uint64_t count = 0;
  std::vector<TreeWord> stack{TreeWord{}};
  while (!stack.empty()) {
    TreeWord v = std::move(stack.back());
    stack.pop_back();
    if (!set.subtree_meets(v)) continue;
    if (v.depth() == D) {
      if (set.contains(v)) ++count;
      continue;
    }
    for (std::uint32_t c = 0; c < td_children(d, v.depth()); ++c) stack.push_back(v.child(c));
  }
  return count;
}

PrunedCertificate pruned_certificate(std::uint32_t d, const std::vector<std::uint32_t>& levels, std::uint32_t D) {
  PrunedCertificate cert;
  cert.depth = D;
  cert.levels = static_cast<std::uint32_t>(std::count_if(levels.begin(), levels.end(), [D](auto l) { return l < D; }));
  cert.count = level_count(*pruned_tree(d, levels), d, D);
  u128 size = 1;
  for (std::uint32_t i = 0; i < D; ++i) size *= td_children(d, i);
  cert.level_size = sat(size);
  u128 lhs = cert.count, rhs = size;
  for (std::uint32_t i = 0; i < cert.levels; ++i) {
    lhs *= d;
    rhs *= d - 1;
  }
  cert.within_bound = lhs <= rhs;
  return cert;
}

// ---------------------------------------------------------------------------

OffspringLaw edge_breeding_law(double lambda, std::uint32_t degree) { return OffspringLaw::edge_breeding(lambda, degree); }

std::string to_string(EdgeRegime r) {
  switch (r) {
    case EdgeRegime::global_extinction:
      return "global_extinction";
    case EdgeRegime::global_survival_local_extinction:
      return "global_survival_local_extinction";
    case EdgeRegime::local_survival:
      return "local_survival";
  }
  return "?";
}

EdgeRegime edge_breeding_regime(double lambda, std::uint32_t d) {
  if (!(lambda > 0.0) || d < 2) throw SpecError("edge-breeding regime needs lambda > 0 and d >= 2");
  if (lambda <= 1.0 / d) return EdgeRegime::global_extinction;
  if (lambda <= 1.0 / (2.0 * std::sqrt(d - 1.0))) return EdgeRegime::global_survival_local_extinction;
  return EdgeRegime::local_survival;
}

RecursionSolution solve_extinction_recursion(double lambda, std::uint32_t d, int N, double tol) {
  if (d < 3) throw SpecError("extinction recursion needs d >= 3");
  if (edge_breeding_regime(lambda, d) != EdgeRegime::global_survival_local_extinction)
    throw SpecError("lambda must lie in (1/d, 1/(2 sqrt(d-1))]");
  if (N < 10) throw SpecError("extinction recursion needs N >= 10");
  using LD = long double;
  const LD lam = lambda, dm1 = d - 1.0L;
  auto forward = [&](LD prev, LD cur) { return (cur / (lam * (1 - cur)) - prev) / dm1; };
  const int shoot_steps = std::max(N, 4000);
  auto goes_negative = [&](LD a1) {
    LD prev = 1, cur = a1;
    for (int n = 1; n < shoot_steps; ++n) {
      if (cur >= 1) return false;
      const LD next = forward(prev, cur);
      if (next < 0) return true;
      if (next >= cur) return false;
      prev = cur;
      cur = next;
      if (cur == 0) return false;
    }
    return false;
  };
  LD lo = 0, hi = 1 - 1e-15L;
  if (!goes_negative(lo) || goes_negative(hi)) {
    std::ostringstream os;
    os << "shooting on a_1 failed to bracket for lambda=" << lambda << ", d=" << d;
    throw SolverError(os.str());
  }
  RecursionSolution sol;
  sol.lambda = lambda;
  sol.d = d;
  for (; sol.bisection_steps < 200 && hi - lo > 0; ++sol.bisection_steps) {
    const LD mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi) break;
    (goes_negative(mid) ? lo : hi) = mid;
  }
  sol.a1 = static_cast<double>(hi);
  std::vector<LD> a{1, hi};
  while (static_cast<int>(a.size()) <= N && a.back() >= tol) {
    const LD next = forward(a[a.size() - 2], a.back());
    if (!(next > 0) || next >= a.back()) break;
    a.push_back(next);
  }
  sol.a.assign(a.begin(), a.end());
  sol.tolerance = sol.a.back();
  for (std::size_t n = 1; n + 1 < sol.a.size(); ++n) {
    const double S = sol.a[n - 1] + (d - 1.0) * sol.a[n + 1];
    sol.max_residual = std::max(sol.max_residual, std::abs(sol.a[n] - lambda * S / (1 + lambda * S)));
  }
  const std::size_t K = sol.a.size() - 1;
  for (std::size_t n = std::max<std::size_t>(1, K / 2); n < K; ++n)
    sol.decay_rate = std::max(sol.decay_rate, sol.a[n + 1] / sol.a[n]);
  const double il = 1.0 / lambda;
  sol.fast_root = (il - std::sqrt(std::max(0.0, il * il - 4.0 * (d - 1.0)))) / (2.0 * (d - 1.0));
  return sol;
}

// ---------------------------------------------------------------------------

std::uint64_t tree_rank(const TreeWord& v, std::uint32_t d) {
  const std::size_t k = v.depth();
  if (k == 0) return 0;
  u128 offset = 1, level = d;
  for (std::size_t j = 1; j < k; ++j) {
    offset += level;
    level *= d - 1;
    if (offset > kSat) return kSat;
  }
  u128 idx = 0;
  for (std::size_t j = 0; j < k; ++j) {
    idx = idx * (j == 0 ? 1 : d - 1) + v.path[j];
    if (idx > kSat) return kSat;
  }
  return sat(offset + idx);
}

TreeWord tree_unrank(std::uint64_t rank, std::uint32_t d) {
  TreeWord w;
  if (rank == 0) return w;
  u128 rem = rank - 1, level = d;
  std::size_t k = 1;
  while (rem >= level) {
    rem -= level;
    level *= d - 1;
    ++k;
  }
  w.path.assign(k, 0);
  for (std::size_t j = k; j-- > 1;) {
    w.path[j] = static_cast<std::uint32_t>(rem % (d - 1));
    rem /= d - 1;
  }
  w.path[0] = static_cast<std::uint32_t>(rem);
  return w;
}

AEmptySet::AEmptySet(const RecursionSolution& sol, double epsilon, std::uint32_t step) {
  if (!(sol.decay_rate > 0.0 && sol.decay_rate < 1.0)) throw SpecError("A_empty needs a decay rate in (0, 1)");
  if (!(epsilon > 0.0) || step < 1) throw SpecError("A_empty needs epsilon > 0 and step >= 1");
  params_.d = sol.d;
  params_.delta = sol.decay_rate;
  params_.step = step;
  params_.epsilon = epsilon;
  params_.c = 0.0;
  for (std::size_t n = 1; n < sol.a.size(); ++n)
    params_.c = std::max(params_.c, sol.a[n] / std::pow(params_.delta, static_cast<double>(n)));
  const double q = std::pow(params_.delta, step);
  auto sum_from = [&](std::uint32_t r0) { return params_.c * std::pow(params_.delta, r0) * q / (1.0 - q); };
  std::uint32_t r0 = 0;
  while (sum_from(r0) >= epsilon) ++r0;
  params_.r0 = r0;
  params_.certified_sum = sum_from(r0);
}

TreeWord AEmptySet::point(std::uint64_t i) const {
  TreeWord y = tree_unrank(i, params_.d);
  y.path.resize(params_.r0 + i * params_.step, 0);
  return y;
}

bool AEmptySet::contains(const TreeWord& v) const {
  const std::uint64_t n = v.depth();
  if (n < params_.r0 + params_.step || (n - params_.r0) % params_.step != 0) return false;
  const std::uint64_t i = (n - params_.r0) / params_.step;
  const TreeWord y = tree_unrank(i, params_.d);
  if (y.depth() > n || !is_prefix(y, v)) return false;
  return std::all_of(v.path.begin() + static_cast<std::ptrdiff_t>(y.depth()), v.path.end(),
                     [](std::uint32_t c) { return c == 0; });
}

bool AEmptySet::subtree_meets(const TreeWord& v) const {
  // Walk down the first-child line from v until some y_j = u has its point
  // x_j (u padded with zeros) at depth >= |u|, which then lies in T_v.
  TreeWord u = v;
  for (;;) {
    const std::uint64_t j = tree_rank(u, params_.d);
    if (j >= 1) {
      const u128 rj = static_cast<u128>(params_.r0) + static_cast<u128>(j) * params_.step;
      if (rj >= u.depth()) return true;
    }
    u = u.child(0);
  }
}

std::string AEmptySet::describe() const {
  std::ostringstream os;
  os << "A_empty(d=" << params_.d << ",r0=" << params_.r0 << ",step=" << params_.step << ")";
  return os.str();
}

std::shared_ptr<const AEmptySet> construct_A_empty(const RecursionSolution& sol, double epsilon, std::uint32_t step) {
  return std::make_shared<AEmptySet>(sol, epsilon, step);
}

std::vector<char> boundary_certificate(const TreeSet& set, std::uint32_t d, std::uint32_t D) {
  std::vector<char> cert;
  for_each_level(d, D, [&](const TreeWord& w) { cert.push_back(set.subtree_meets(w) ? 1 : 0); });
  return cert;
}

TreeSetPtr connected_hull(TreeSetPtr set, std::uint32_t d, std::uint32_t D) {
  return std::make_shared<HullSet>(std::move(set), d, D);
}

// ---------------------------------------------------------------------------

SurvivalEstimate survival_without_visiting(const TransitionKernel& P, const OffspringLaw& law, const VertexId& x,
                                           const SubgraphSpec& A, const SubgraphSpec& B,
                                           const SimulationOptions& opt) {
  if (opt.trials < 1) throw std::invalid_argument("trials must be >= 1");
  SurvivalEstimate est;
  est.trials = opt.trials;
  const int late_from = opt.horizon / 2;
  std::uint64_t in_a = 0, in_a_no_b = 0, late = 0, late_no_b = 0;
  for (std::uint64_t t = 0; t < opt.trials; ++t) {
    auto rng = trial_rng(opt.seed, t);
    bool every = true, late_visit = false, visited_b = B.contains && B.contains(x);
    if (A.contains && A.contains(x)) est.last_visit_A = std::max(est.last_visit_A, 0);
    auto observe = [&](const ParticleGeneration& g) {
      if (g.generation == 0) return true;
      bool a = false;
      for (const auto& [v, c] : g.counts) {
        if (!a && A.contains(v)) a = true;
        if (!visited_b && B.contains && B.contains(v)) visited_b = true;
        if (a && visited_b) break;
      }
      if (!a) every = false;
      if (a) {
        est.last_visit_A = std::max(est.last_visit_A, g.generation);
        if (g.generation > late_from) late_visit = true;
      }
      return true;
    };
    const auto o = run_vertex_brw(P, law, x, opt.horizon, opt.cap, rng, observe);
    const bool survive = every && o.status != TrialStatus::extinct;
    // A cap stop ends the run early; its last observed state stands in for the rest.
    if (o.status == TrialStatus::cap_exceeded && every) late_visit = true;
    in_a += survive;
    in_a_no_b += survive && !visited_b;
    late += late_visit;
    late_no_b += late_visit && !visited_b;
    est.visited_B += visited_b;
  }
  auto fill = [&](EventEstimate& e, std::uint64_t k) {
    e.count = k;
    e.estimate = static_cast<double>(k) / static_cast<double>(opt.trials);
    e.ci = wilson_interval(k, opt.trials);
  };
  fill(est.survive_in_A, in_a);
  fill(est.survive_in_A_avoiding_B, in_a_no_b);
  fill(est.late_visit_A, late);
  fill(est.late_visit_A_avoiding_B, late_no_b);
  return est;
}

}  // namespace brw
