#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "brwlab/tree_lab.hpp"

using namespace brw;

namespace {

// Minimal solution of a_n = λS/(1+λS), S = a_{n-1} + (d-1) a_{n+1}, a_0 = 1,
// by monotone iteration from zero on a truncated range with a_N = 0.
std::vector<double> fixed_point_oracle(double lambda, std::uint32_t d, int N) {
  std::vector<double> a(N + 1, 0.0);
  a[0] = 1.0;
  for (int iter = 0; iter < 200000; ++iter) {
    double change = 0.0;
    for (int n = 1; n < N; ++n) {
      const double S = a[n - 1] + (d - 1.0) * a[n + 1];
      const double next = lambda * S / (1 + lambda * S);
      change = std::max(change, std::abs(next - a[n]));
      a[n] = next;
    }
    if (change < 1e-16) break;
  }
  return a;
}

void for_each_word(std::uint32_t d, std::uint32_t depth, const std::function<void(const TreeWord&)>& f) {
  std::function<void(TreeWord&)> rec = [&](TreeWord& w) {
    f(w);
    if (w.depth() == depth) return;
    for (std::uint32_t c = 0; c < (w.is_root() ? d : d - 1); ++c) {
      w.path.push_back(c);
      rec(w);
      w.path.pop_back();
    }
  };
  TreeWord root;
  rec(root);
}

// Brute-force count of set members at depth D.
std::uint64_t brute_level_count(const TreeSet& s, std::uint32_t d, std::uint32_t D) {
  std::uint64_t n = 0;
  for_each_word(d, D, [&](const TreeWord& w) { n += w.depth() == D && s.contains(w); });
  return n;
}

}  // namespace

TEST_CASE("boundary measure of cylinders") {
  const auto T3 = TreeSpec::homogeneous(3);
  CHECK(boundary_measure(T3, TreeWord{}) == 1.0);
  CHECK(boundary_measure(T3, TreeWord{{2}}) == doctest::Approx(1.0 / 3.0));
  CHECK(boundary_measure(T3, TreeWord{{2, 1, 0}}) == doctest::Approx(1.0 / 12.0));
  CHECK_THROWS_AS(boundary_measure(T3, TreeWord{{0, 2}}), EncodingError);
}

TEST_CASE("GW retention frequencies match the product of p_j") {
  const auto T3 = TreeSpec::homogeneous(3);
  const std::vector<double> p{0.9, 0.8, 0.7};
  const int depth = 12, R = 3000;
  std::vector<std::vector<double>> frac(depth + 1);
  std::vector<double> boundary;
  for (int t = 0; t < R; ++t) {
    Rng rng = trial_rng(2024, t);
    const auto gw = gw_percolate(T3, p, depth, rng);
    CHECK(gw.contains(TreeWord{}));
    for (int i = 0; i <= depth; ++i) frac[i].push_back(gw.level_counts[i] / T3.level_size(i));
    boundary.push_back(gw.boundary_estimate());
  }
  GWRealization ref;
  ref.p = p;
  for (int i = 0; i <= depth; ++i) {
    const auto m = mean_estimate(frac[i]);
    CAPTURE(i);
    CHECK(std::abs(m.mean - ref.retention_probability(i)) <= 3 * m.std_error + 1e-15);
  }
  const auto b = mean_estimate(boundary);
  CHECK(b.mean <= ref.retention_probability(depth) + 3 * b.std_error);
}

TEST_CASE("GW clusters are prefix-closed") {
  const auto T3 = TreeSpec::homogeneous(3);
  Rng rng = trial_rng(5, 0);
  auto gw = std::make_shared<GWRealization>(gw_percolate(T3, {0.75}, 9, rng));
  const auto set = gw_cluster_set(gw);
  for (const auto& w : gw->retained) {
    if (!w.is_root()) CHECK(gw->contains(w.parent()));
    CHECK(set->subtree_meets(w));
  }
  for (int i = 0; i <= 9; ++i) CHECK(level_count(*set, 3, i) == gw->level_counts[i]);
}

TEST_CASE("pruned-tree certificates are exact") {
  for (std::uint32_t d : {3u, 4u}) {
    for (std::uint32_t i = 1; i <= 10; ++i) {
      std::vector<std::uint32_t> levels(i);
      for (std::uint32_t k = 0; k < i; ++k) levels[k] = k;
      const std::uint32_t D = d == 3 ? 12 : 10;
      const auto cert = pruned_certificate(d, levels, D);
      CAPTURE(d);
      CAPTURE(i);
      CHECK(cert.within_bound);
      CHECK(cert.count * std::pow(d / (d - 1.0), cert.levels) <= cert.level_size * (1 + 1e-12));
    }
  }
  // Brute force on a small instance with non-consecutive levels.
  const auto set = pruned_tree(3, {1, 3});
  CHECK(level_count(*set, 3, 6) == brute_level_count(*set, 3, 6));
  CHECK(pruned_certificate(3, {1, 3}, 6).count == brute_level_count(*set, 3, 6));
  CHECK_THROWS_AS(pruned_tree(3, {3, 1}), SpecError);
}

TEST_CASE("edge-breeding regimes") {
  CHECK(edge_breeding_regime(0.30, 3) == EdgeRegime::global_extinction);
  CHECK(edge_breeding_regime(1.0 / 3.0, 3) == EdgeRegime::global_extinction);
  CHECK(edge_breeding_regime(0.34, 3) == EdgeRegime::global_survival_local_extinction);
  CHECK(edge_breeding_regime(1.0 / (2.0 * std::sqrt(2.0)), 3) == EdgeRegime::global_survival_local_extinction);
  CHECK(edge_breeding_regime(0.36, 3) == EdgeRegime::local_survival);
  CHECK(edge_breeding_law(0.34, 3).mean() == doctest::Approx(1.02));
}

TEST_CASE("extinction recursion against the fixed-point oracle") {
  for (const auto& [lambda, d] : std::vector<std::pair<double, std::uint32_t>>{{0.34, 3}, {0.35, 3}, {0.27, 4}}) {
    CAPTURE(lambda);
    const auto sol = solve_extinction_recursion(lambda, d, 60);
    const auto oracle = fixed_point_oracle(lambda, d, 400);
    for (int n = 0; n <= 12 && n < static_cast<int>(sol.a.size()); ++n)
      CHECK(sol.a[n] == doctest::Approx(oracle[n]).epsilon(1e-8));
    CHECK(sol.max_residual < 1e-10);
    for (std::size_t n = 1; n < sol.a.size(); ++n) CHECK(sol.a[n] < sol.a[n - 1]);
    CHECK(sol.decay_rate == doctest::Approx(sol.fast_root).epsilon(1e-3));
    CHECK(sol.decay_rate < 1.0);
  }
  const auto sol = solve_extinction_recursion(0.34, 3, 60);
  CHECK(sol.a1 == doctest::Approx(0.29771143776261586).epsilon(1e-12));
  CHECK(sol.fast_root == doctest::Approx((1 / 0.34 - std::sqrt(1 / (0.34 * 0.34) - 8)) / 4));
  CHECK_THROWS_AS(solve_extinction_recursion(0.5, 3, 60), SpecError);
  CHECK_THROWS_AS(solve_extinction_recursion(0.3, 3, 60), SpecError);
  CHECK_THROWS_AS(solve_extinction_recursion(0.34, 2, 60), SpecError);
}

TEST_CASE("BFS rank and unrank are inverse") {
  for (std::uint32_t d : {3u, 5u}) {
    for (std::uint64_t r = 0; r < 5000; ++r) CHECK(tree_rank(tree_unrank(r, d), d) == r);
  }
  CHECK(tree_unrank(0, 3).is_root());
  CHECK(tree_unrank(1, 3) == TreeWord{{0}});
  CHECK(tree_unrank(4, 3) == TreeWord{{0, 0}});
  CHECK(tree_rank(TreeWord(std::vector<std::uint32_t>(200, 1)), 3) == UINT64_MAX);
}

TEST_CASE("A_empty: parameters, points and density") {
  const auto sol = solve_extinction_recursion(0.34, 3, 60);
  const auto A = construct_A_empty(sol, 0.1, 1);
  const auto& p = A->params();
  CHECK(p.certified_sum < 0.1);
  for (std::size_t n = 1; n < sol.a.size(); ++n) CHECK(sol.a[n] <= p.c * std::pow(p.delta, n) * (1 + 1e-12));
  for (std::uint64_t i = 1; i < 200; ++i) {
    const auto x = A->point(i);
    CHECK(x.depth() == p.r0 + i * p.step);
    CHECK(A->contains(x));
    CHECK(is_prefix(tree_unrank(i, 3), x));
  }
  CHECK_FALSE(A->contains(TreeWord{}));
  for (std::uint32_t D = 1; D <= 14; ++D) {
    const auto cert = boundary_certificate(*A, 3, D);
    CHECK(std::count(cert.begin(), cert.end(), 1) == static_cast<long>(cert.size()));
  }
}

TEST_CASE("subtree tests agree with brute force on finite depth") {
  const auto sol = solve_extinction_recursion(0.34, 3, 60);
  const auto A = construct_A_empty(sol, 0.9, 2);
  std::vector<TreeSetPtr> sets = {
      ray_set({1}, {0, 1}), finite_set({TreeWord{{2, 1, 1}}, TreeWord{{0}}}), subtree_set(TreeWord{{1, 0}}),
      pruned_tree(3, {0, 2}), union_set(ray_set({2}, {1}), subtree_set(TreeWord{{0, 1}})),
      branching_subtree(3, TreeSpec::branching({2}, {1}))};
  const std::uint32_t H = 9;
  for (const auto& s : sets) {
    CAPTURE(s->describe());
    // Members up to depth H; a vertex whose subtree meets the set within H must pass subtree_meets.
    for_each_word(3, 5, [&](const TreeWord& v) {
      bool found = false;
      for_each_word(3, H, [&](const TreeWord& w) { found = found || (is_prefix(v, w) && s->contains(w)); });
      if (found) CHECK(s->subtree_meets(v));
    });
  }
  CHECK(A->subtree_meets(TreeWord{{2, 1, 1, 0}}));
  CHECK_FALSE(empty_set()->subtree_meets(TreeWord{}));
}

TEST_CASE("connected hull is idempotent, connected and boundary preserving") {
  const auto sol = solve_extinction_recursion(0.34, 3, 60);
  Rng rng = trial_rng(77, 0);
  auto gw = std::make_shared<GWRealization>(gw_percolate(TreeSpec::homogeneous(3), {0.6}, 10, rng));
  std::vector<TreeSetPtr> sets = {construct_A_empty(sol, 0.5, 1),
                                  ray_set({1}, {0, 1}),
                                  finite_set({TreeWord{{2, 1, 1, 0, 1}}, TreeWord{{0, 1}}}),
                                  subtree_set(TreeWord{{1, 0}}),
                                  gw_cluster_set(gw),
                                  empty_set(),
                                  union_set(ray_set({2}, {1}), finite_set({TreeWord{{0, 0, 0}}}))};
  for (std::uint32_t D : {4u, 7u}) {
    for (const auto& s : sets) {
      CAPTURE(s->describe());
      CAPTURE(D);
      const auto hull = connected_hull(s, 3, D);
      const auto hull2 = connected_hull(hull, 3, D);
      CHECK(boundary_certificate(*hull, 3, D) == boundary_certificate(*s, 3, D));
      for_each_word(3, D + 3, [&](const TreeWord& v) {
        CHECK(hull->contains(v) == hull2->contains(v));
        if (hull->contains(v) && !v.is_root()) CHECK(hull->contains(v.parent()));
      });
      CHECK(hull->contains(TreeWord{}));
    }
  }
}

TEST_CASE("A_empty is visited finitely often by the edge-breeding BRW") {
  const auto sol = solve_extinction_recursion(0.34, 3, 60);
  const auto A = construct_A_empty(sol, 0.2, 1);
  SubgraphSpec none;
  SimulationOptions opt;
  opt.trials = 300;
  opt.horizon = 200;
  opt.cap = 1e5;
  opt.seed = 12;
  const auto est = survival_without_visiting(tree_kernel(TreeSpec::homogeneous(3)), edge_breeding_law(0.34, 3),
                                             TreeWord{}, as_subgraph(A, 3), none, opt);
  CHECK(est.trials == 300);
  CHECK(est.survive_in_A.count == 0);
  CHECK(est.late_visit_A.count == 0);
  CHECK(est.visited_B == 0);
}
