// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Every stochastic check runs with a pinned seed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "brwlab/brw.hpp"
#include "brwlab/fbrw.hpp"
#include "brwlab/product_lab.hpp"
#include "brwlab/spectral.hpp"
#include "brwlab/tree_lab.hpp"

using namespace brw;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Upper end of a z = 3 Wilson interval.
double upper3(std::uint64_t k, std::uint64_t n) { return wilson_interval(k, n, 3.0).hi; }

struct Fiber {
  ProductSpec spec;
  TransitionKernel P = product_kernel(spec);
  SubgraphSpec U = product_fiber(spec, 2);
  VertexId o = ProductVertex{};
};

void criterion1(Outcome& out) {
  const auto t0 = Clock::now();
  const auto s = product_spectral_summary(ProductSpec{});
  const double secs = seconds_since(t0);
  const double phi1 = 2 * std::sqrt(2.0) / 3, phi2 = 2 * std::sqrt(99.0) / 100;
  const double inv_rho = 103 / (2 * std::sqrt(2.0) + 2 * std::sqrt(99.0));
  const double rec = 103.0 * 103.0 / (200 * std::sqrt(99.0));
  out.require(std::abs(s.fiber[0].phi_U - phi1) < 1e-9, "phi_U1");
  out.require(std::abs(s.fiber[1].phi_U - phi2) < 1e-9, "phi_U2");
  out.require(std::abs(s.fiber[1].m1 - 1.03) < 1e-9, "m1(U2)");
  out.require(std::abs(s.inv_rho_G - inv_rho) < 1e-9 && std::abs(s.inv_rho_G - 4.5) < 0.05, "1/rho_G");
  out.require(std::abs(s.recurrence_mean[1] - rec) < 1e-9 && std::abs(rec - 5.33) < 0.005, "recurrence mean");
  out.require(secs < 1.0, "runtime");
  out.detail << "phi_U1=" << s.fiber[0].phi_U << " phi_U2=" << s.fiber[1].phi_U << " m1=" << s.fiber[1].m1
             << " 1/rho_G=" << s.inv_rho_G << " phi/rho^2=" << s.recurrence_mean[1] << " t=" << secs << "s";
}

void criterion2(Outcome& out) {
  const auto t0 = Clock::now();
  const auto est = spectral_radius_estimate(tree_kernel(TreeSpec::homogeneous(3)), TreeWord{}, 2000);
  const double secs = seconds_since(t0);
  const double phi = 2 * std::sqrt(2.0) / 3;
  out.require(std::abs(est.value - phi) <= 0.02 * phi, "rho(T3) within 2%");
  out.require(secs < 30.0, "runtime");
  Fiber f;
  const auto z = zeta_estimate(f.P, f.U, f.o, 2000);
  out.require(std::abs(z.value - 100.0 / 103.0) < 1e-9, "zeta(U2) within 1e-9");
  out.detail << "rho=" << est.value << " (target " << phi << ", " << secs << "s) zeta=" << z.value;
}

void criterion3(Outcome& out) {
  Fiber f;
  const FreeProductSpec fp;
  struct Case {
    const char* name;
    TransitionKernel P;
    SubgraphSpec U;
    VertexId x;
  };
  const std::vector<Case> cases = {{"fiber U2", f.P, f.U, f.o},
                                   {"free-product copy", free_product_kernel(fp), gamma2_copy(fp), GroupWord{}}};
  for (const auto& c : cases) {
    const auto s = summarize_subgraph(c.P, c.U, c.x, 2000);
    const double ratio = s.rho_U / s.phi_U;
    const double root = std::pow(stay_prob(c.P, c.U, c.x, 2000), 1.0 / 2000);
    out.require(std::abs(root - ratio) <= 0.03 * ratio, std::string(c.name) + " stay root vs rho/phi");
    const double m = 2.0;
    const auto g = mean_growth_check(c.P, c.U, OffspringLaw::geometric_with_mean(m), c.x, 200);
    const double zeta = c.U.name == f.U.name ? 100.0 / 103.0 : 0.7;
    out.require(std::abs(g.rate - m * zeta) < 1e-9, std::string(c.name) + " mean growth");
    out.detail << c.name << ": P(E_N)^(1/N)=" << root << " rho/phi=" << ratio << " growth=" << g.rate << "; ";
  }
}

void criterion4(Outcome& out) {
  const auto t0 = Clock::now();
  Fiber f;
  SimulationOptions opt;
  opt.trials = 10000;
  opt.horizon = 200;
  opt.cap = 1e6;
  const double m1 = 1.03;
  opt.seed = 401;
  const auto below = persistence_probability(f.P, f.U, OffspringLaw::geometric_with_mean(0.8 * m1), f.o, opt);
  opt.seed = 402;
  const auto above = persistence_probability(f.P, f.U, OffspringLaw::geometric_with_mean(1.25 * m1), f.o, opt);
  const double secs = seconds_since(t0);
  out.require(below.ci.hi < 0.01, "CI upper bound at 0.8 m1");
  out.require(above.ci.lo > 0.0, "CI lower bound at 1.25 m1");
  out.require(secs < 300.0, "runtime");
  out.detail << "0.8m1: " << below.persisting << "/" << below.trials << " CI [" << below.ci.lo << ", " << below.ci.hi
             << "]; 1.25m1: " << above.persisting << "/" << above.trials << " CI [" << above.ci.lo << ", "
             << above.ci.hi << "]; " << secs << "s";
}

void criterion5(Outcome& out) {
  Fiber f;
  const auto s = product_spectral_summary(f.spec).fiber[1];
  SimulationOptions opt;
  opt.horizon = 200;
  opt.cap = 1e200;
  opt.local_threshold = 10;

  out.require(classify_regime(2.0, s).regime == Regime::global_not_local, "m=2 regime");
  opt.trials = 4000;
  opt.seed = 501;
  const auto two = persistence_probability(f.P, f.U, OffspringLaw::geometric_with_mean(2.0), f.o, opt);
  const double up = upper3(two.local_tail, two.persisting);
  out.require(two.persisting > 0 && up < 0.01, "m=2 local tail < 1%");

  out.require(classify_regime(6.0, s).regime == Regime::local_possible, "m=6 regime");
  opt.trials = 2000;
  opt.seed = 502;
  const auto six = persistence_probability(f.P, f.U, OffspringLaw::geometric_with_mean(6.0), f.o, opt);
  const double p = six.local_tail_fraction;
  const double lo = p - 3 * std::sqrt(p * (1 - p) / std::max<std::uint64_t>(six.persisting, 1));
  out.require(lo > 0.0, "m=6 local tail away from 0");
  out.detail << "m=2: " << two.local_tail << "/" << two.persisting << " (3-sigma upper " << up << "); m=6: "
             << six.local_tail << "/" << six.persisting << " (3-sigma lower " << lo << ")";
}

void criterion6(Outcome& out) {
  Fiber f;
  const auto pU = restrict_kernel(f.P, f.U);
  const auto qU = normalize_kernel(pU);
  double worst = 0.0;
  for (const VertexId& y : {f.o, VertexId{ProductVertex{TreeWord{}, TreeWord{{4}}}},
                            VertexId{ProductVertex{TreeWord{}, TreeWord{{17, 3}}}}}) {
    worst = std::max(worst, kernel_identity_check(pU, qU, 100.0 / 103.0, f.o, y, 30).max_abs);
  }
  out.require(worst < 1e-12, "max deviation");
  out.detail << "max_j<=30 |q - p/zeta^j| = " << worst;
}

void criterion7(Outcome& out) {
  Fiber f;
  const auto mc = ks_martingale_check(f.P, f.U, OffspringLaw::geometric_with_mean(2.0), f.o, 30, 10000, 701);
  int outside = 0;
  for (const auto& w : mc.w) outside += !w.ci.contains(1.0);
  out.require(mc.flat, "every W_n interval contains 1");
  out.detail << "W_30=" << mc.w.back().mean << " +- " << mc.w.back().std_error << ", intervals missing 1: " << outside
             << "/" << mc.w.size();
}

void criterion8(Outcome& out) {
  Fiber f;
  const auto pU = restrict_kernel(f.P, f.U);
  const auto c = check_projection(pU, constant_projection(), f.o, 3);
  out.require(c.verdict == Verdict::pass && c.quotient.rows() == 1 &&
                  std::abs(c.quotient(0, 0) - 100.0 / 103.0) < 1e-12,
              "fiber quotient [alpha2]");

  const auto tree = TreeSpec::homogeneous(3);
  Rng rng = trial_rng(801, 0);
  auto gw = std::make_shared<GWRealization>(gw_percolate(tree, {0.7}, 8, rng));
  const auto gwU = as_subgraph(gw_cluster_set(gw), 3);
  const auto gc = check_projection(restrict_kernel(tree_kernel(tree), gwU), constant_projection(), TreeWord{}, 9);
  out.require(gc.verdict == Verdict::fail && gc.witness.has_value(), "GW witness");

  const FreeProductSpec fp;
  const auto T3 = tree_kernel(tree);
  struct Case {
    TransitionKernel P;
    SubgraphSpec U;
    VertexId x;
  };
  const std::vector<Case> cases = {
      {f.P, f.U, f.o},
      {f.P, product_fiber(f.spec, 1), f.o},
      {T3, whole_graph(T3, TreeWord{}), TreeWord{}},
      {T3, prune_tree(3, {}, true), TreeWord{}},
      {T3, as_subgraph(branching_subtree(3, TreeSpec::branching({3}, {1, 2})), 3, true), TreeWord{}},
      {free_product_kernel(fp), gamma2_copy(fp), GroupWord{}},
  };
  int held = 0;
  for (const auto& k : cases) {
    const auto s = summarize_subgraph(k.P, k.U, k.x, 2000);
    const double m1 = m1_threshold(restrict_kernel(k.P, k.U), k.x, 2000).value;
    const bool ok = s.phi_U / s.rho_U <= m1 * (1 + 1e-6) && m1 <= (1 / s.rho_U) * (1 + 1e-6);
    held += ok;
    out.require(ok, "sandwich on " + k.U.name);
  }
  out.detail << "fiber quotient " << (c.quotient.size() ? c.quotient(0, 0) : 0.0) << "; GW witness "
             << (gc.witness ? to_string(gc.witness->x) + " vs " + to_string(gc.witness->x2) : "none")
             << "; sandwich held on " << held << "/" << cases.size();
}

void criterion9(Outcome& out) {
  const auto sol = solve_extinction_recursion(0.34, 3, 60);
  out.require(sol.max_residual < 1e-10, "residual");
  bool decreasing = true;
  for (std::size_t n = 1; n < sol.a.size(); ++n) decreasing = decreasing && sol.a[n] < sol.a[n - 1];
  out.require(decreasing, "strictly decreasing");
  out.require(sol.decay_rate < 1.0 && std::abs(sol.decay_rate - sol.fast_root) < 1e-3 * sol.fast_root,
              "geometric decay");
  SimulationOptions opt;
  opt.trials = 100000;
  opt.horizon = 300;
  opt.cap = 1e6;
  opt.seed = 901;
  const auto hit = hitting_probability(tree_kernel(TreeSpec::homogeneous(3)), edge_breeding_law(0.34, 3), TreeWord{},
                                       TreeWord{{0, 0, 0}}, opt);
  out.require(hit.ci.contains(sol.a[3]), "a_3 inside the Monte Carlo CI");
  out.detail << "residual=" << sol.max_residual << " decay=" << sol.decay_rate << " a3=" << sol.a[3] << " MC "
             << hit.estimate << " CI [" << hit.ci.lo << ", " << hit.ci.hi << "] undecided=" << hit.undecided;
}

void criterion10(Outcome& out) {
  const auto T3 = TreeSpec::homogeneous(3);
  const std::vector<double> p{0.9, 0.8, 0.7};
  const int depth = 12, R = 4000;
  std::vector<std::vector<double>> frac(depth + 1);
  std::vector<double> boundary;
  for (int t = 0; t < R; ++t) {
    Rng rng = trial_rng(1001, t);
    const auto gw = gw_percolate(T3, p, depth, rng);
    for (int i = 0; i <= depth; ++i) frac[i].push_back(gw.level_counts[i] / T3.level_size(i));
    boundary.push_back(gw.boundary_estimate());
  }
  GWRealization ref;
  ref.p = p;
  int matched = 0;
  for (int i = 0; i <= depth; ++i) {
    const auto m = mean_estimate(frac[i]);
    matched += std::abs(m.mean - ref.retention_probability(i)) <= 3 * m.std_error + 1e-15;
  }
  out.require(matched == depth + 1, "retention within 3 sigma");
  const auto b = mean_estimate(boundary);
  out.require(b.mean <= ref.retention_probability(depth) + 3 * b.std_error, "boundary bound");
  int certified = 0;
  for (std::uint32_t i = 1; i <= 10; ++i) {
    std::vector<std::uint32_t> levels(i);
    for (std::uint32_t k = 0; k < i; ++k) levels[k] = 2 * k;
    certified += pruned_certificate(3, levels, 20).within_bound;
  }
  out.require(certified == 10, "pruned certificates");
  out.detail << "retention levels matched " << matched << "/" << depth + 1 << "; E[boundary]=" << b.mean
             << " bound=" << ref.retention_probability(depth) << "; pruned certificates " << certified << "/10";
}

void criterion11(Outcome& out) {
  const auto sol = solve_extinction_recursion(0.34, 3, 60);
  const auto A = construct_A_empty(sol, 0.2, 1);
  int full = 0;
  for (std::uint32_t D = 1; D <= 14; ++D) {
    const auto cert = boundary_certificate(*A, 3, D);
    full += std::all_of(cert.begin(), cert.end(), [](char c) { return c != 0; });
  }
  out.require(full == 14, "full certificates");

  SimulationOptions opt;
  opt.trials = 1000;
  opt.horizon = 300;
  opt.cap = 1e5;
  opt.seed = 1101;
  SubgraphSpec none;
  const auto est = survival_without_visiting(tree_kernel(TreeSpec::homogeneous(3)), edge_breeding_law(0.34, 3),
                                             TreeWord{}, as_subgraph(A, 3), none, opt);
  out.require(est.late_visit_A.count == 0, "no late visits to A_empty");

  Rng rng = trial_rng(1102, 0);
  auto gw = std::make_shared<GWRealization>(gw_percolate(TreeSpec::homogeneous(3), {0.6}, 10, rng));
  const std::vector<TreeSetPtr> sets = {A,
                                        ray_set({1}, {0, 1}),
                                        finite_set({TreeWord{{2, 1, 1, 0, 1}}, TreeWord{{0, 1}}}),
                                        gw_cluster_set(gw),
                                        empty_set(),
                                        union_set(ray_set({2}, {1}), subtree_set(TreeWord{{0, 0}}))};
  int good = 0;
  const std::uint32_t D = 8;
  for (const auto& s : sets) {
    const auto hull = connected_hull(s, 3, D);
    const auto hull2 = connected_hull(hull, 3, D);
    bool ok = boundary_certificate(*hull, 3, D) == boundary_certificate(*s, 3, D);
    ok = ok && boundary_certificate(*hull2, 3, D + 2) == boundary_certificate(*hull, 3, D + 2);
    for (std::uint64_t r = 0; r < 3000 && ok; ++r) {
      const auto v = tree_unrank(r, 3);
      ok = hull->contains(v) == hull2->contains(v) && (!hull->contains(v) || v.is_root() || hull->contains(v.parent()));
    }
    good += ok;
  }
  out.require(good == static_cast<int>(sets.size()), "hull properties");
  out.detail << "full certificates " << full << "/14; trials visiting A_empty late " << est.late_visit_A.count << "/"
             << est.trials << " (last visit at generation " << est.last_visit_A << "); hull checks " << good << "/"
             << sets.size();
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
      {"closed forms for T3 x T100", criterion1},
      {"spectral estimators", criterion2},
      {"stay probabilities and mean growth", criterion3},
      {"phase transition at m1", criterion4},
      {"regime trichotomy", criterion5},
      {"kernel identity", criterion6},
      {"martingale diagnostic", criterion7},
      {"F-BRW checker", criterion8},
      {"extinction recursion", criterion9},
      {"boundary measure", criterion10},
      {"counterexample sets", criterion11},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    try {
      criteria[i].second(out);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << " [exception: " << e.what() << "]";
    }
    failed += !out.pass;
    std::printf("%s %zu %s: %s\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, out.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
