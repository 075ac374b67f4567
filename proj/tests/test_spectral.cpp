#include <doctest.h>

#include <cmath>
#include <tuple>
#include <vector>

#include "brwlab/chain.hpp"
#include "brwlab/product_lab.hpp"
#include "brwlab/spectral.hpp"
#include "brwlab/tree_lab.hpp"

using namespace brw;

namespace {

// p^{(n)}(o,o) on T_d via the distance chain, in plain doubles.
std::vector<double> distance_chain_returns(std::uint32_t d, int n_max) {
  std::vector<double> p(n_max + 2, 0.0), out;
  p[0] = 1.0;
  for (int n = 0; n <= n_max; ++n) {
    out.push_back(p[0]);
    std::vector<double> q(p.size(), 0.0);
    q[1] += p[0];
    for (std::size_t k = 1; k + 1 < p.size(); ++k) {
      q[k - 1] += p[k] / d;
      q[k + 1] += p[k] * (d - 1.0) / d;
    }
    p = q;
  }
  return out;
}

const double kPhi3 = 2.0 * std::sqrt(2.0) / 3.0;

}  // namespace

TEST_CASE("T3 return probabilities: small exact values") {
  const auto P = tree_kernel(TreeSpec::homogeneous(3));
  const VertexId o = TreeWord{};
  CHECK(n_step_prob(P, o, o, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(n_step_prob(P, o, o, 3) == 0.0);
  CHECK(n_step_prob(P, o, o, 4) == doctest::Approx(5.0 / 27.0).epsilon(1e-14));
  CHECK(green_partial(P, o, o, 1.0, 4) == doctest::Approx(41.0 / 27.0).epsilon(1e-14));
  // z^j weights: 1 + z^2/3 + 5 z^4/27 at z = 1/2.
  CHECK(green_partial(P, o, o, 0.5, 4) == doctest::Approx(1.0 + 0.25 / 3.0 + 5.0 / 27.0 / 16.0).epsilon(1e-14));
}

TEST_CASE("log-domain series agree with the distance-chain oracle") {
  for (std::uint32_t d : {3u, 4u, 7u}) {
    const auto P = tree_kernel(TreeSpec::homogeneous(d));
    const auto oracle = distance_chain_returns(d, 200);
    const auto series = log_return_series(P, TreeWord{}, 200);
    for (int n = 0; n <= 200; ++n) {
      if (oracle[n] == 0.0) {
        CHECK(series[n] == kLogZero);
      } else {
        CHECK(std::exp(series[n]) == doctest::Approx(oracle[n]).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("lumped and unlumped DP agree") {
  const auto P = tree_kernel(TreeSpec::homogeneous(3));
  const auto lumped = log_return_series(P, TreeWord{}, 14, true);
  const auto plain = log_return_series(P, TreeWord{}, 14, false);
  for (int n = 0; n <= 14; ++n) {
    if (plain[n] == kLogZero)
      CHECK(lumped[n] == kLogZero);
    else
      CHECK(lumped[n] == doctest::Approx(plain[n]).epsilon(1e-12));
  }
  // Off-centre start: the lumped chain is relative to the start vertex.
  const VertexId x = TreeWord{{1, 0}};
  const auto l2 = log_mass_series(restrict_kernel(P, prune_tree(3, {}, true)), TreeWord{}, 12, true);
  const auto p2 = log_mass_series(restrict_kernel(P, prune_tree(3, {}, true)), TreeWord{}, 12, false);
  for (int n = 0; n <= 12; ++n) CHECK(l2[n] == doctest::Approx(p2[n]).epsilon(1e-12));
  CHECK(std::exp(log_return_series(P, x, 6)[6]) == doctest::Approx(n_step_prob(P, x, x, 6)).epsilon(1e-12));
}

TEST_CASE("Chapman-Kolmogorov on T3") {
  const auto P = tree_kernel(TreeSpec::homogeneous(3));
  const VertexId o = TreeWord{}, y = TreeWord{{2, 1}};
  for (int m = 1; m <= 4; ++m)
    for (int n = 1; n <= 4; ++n) {
      double sum = 0.0;
      for (const auto& [z, p] : n_step_distribution(P, o, m)) sum += p * n_step_prob(P, z, y, n);
      CHECK(sum == doctest::Approx(n_step_prob(P, o, y, m + n)).epsilon(1e-12));
    }
  const auto dist = n_step_distribution(P, o, 7);
  double total = 0.0;
  for (const auto& [z, p] : dist) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("transition series between distinct vertices") {
  const auto P = tree_kernel(TreeSpec::homogeneous(3));
  const VertexId o = TreeWord{}, y = TreeWord{{0}};
  const auto s = log_transition_series(P, o, y, 5);
  CHECK(s[0] == kLogZero);
  CHECK(std::exp(s[1]) == doctest::Approx(1.0 / 3.0));
  CHECK(std::exp(s[3]) == doctest::Approx(n_step_prob(P, o, y, 3)).epsilon(1e-12));

  // Two-point lumping against the plain DP.
  const ProductSpec small{3, 4, 0.4, 0.6};
  const auto biregular = restrict_kernel(P, as_subgraph(branching_subtree(3, TreeSpec::branching({3}, {1, 2})), 3, true));
  const std::vector<std::tuple<TransitionKernel, VertexId, VertexId>> cases = {
      {P, TreeWord{{1}}, TreeWord{{2, 1, 0}}},
      {product_kernel(small), ProductVertex{}, ProductVertex{TreeWord{{2}}, TreeWord{{0, 1}}}},
      {restrict_kernel(product_kernel(small), product_fiber(small, 2)), ProductVertex{},
       ProductVertex{TreeWord{}, TreeWord{{3, 2}}}},
      {biregular, TreeWord{}, TreeWord{{1, 0, 1}}},
  };
  for (const auto& [K, a, b] : cases) {
    const auto lumped = log_transition_series(K, a, b, 9, true);
    const auto plain = log_transition_series(K, a, b, 9, false);
    for (int n = 0; n <= 9; ++n) {
      if (plain[n] == kLogZero)
        CHECK(lumped[n] == kLogZero);
      else
        CHECK(lumped[n] == doctest::Approx(plain[n]).epsilon(1e-12));
    }
  }
}

TEST_CASE("period detection") {
  CHECK(detect_period(tree_kernel(TreeSpec::homogeneous(3)), TreeWord{}) == 2);
  const auto base = tree_kernel(TreeSpec::homogeneous(3));
  TransitionKernel lazy(
      "lazy", KernelKind::stochastic,
      [base](const VertexId& v) {
        auto row = base.neighbors(v);
        for (auto& s : row) s.prob *= 0.5;
        row.push_back({v, 0.5});
        return row;
      },
      tree_distance_key);
  CHECK(detect_period(lazy, TreeWord{}) == 1);
  const auto est = spectral_radius_estimate(lazy, TreeWord{}, 2000);
  CHECK(est.period == 1);
  CHECK(est.value == doctest::Approx(0.5 + 0.5 * kPhi3).epsilon(0.02));

  TransitionKernel drift("drift", KernelKind::stochastic, [](const VertexId& v) {
    return std::vector<Step>{{std::get<TreeWord>(v).child(0), 1.0}};
  });
  CHECK_THROWS_AS(spectral_radius_estimate(drift, TreeWord{}, 100), PeriodError);
  CHECK_THROWS_AS(spectral_radius_estimate(tree_kernel(TreeSpec::homogeneous(3)), TreeWord{}, 3), std::invalid_argument);
}

TEST_CASE("spectral radius of homogeneous trees") {
  for (std::uint32_t d : {3u, 4u, 10u}) {
    const auto est = spectral_radius_estimate(tree_kernel(TreeSpec::homogeneous(d)), TreeWord{}, 2000);
    CHECK(est.lumped);
    CHECK(est.period == 2);
    CHECK(est.value == doctest::Approx(2.0 * std::sqrt(d - 1.0) / d).epsilon(0.02));
    CHECK(est.value <= 2.0 * std::sqrt(d - 1.0) / d + 1e-12);
  }
}

TEST_CASE("stay probabilities on a product fiber are an exact power law") {
  const ProductSpec spec;
  const auto P = product_kernel(spec);
  const auto U = product_fiber(spec, 2);
  for (int N : {1, 5, 40, 300})
    CHECK(stay_prob(P, U, ProductVertex{}, N) == doctest::Approx(std::pow(100.0 / 103.0, N)).epsilon(1e-11));
  const auto z = zeta_estimate(P, U, ProductVertex{}, 2000);
  CHECK(std::abs(z.value - 100.0 / 103.0) < 1e-9);
  CHECK_FALSE(z.underflow_depth);
  // The other fiber stays with probability alpha1 = 3/103 per step.
  CHECK(zeta_estimate(P, product_fiber(spec, 1), ProductVertex{}, 400).value ==
        doctest::Approx(3.0 / 103.0).epsilon(1e-9));
}

TEST_CASE("stay probability of the doubly infinite line inside T3") {
  // Pruning the last child everywhere leaves two rays through o: a line with
  // every row summing to 2/3, so rho_U = 2/3, phi_U = 1.
  const auto P = tree_kernel(TreeSpec::homogeneous(3));
  const auto U = prune_tree(3, {}, true);
  const auto s = summarize_subgraph(P, U, TreeWord{}, 2000);
  CHECK(s.zeta == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
  CHECK(s.phi_U == doctest::Approx(1.0).epsilon(0.02));
  CHECK(s.rho_U == doctest::Approx(2.0 / 3.0).epsilon(0.02));
  CHECK(s.m1 == doctest::Approx(1.5).epsilon(0.02));
  CHECK(s.rho_U <= s.phi_U);
}

TEST_CASE("Q_U identity on a fiber") {
  const ProductSpec spec;
  const auto P = product_kernel(spec);
  const auto U = product_fiber(spec, 2);
  const auto pU = restrict_kernel(P, U);
  const auto qU = normalize_kernel(pU);
  const VertexId o = ProductVertex{};
  const VertexId y = ProductVertex{TreeWord{}, TreeWord{{4}}};
  const double zeta = 100.0 / 103.0;
  for (const auto& target : {o, y}) {
    const auto c = kernel_identity_check(pU, qU, zeta, o, target, 30);
    CHECK(c.max_abs < 1e-12);
  }
  const auto wrong = kernel_identity_check(pU, qU, zeta / 2.0, o, y, 30);
  CHECK(wrong.max_rel > 0.5);
}

TEST_CASE("Q_U identity needs constant row sums") {
  const auto P = tree_kernel(TreeSpec::homogeneous(3));
  const auto U = as_subgraph(branching_subtree(3, TreeSpec::branching({3}, {1})), 3, true);
  const auto pU = restrict_kernel(P, U);
  CHECK_THROWS_AS(kernel_identity_check(pU, normalize_kernel(pU), 2.0 / 3.0, TreeWord{}, TreeWord{}, 10),
                  TransitivityError);
}

TEST_CASE("make_summary derives zeta and m1") {
  const auto s = make_summary(0.5, 0.8, 2, 0, EstimateMethod::closed_form);
  CHECK(s.zeta == doctest::Approx(0.625));
  CHECK(s.m1 == doctest::Approx(1.6));
  CHECK(to_string(s.method) == "closed_form");
}
