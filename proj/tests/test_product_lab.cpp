#include <doctest.h>

#include <cmath>
#include <random>

#include "brwlab/chain.hpp"
#include "brwlab/product_lab.hpp"
#include "brwlab/stats.hpp"

using namespace brw;

namespace {

double phi(double d) { return 2.0 * std::sqrt(d - 1.0) / d; }

GroupWord random_word(const FreeProductSpec& spec, std::mt19937_64& rng, int steps) {
  GroupWord w;
  for (int i = 0; i < steps; ++i) {
    const std::uint8_t f = 1 + rng() % 2;
    const auto& g = spec.factor(f);
    w = multiply(spec, w, f, g.gens[rng() % g.gens.size()]);
  }
  return w;
}

}  // namespace

TEST_CASE("closed forms for T3 x T100") {
  const auto s = product_spectral_summary(ProductSpec{});
  CHECK(s.phi[0] == doctest::Approx(phi(3)));
  CHECK(s.phi[1] == doctest::Approx(phi(100)));
  CHECK(s.rho_G == doctest::Approx((2 * std::sqrt(2.0) + 2 * std::sqrt(99.0)) / 103.0).epsilon(1e-14));
  CHECK(s.inv_rho_G == doctest::Approx(4.5318).epsilon(1e-4));
  CHECK(s.fiber[1].zeta == doctest::Approx(100.0 / 103.0));
  CHECK(s.fiber[1].m1 == doctest::Approx(1.03));
  CHECK(s.fiber[1].rho_U == doctest::Approx(100.0 / 103.0 * phi(100)));
  CHECK(s.fiber[0].m1 == doctest::Approx(103.0 / 3.0));
  CHECK(s.recurrence_mean[1] == doctest::Approx(103.0 * 103.0 / (200.0 * std::sqrt(99.0))).epsilon(1e-12));
  CHECK(s.recurrence_mean[1] == doctest::Approx(5.3312).epsilon(1e-4));
  CHECK_THROWS_AS(ProductSpec({3, 4, 0.5, 0.6}).validate(), SpecError);
}

TEST_CASE("binomial convolution agrees with the chain DP") {
  const ProductSpec spec{3, 4, 0.4, 0.6};
  const auto conv = product_log_returns(spec, 10);
  const auto lumped = log_return_series(product_kernel(spec), ProductVertex{}, 10, true);
  const auto plain = log_return_series(product_kernel(spec), ProductVertex{}, 6, false);
  for (int n = 0; n <= 10; ++n) {
    CAPTURE(n);
    if (lumped[n] == kLogZero) {
      CHECK(conv[n] == kLogZero);
      continue;
    }
    CHECK(conv[n] == doctest::Approx(lumped[n]).epsilon(1e-12));
    if (n <= 6) CHECK(conv[n] == doctest::Approx(plain[n]).epsilon(1e-12));
  }
}

TEST_CASE("DP estimates match the closed forms") {
  for (const auto& spec : {ProductSpec{}, ProductSpec{4, 4, 0.5, 0.5}}) {
    const auto exact = product_spectral_summary(spec);
    const auto dp = product_dp_check(spec, 2000);
    CAPTURE(spec.d1);
    CAPTURE(spec.d2);
    CHECK(dp.rho_G == doctest::Approx(exact.rho_G).epsilon(0.02));
    CHECK(dp.rho_G <= exact.rho_G + 1e-12);
    for (int f = 0; f < 2; ++f) {
      CHECK(dp.zeta[f] == doctest::Approx(exact.fiber[f].zeta).epsilon(1e-9));
      CHECK(dp.fiber[f].rho_U == doctest::Approx(exact.fiber[f].rho_U).epsilon(0.02));
      CHECK(dp.fiber[f].phi_U == doctest::Approx(exact.fiber[f].phi_U).epsilon(0.02));
    }
  }
}

TEST_CASE("transient windows") {
  const ProductSpec spec;
  const auto w2 = transient_window(spec, 2);
  CHECK_FALSE(w2.empty());
  CHECK(w2.lo == doctest::Approx(1.03));
  CHECK(w2.hi == doctest::Approx(4.5318).epsilon(1e-4));
  CHECK(transient_window(spec, 1).empty());
}

TEST_CASE("fibers contain exactly the expected pairs") {
  const ProductSpec spec;
  const ProductVertex base{TreeWord{{1}}, TreeWord{{7, 3}}};
  const auto U2 = product_fiber(spec, 2, base);
  const auto U1 = product_fiber(spec, 1, base);
  CHECK(U2.contains(ProductVertex{TreeWord{{1}}, TreeWord{}}));
  CHECK_FALSE(U2.contains(ProductVertex{TreeWord{}, TreeWord{{7, 3}}}));
  CHECK(U1.contains(ProductVertex{TreeWord{}, TreeWord{{7, 3}}}));
  CHECK_FALSE(U1.contains(ProductVertex{TreeWord{{1}}, TreeWord{}}));
  CHECK(product_distance_key(base, ProductVertex{TreeWord{}, TreeWord{{7}}}) == ((1LL << 32) | 1));
}

TEST_CASE("free-product words: group laws on random samples") {
  for (const auto& spec : {FreeProductSpec{}, FreeProductSpec{FactorGroup::cyclic(5), FactorGroup::free_group(1), 0.5},
                           FreeProductSpec{FactorGroup::cyclic(3), FactorGroup::cyclic(4), 0.4}}) {
    CAPTURE(spec.g1.describe());
    std::mt19937_64 rng(13);
    for (int i = 0; i < 100000 / 3; ++i) {
      const auto a = random_word(spec, rng, 1 + rng() % 12);
      const auto b = random_word(spec, rng, 1 + rng() % 12);
      const auto c = random_word(spec, rng, 1 + rng() % 6);
      validate_word(spec, a);
      const auto ab = multiply(spec, a, b);
      validate_word(spec, ab);
      if (!multiply(spec, a, inverse(spec, a)).is_identity()) FAIL("w w^-1 != e for " << to_string(a));
      if (inverse(spec, inverse(spec, a)) != a) FAIL("inverse is not an involution on " << to_string(a));
      if (multiply(spec, ab, c) != multiply(spec, a, multiply(spec, b, c))) FAIL("associativity fails");
      if (inverse(spec, ab) != multiply(spec, inverse(spec, b), inverse(spec, a))) FAIL("(ab)^-1 != b^-1 a^-1");
    }
  }
}

TEST_CASE("non-reduced words are rejected") {
  const FreeProductSpec spec;
  CHECK_THROWS_AS(validate_word(spec, GroupWord{{{2, 1}, {2, -1}}}), EncodingError);
  CHECK_THROWS_AS(validate_word(spec, GroupWord{{{1, 1}, {1, 1}}}), EncodingError);
  CHECK_THROWS_AS(validate_word(spec, GroupWord{{{1, 0}}}), EncodingError);
  CHECK_THROWS_AS(validate_word(spec, GroupWord{{{2, 3}}}), EncodingError);
  CHECK_THROWS_AS(validate_word(spec, GroupWord{{{3, 1}}}), EncodingError);
  CHECK_NOTHROW(validate_word(spec, GroupWord{{{2, 1}, {2, 1}, {1, 1}, {2, -2}}}));
  CHECK(multiply(spec, GroupWord{{{1, 1}}}, 1, 1).is_identity());
}

TEST_CASE("factor groups") {
  CHECK(FactorGroup::parse("Z2").gens == std::vector<std::int32_t>{1});
  CHECK(FactorGroup::parse("Z5").gens.size() == 2);
  CHECK(FactorGroup::parse("F2").gens.size() == 4);
  CHECK(FactorGroup::parse("F2").uniform_symmetric());
  CHECK(FactorGroup::parse("Z7").inverse(3) == 4);
  CHECK(FactorGroup::parse("F3").inverse(-2) == 2);
  for (const char* bad : {"", "Z1", "F0", "G3", "Zx", "F"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(FactorGroup::parse(bad), SpecError);
  }
  CHECK_THROWS_AS((FreeProductSpec{FactorGroup::cyclic(2), FactorGroup::free_group(2), 1.0}.validate()), SpecError);
}

TEST_CASE("free-product kernel rows and the copy of F2") {
  const FreeProductSpec spec;
  const auto P = free_product_kernel(spec);
  double total = 0.0;
  for (const auto& s : P.neighbors(GroupWord{{{2, 1}}})) total += s.prob;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));

  const auto U = gamma2_copy(spec);
  CHECK(U.contains(GroupWord{{{2, 1}, {2, 2}}}));
  CHECK_FALSE(U.contains(GroupWord{{{1, 1}}}));
  REQUIRE(U.radial_key);
  const auto pU = restrict_kernel(P, U);
  const auto l = log_mass_series(pU, GroupWord{}, 10, true);
  const auto p = log_mass_series(pU, GroupWord{}, 10, false);
  for (int n = 0; n <= 10; ++n) CHECK(l[n] == doctest::Approx(p[n]).epsilon(1e-12));
  const auto r = log_return_series(pU, GroupWord{}, 10, true);
  const auto rp = log_return_series(pU, GroupWord{}, 10, false);
  for (int n = 0; n <= 10; n += 2) CHECK(r[n] == doctest::Approx(rp[n]).epsilon(1e-12));
}

TEST_CASE("free-product thresholds") {
  const auto t = free_product_thresholds(FreeProductSpec{}, 200);
  CHECK(t.zeta == 0.7);
  CHECK(t.zeta_stay == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(t.zeta_dp == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(t.m0 == doctest::Approx(1.0 / 0.7));
  CHECK(t.m1 == doctest::Approx(1.0 / 0.7));
}
