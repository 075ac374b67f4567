#include "brwlab/offspring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "brwlab/kernel.hpp"

namespace brw {

namespace {

constexpr std::uint64_t kPowerPartial = 1000000;
constexpr std::size_t kPowerTable = 100000;

double power_term(double n, double a, double b) { return std::exp(-a * std::log(n) - b * std::log(std::log(n))); }

std::string num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

OffspringLaw OffspringLaw::from_pmf(std::vector<double> pmf) {
  if (pmf.empty()) throw SpecError("offspring pmf is empty");
  double sum = 0.0, mean = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    if (!(pmf[k] >= 0.0)) throw SpecError("offspring pmf has a negative entry");
    sum += pmf[k];
    mean += static_cast<double>(k) * pmf[k];
  }
  if (std::abs(sum - 1.0) > kRowTolerance) throw SpecError("offspring pmf sums to " + num(sum) + ", not 1");
  while (pmf.size() > 1 && pmf.back() == 0.0) pmf.pop_back();
  OffspringLaw law;
  law.kind_ = LawKind::explicit_pmf;
  law.mean_ = mean;
  std::ostringstream os;
  os << "pmf[";
  for (std::size_t k = 0; k < pmf.size(); ++k) os << (k ? "," : "") << num(pmf[k]);
  os << ']';
  law.label_ = os.str();
  law.pmf_ = std::move(pmf);
  return law;
}

OffspringLaw OffspringLaw::point_mass(std::uint32_t k) {
  OffspringLaw law;
  law.kind_ = LawKind::point_mass;
  law.pmf_.assign(k + 1, 0.0);
  law.pmf_[k] = 1.0;
  law.mean_ = k;
  law.label_ = "point(" + std::to_string(k) + ")";
  return law;
}

OffspringLaw OffspringLaw::edge_breeding(double lambda, std::uint32_t degree) {
  if (!(lambda > 0.0)) throw SpecError("edge-breeding rate must be positive");
  if (degree < 1) throw SpecError("edge-breeding degree must be >= 1");
  OffspringLaw law;
  law.kind_ = LawKind::edge_breeding;
  law.r_ = lambda * degree;
  law.mean_ = law.r_;
  law.label_ = "edge(lambda=" + num(lambda) + ",d=" + std::to_string(degree) + ")";
  return law;
}

OffspringLaw OffspringLaw::geometric_with_mean(double m) {
  if (!(m > 0.0)) throw SpecError("geometric mean must be positive");
  OffspringLaw law;
  law.kind_ = LawKind::geometric;
  law.r_ = m;
  law.mean_ = m;
  law.label_ = "geom(m=" + num(m) + ")";
  return law;
}

OffspringLaw OffspringLaw::power_log_tail(double a, double b) {
  if (!(a > 2.0 || (a == 2.0 && b > 1.0))) throw SpecError("power-log law needs a finite mean (a > 2, or a = 2 and b > 1)");
  OffspringLaw law;
  law.kind_ = LawKind::power_log_tail;
  law.a_ = a;
  law.b_ = b;
  double z = 0.0, m = 0.0;
  for (std::uint64_t n = 2; n <= kPowerPartial; ++n) {
    const double t = power_term(static_cast<double>(n), a, b);
    z += t;
    m += static_cast<double>(n) * t;
  }
  // Integral approximations of the two tails beyond the partial range.
  const double K = static_cast<double>(kPowerPartial), L = std::log(K);
  z += std::pow(L, -b) * std::pow(K, 1.0 - a) / (a - 1.0);
  m += a > 2.0 ? std::pow(L, -b) * std::pow(K, 2.0 - a) / (a - 2.0) : std::pow(L, 1.0 - b) / (b - 1.0);
  law.log_norm_ = std::log(z);
  law.mean_ = m / z;
  law.label_ = "powerlog(a=" + num(a) + ",b=" + num(b) + ")";
  law.build_power_table();
  return law;
}

void OffspringLaw::build_power_table() {
  auto cdf = std::make_shared<std::vector<double>>(kPowerTable + 1, 0.0);
  double acc = 0.0;
  for (std::size_t n = 2; n <= kPowerTable; ++n) {
    acc += pmf(n);
    (*cdf)[n] = acc;
  }
  cdf_ = std::move(cdf);
}

double OffspringLaw::pmf(std::uint64_t n) const {
  switch (kind_) {
    case LawKind::explicit_pmf:
    case LawKind::point_mass:
      return n < pmf_.size() ? pmf_[n] : 0.0;
    case LawKind::edge_breeding:
    case LawKind::geometric:
      return std::exp(static_cast<double>(n) * std::log(r_) - static_cast<double>(n + 1) * std::log1p(r_));
    case LawKind::power_log_tail:
      return n < 2 ? 0.0 : std::exp(-a_ * std::log(double(n)) - b_ * std::log(std::log(double(n))) - log_norm_);
  }
  return 0.0;
}

std::string OffspringLaw::describe() const { return label_; }

std::uint64_t OffspringLaw::sample(Rng& rng) const {
  switch (kind_) {
    case LawKind::point_mass:
      return pmf_.size() - 1;
    case LawKind::explicit_pmf: {
      std::discrete_distribution<std::uint64_t> dd(pmf_.begin(), pmf_.end());
      return dd(rng);
    }
    case LawKind::edge_breeding:
    case LawKind::geometric: {
      std::geometric_distribution<std::uint64_t> g(1.0 / (1.0 + r_));
      return g(rng);
    }
    case LawKind::power_log_tail: {
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const auto& cdf = *cdf_;
      if (u < cdf.back()) return static_cast<std::uint64_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      const double v = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const double x = static_cast<double>(kPowerTable) * std::pow(1.0 - v, -1.0 / (a_ - 1.0));
      return static_cast<std::uint64_t>(std::min(x, 1e18));
    }
  }
  return 0;
}

double OffspringLaw::sample_total(Rng& rng, double count) const {
  if (count <= 0.0) return 0.0;
  switch (kind_) {
    case LawKind::point_mass:
      return count * static_cast<double>(pmf_.size() - 1);
    case LawKind::explicit_pmf: {
      // Multinomial split of the particles over the atoms.
      double left = count, mass = 1.0, total = 0.0;
      for (std::size_t k = 0; k < pmf_.size() && left > 0.0; ++k) {
        const double p = mass > 0.0 ? std::min(1.0, pmf_[k] / mass) : 1.0;
        const double here = k + 1 == pmf_.size() ? left : sample_binomial(rng, left, p);
        total += here * static_cast<double>(k);
        left -= here;
        mass -= pmf_[k];
      }
      return total;
    }
    case LawKind::edge_breeding:
    case LawKind::geometric:
      return sample_negative_binomial(rng, count, 1.0 / (1.0 + r_));
    case LawKind::power_log_tail: {
      double total = 0.0;
      for (double i = 0; i < count; i += 1.0) total += static_cast<double>(sample(rng));
      return total;
    }
  }
  return 0.0;
}

std::string to_string(MomentStatus s) {
  switch (s) {
    case MomentStatus::finite:
      return "finite";
    case MomentStatus::infinite:
      return "infinite";
    case MomentStatus::indeterminate:
      return "indeterminate";
  }
  return "?";
}

MomentCheck l2logl_check(const OffspringLaw& law, std::uint64_t truncation) {
  auto term = [&law](std::uint64_t n) {
    const double x = static_cast<double>(n);
    return law.pmf(n) * x * x * std::log(x);
  };
  MomentCheck out;
  switch (law.kind()) {
    case LawKind::explicit_pmf:
    case LawKind::point_mass: {
      for (std::uint64_t n = 2; n < law.atoms().size(); ++n) out.partial_sum += term(n);
      out.truncation = law.atoms().size() - 1;
      return out;
    }
    case LawKind::edge_breeding:
    case LawKind::geometric: {
      const double q = law.ratio() / (1.0 + law.ratio());
      std::uint64_t T = std::max<std::uint64_t>(truncation, 2);
      for (;;) {
        const double t = static_cast<double>(T);
        const double R = q * (1 + 1 / t) * (1 + 1 / t) * std::log(t + 1) / std::log(t);
        if (R < 1.0) {
          out.tail_bound = term(T + 1) / (1.0 - R);
          if (out.tail_bound < 1e-9) break;
        }
        if (T > (1ull << 40)) {
          out.status = MomentStatus::indeterminate;
          break;
        }
        T *= 2;
      }
      out.truncation = T;
      for (std::uint64_t n = 2; n <= T; ++n) out.partial_sum += term(n);
      return out;
    }
    case LawKind::power_log_tail: {
      const double a = law.tail_a(), b = law.tail_b();
      const std::uint64_t T = std::max<std::uint64_t>(truncation, 3);
      out.truncation = T;
      for (std::uint64_t n = 2; n <= T; ++n) out.partial_sum += term(n);
      // Terms behave like n^{2-a} (log n)^{1-b}: integral test.
      if (a < 3.0 || (a == 3.0 && b <= 2.0)) {
        out.status = MomentStatus::infinite;
        out.tail_bound = HUGE_VAL;
        return out;
      }
      const double t = static_cast<double>(T), L = std::log(t);
      const double c = law.pmf(T) * std::pow(t, a) * std::pow(L, b);  // 1 / normalizer
      if (a == 3.0) {
        if (L <= 0.0) {
          out.status = MomentStatus::indeterminate;
          return out;
        }
        out.tail_bound = c * std::pow(L, 2.0 - b) / (b - 2.0);
      } else {
        // (log x)^{1-b} <= (log T)^{1-b} (x/T)^s with s = max(0, (1-b)/log T).
        const double s = std::max(0.0, (1.0 - b) / L);
        if (a - 3.0 <= s || (b < 1.0 && L <= (1.0 - b) / (a - 2.0))) {
          out.status = MomentStatus::indeterminate;
          return out;
        }
        out.tail_bound = c * std::pow(L, 1.0 - b) * std::pow(t, 3.0 - a) / (a - 3.0 - s);
      }
      return out;
    }
  }
  return out;
}

}  // namespace brw
