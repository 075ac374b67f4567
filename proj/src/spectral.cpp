#include "brwlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "brwlab/stats.hpp"

namespace brw {

namespace {

int period_of(const std::vector<double>& log_returns, int depth) {
  int g = 0;
  const int top = std::min<int>(depth, static_cast<int>(log_returns.size()) - 1);
  for (int n = 1; n <= top; ++n)
    if (log_returns[n] != kLogZero) g = std::gcd(g, n);
  return g;
}

// Fit over the last half (at least two points) of the given abscissae.
double top_half_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t k = xs.size();
  const std::size_t start = std::min(k / 2, k - 2);
  std::vector<double> x(xs.begin() + start, xs.end()), y(ys.begin() + start, ys.end());
  return fit_line(x, y).slope;
}

}  // namespace

int detect_period(const TransitionKernel& kernel, const VertexId& x, int depth) {
  const int g = period_of(log_return_series(kernel, x, depth), depth);
  if (g == 0)
    throw PeriodError("no return to " + to_string(x) + " within " + std::to_string(depth) + " steps under " +
                      kernel.name());
  return g;
}

double radius_from_log_series(const std::vector<double>& log_values, int period) {
  std::vector<double> xs, ys;
  for (std::size_t n = period; n < log_values.size(); n += period) {
    if (log_values[n] == kLogZero) continue;
    xs.push_back(static_cast<double>(n));
    ys.push_back(log_values[n]);
  }
  if (xs.empty()) return 0.0;
  if (xs.size() == 1) return std::exp(ys[0] / xs[0]);
  return std::exp(top_half_slope(xs, ys));
}

RadiusEstimate spectral_radius_estimate(const TransitionKernel& kernel, const VertexId& x, int n_max) {
  const auto series = log_return_series(kernel, x, n_max);
  const int d = period_of(series, 50);
  if (d == 0)
    throw PeriodError("no return to " + to_string(x) + " within " + std::to_string(std::min(n_max, 50)) +
                      " steps under " + kernel.name());
  if (n_max < 2 * d) throw std::invalid_argument("spectral_radius_estimate needs n_max >= 2 * period");
  RadiusEstimate est;
  est.period = d;
  est.depth = n_max;
  est.lumped = kernel.has_radial_key();
  est.value = radius_from_log_series(series, d);
  return est;
}

double stay_prob(const TransitionKernel& P, const SubgraphSpec& U, const VertexId& x, int N) {
  return std::exp(log_mass_series(restrict_kernel(P, U), x, N).back());
}

ZetaEstimate growth_from_log_mass(const std::vector<double>& log_mass) {
  ZetaEstimate est;
  int last = static_cast<int>(log_mass.size()) - 1;
  for (int n = 1; n < static_cast<int>(log_mass.size()); ++n) {
    if (log_mass[n] == kLogZero) {
      est.underflow_depth = n;
      last = n - 1;
      break;
    }
  }
  est.depth = last;
  if (last < 1) return est;
  if (last == 1) {
    est.value = std::exp(log_mass[1]);
    return est;
  }
  std::vector<double> xs, ys;
  for (int n = 1; n <= last; ++n) {
    xs.push_back(n);
    ys.push_back(log_mass[n]);
  }
  est.value = std::exp(top_half_slope(xs, ys));
  return est;
}

ZetaEstimate zeta_estimate(const TransitionKernel& P, const SubgraphSpec& U, const VertexId& x, int N_max) {
  return growth_from_log_mass(log_mass_series(restrict_kernel(P, U), x, N_max));
}

double green_partial(const TransitionKernel& kernel, const VertexId& x, const VertexId& y, double z, int J) {
  if (J < 0 || !(z > 0.0)) throw std::invalid_argument("green_partial needs J >= 0 and z > 0");
  const auto series = x == y ? log_return_series(kernel, x, J) : log_transition_series(kernel, x, y, J);
  const double lz = std::log(z);
  double sum = 0.0;
  for (int j = 0; j <= J; ++j)
    if (series[j] != kLogZero) sum += std::exp(series[j] + j * lz);
  return sum;
}

IdentityCheck kernel_identity_check(const TransitionKernel& pU, const TransitionKernel& qU, double zeta,
                                    const VertexId& x, const VertexId& y, int J) {
  if (!(zeta > 0.0)) throw std::invalid_argument("zeta must be positive");
  {
    ExploredChain chain(pU, x, true);
    chain.expand(std::max(J, 1));
    double delta = -1.0;
    for (ExploredChain::State s = 0; s < chain.size(); ++s) {
      if (!chain.row_ready(s)) continue;
      const double d = chain.row_sum(s);
      if (delta < 0.0) {
        delta = d;
      } else if (std::abs(d - delta) > kRowTolerance) {
        throw TransitivityError("row sums differ within radius " + std::to_string(J) + ": " + std::to_string(delta) +
                                " vs " + std::to_string(d) + " at " + to_string(chain.representative(s)));
      }
    }
  }
  const bool diag = x == y;
  const auto lp = diag ? log_return_series(pU, x, J) : log_transition_series(pU, x, y, J);
  const auto lq = diag ? log_return_series(qU, x, J) : log_transition_series(qU, x, y, J);
  const double lz = std::log(zeta);
  IdentityCheck out;
  for (int j = 0; j <= J; ++j) {
    const double q = std::exp(lq[j]);
    const double p = lp[j] == kLogZero ? 0.0 : std::exp(lp[j] - j * lz);
    const double dev = std::abs(q - p);
    const double rel = q > 0.0 ? dev / q : (dev > 0.0 ? HUGE_VAL : 0.0);
    if (dev > out.max_abs) {
      out.max_abs = dev;
      out.worst_j = j;
    }
    out.max_rel = std::max(out.max_rel, rel);
  }
  return out;
}

std::string to_string(EstimateMethod m) {
  return m == EstimateMethod::closed_form ? "closed_form" : "dp_extrapolation";
}

SpectralSummary make_summary(double rho_U, double phi_U, int period, int depth, EstimateMethod method) {
  SpectralSummary s;
  s.rho_U = rho_U;
  s.phi_U = phi_U;
  s.zeta = rho_U / phi_U;
  s.m1 = phi_U / rho_U;
  s.period = period;
  s.depth = depth;
  s.method = method;
  return s;
}

SpectralSummary summarize_subgraph(const TransitionKernel& P, const SubgraphSpec& U, const VertexId& x, int depth) {
  const auto pU = restrict_kernel(P, U);
  const auto qU = normalize_kernel(pU);
  const auto rho = spectral_radius_estimate(pU, x, depth);
  const auto phi = spectral_radius_estimate(qU, x, depth);
  // φ_U is a radius of a stochastic kernel; regression noise may push it past 1.
  const double phi_v = std::min(phi.value, 1.0);
  return make_summary(std::min(rho.value, phi_v), phi_v, rho.period, depth, EstimateMethod::dp_extrapolation);
}

}  // namespace brw
