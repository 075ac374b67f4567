#include "brwlab/brw.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include "brwlab/spectral.hpp"

namespace brw {

namespace {

using State = ExploredChain::State;
using Occupancy = std::vector<std::pair<State, double>>;

// Splits `kids` children over a row by sequential binomials; whatever is left
// after the row (mass 1 - row sum) is killed.
template <class Row, class Prob, class Emit>
void place(Rng& rng, double kids, const Row& row, Prob prob, Emit emit) {
  double left = kids, mass = 1.0;
  for (const auto& e : row) {
    if (left <= 0.0) break;
    const double p = prob(e);
    const double k = sample_binomial(rng, left, mass > p ? p / mass : 1.0);
    if (k > 0.0) emit(e, k);
    left -= k;
    mass -= p;
  }
}

struct ChainRunner {
  ExploredChain& chain;
  const OffspringLaw& law;
  std::vector<double> acc;
  std::vector<State> touched;

  void step(const Occupancy& in, Occupancy& out, Rng& rng) {
    for (const auto& [s, c] : in) {
      const double kids = law.sample_total(rng, c);
      if (kids <= 0.0) continue;
      const auto& row = chain.row(s);
      if (acc.size() < chain.size()) acc.resize(chain.size(), 0.0);
      place(
          rng, kids, row, [](const ExploredChain::Entry& e) { return e.prob; },
          [this](const ExploredChain::Entry& e, double k) {
            if (acc[e.to] == 0.0) touched.push_back(e.to);
            acc[e.to] += k;
          });
    }
    std::sort(touched.begin(), touched.end());
    out.clear();
    for (State t : touched) {
      out.emplace_back(t, acc[t]);
      acc[t] = 0.0;
    }
    touched.clear();
  }

  // Local visits are generations with a particle on chain state 0.
  TrialOutcome run(State start, int horizon, double cap, Rng& rng, bool stop_on_origin) {
    TrialOutcome out;
    Occupancy cur{{start, 1.0}}, next;
    out.population.push_back(1.0);
    if (start == 0) {
      out.local_visits = 1;
      if (stop_on_origin) {
        out.status = TrialStatus::alive_at_horizon;
        return out;
      }
    }
    for (int n = 1; n <= horizon; ++n) {
      step(cur, next, rng);
      std::swap(cur, next);
      double total = 0.0;
      for (const auto& [s, c] : cur) total += c;
      out.population.push_back(total);
      out.stop_generation = n;
      if (total == 0.0) {
        out.status = TrialStatus::extinct;
        return out;
      }
      if (!cur.empty() && cur.front().first == 0) {
        ++out.local_visits;
        out.last_local_visit = n;
        if (stop_on_origin) return out;
      }
      if (total > cap) {
        out.status = TrialStatus::cap_exceeded;
        return out;
      }
    }
    out.status = TrialStatus::alive_at_horizon;
    return out;
  }
};

ParticleGeneration vertex_step(const ParticleGeneration& gen, const TransitionKernel& K, const OffspringLaw& law,
                               Rng& rng, double cap) {
  ParticleGeneration next;
  next.generation = gen.generation + 1;
  for (const auto& [v, c] : gen.counts) {
    const double kids = law.sample_total(rng, c);
    if (kids <= 0.0) continue;
    place(
        rng, kids, K.neighbors(v), [](const Step& s) { return s.prob; },
        [&next](const Step& s, double k) { next.counts[s.to] += k; });
  }
  for (const auto& [v, c] : next.counts) next.total += c;
  next.cap_hit = next.total > cap;
  return next;
}

TrialOutcome run_vertex(const TransitionKernel& K, const OffspringLaw& law, const VertexId& x, int horizon,
                        double cap, Rng& rng, const GenerationObserver* observe) {
  TrialOutcome out;
  ParticleGeneration gen = single_particle(x);
  out.population.push_back(1.0);
  out.local_visits = 1;
  if (observe && !(*observe)(gen)) return out;
  for (int n = 1; n <= horizon; ++n) {
    gen = vertex_step(gen, K, law, rng, cap);
    out.population.push_back(gen.total);
    out.stop_generation = n;
    if (gen.total == 0.0) {
      out.status = TrialStatus::extinct;
      if (observe) (*observe)(gen);
      return out;
    }
    if (gen.counts.count(x)) {
      ++out.local_visits;
      out.last_local_visit = n;
    }
    if (observe && !(*observe)(gen)) {
      out.status = gen.cap_hit ? TrialStatus::cap_exceeded : TrialStatus::alive_at_horizon;
      return out;
    }
    if (gen.cap_hit) {
      out.status = TrialStatus::cap_exceeded;
      return out;
    }
  }
  out.status = TrialStatus::alive_at_horizon;
  return out;
}

}  // namespace

ParticleGeneration single_particle(const VertexId& x) {
  ParticleGeneration g;
  g.counts.emplace(x, 1.0);
  g.total = 1.0;
  return g;
}

std::string to_string(TrialStatus s) {
  switch (s) {
    case TrialStatus::extinct:
      return "extinct";
    case TrialStatus::alive_at_horizon:
      return "alive_at_horizon";
    case TrialStatus::cap_exceeded:
      return "cap_exceeded";
  }
  return "?";
}

ParticleGeneration step_induced(const ParticleGeneration& gen, const TransitionKernel& P, const SubgraphSpec& U,
                                const OffspringLaw& law, Rng& rng, double cap) {
  return vertex_step(gen, restrict_kernel(P, U), law, rng, cap);
}

InducedProcess::InducedProcess(const TransitionKernel& P, const SubgraphSpec& U, OffspringLaw law, VertexId x,
                               bool lumped)
    : pU_(restrict_kernel(P, U)), law_(std::move(law)), x_(std::move(x)), chain_(pU_, x_, lumped) {}

void InducedProcess::prepare(int horizon) {
  if (!chain_.lumped() || horizon <= prepared_) return;
  chain_.expand(horizon + 1);
  prepared_ = horizon;
}

TrialOutcome InducedProcess::run(int horizon, double cap, Rng& rng) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (!chain_.lumped()) return run_vertex(pU_, law_, x_, horizon, cap, rng, nullptr);
  prepare(horizon);
  ChainRunner runner{chain_, law_, {}, {}};
  return runner.run(0, horizon, cap, rng, false);
}

std::vector<double> InducedProcess::run_population(int horizon, Rng& rng, double cap) {
  auto out = run(horizon, cap, rng);
  out.population.resize(horizon + 1, 0.0);
  return out.population;
}

TrialOutcome simulate_induced(const TransitionKernel& P, const SubgraphSpec& U, const OffspringLaw& law,
                              const VertexId& x, int horizon, double cap, Rng& rng, bool lumped) {
  InducedProcess proc(P, U, law, x, lumped);
  return proc.run(horizon, cap, rng);
}

std::vector<TrialOutcome> simulate_trials(const TransitionKernel& P, const SubgraphSpec& U, const OffspringLaw& law,
                                          const VertexId& x, const SimulationOptions& opt) {
  if (opt.trials < 1) throw std::invalid_argument("trials must be >= 1");
  InducedProcess proc(P, U, law, x, opt.lumped);
  proc.prepare(opt.horizon);
  std::vector<TrialOutcome> out(opt.trials);
  for (std::uint64_t t = 0; t < opt.trials; ++t) {
    auto rng = trial_rng(opt.seed, t);
    out[t] = proc.run(opt.horizon, opt.cap, rng);
  }
  return out;
}

PersistenceEstimate persistence_probability(const TransitionKernel& P, const SubgraphSpec& U, const OffspringLaw& law,
                                            const VertexId& x, const SimulationOptions& opt) {
  if (opt.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (opt.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  InducedProcess proc(P, U, law, x, opt.lumped);
  proc.prepare(opt.horizon);
  PersistenceEstimate est;
  est.trials = opt.trials;
  est.lumped = proc.lumped();
  const bool keep_series = static_cast<double>(opt.trials) * (opt.horizon + 1) <= 5e7;
  std::vector<std::vector<double>> series;
  std::vector<TrialStatus> status;
  for (std::uint64_t t = 0; t < opt.trials; ++t) {
    auto rng = trial_rng(opt.seed, t);
    auto o = proc.run(opt.horizon, opt.cap, rng);
    if (o.status == TrialStatus::extinct) {
      ++est.extinct;
    } else {
      ++est.persisting;
      if (o.status == TrialStatus::cap_exceeded) ++est.cap_exceeded;
      if (o.local_visits > opt.local_threshold) ++est.local_tail;
    }
    est.max_local_visits = std::max(est.max_local_visits, o.local_visits);
    if (keep_series) {
      series.push_back(std::move(o.population));
      status.push_back(o.status);
    }
  }
  est.estimate = static_cast<double>(est.persisting) / static_cast<double>(est.trials);
  est.ci = wilson_interval(est.persisting, est.trials);
  est.local_tail_fraction =
      est.persisting ? static_cast<double>(est.local_tail) / static_cast<double>(est.persisting) : 0.0;
  est.local_tail_ci = wilson_interval(est.local_tail, est.persisting);
  if (keep_series) {
    for (int n = 0; n <= opt.horizon; ++n) {
      std::vector<double> pops;
      std::uint64_t alive = 0;
      for (std::size_t t = 0; t < series.size(); ++t) {
        const auto& s = series[t];
        if (n < static_cast<int>(s.size())) {
          pops.push_back(s[n]);
          if (s[n] > 0.0) ++alive;
        } else if (status[t] == TrialStatus::extinct) {
          pops.push_back(0.0);
        } else {
          ++alive;  // stopped at the cap, still alive
        }
      }
      PopulationQuantiles q;
      q.generation = n;
      q.alive_fraction = static_cast<double>(alive) / static_cast<double>(series.size());
      q.q10 = quantile(pops, 0.1);
      q.q50 = quantile(pops, 0.5);
      q.q90 = quantile(pops, 0.9);
      est.quantiles.push_back(q);
    }
  }
  return est;
}

MeanGrowth mean_growth_check(const TransitionKernel& P, const SubgraphSpec& U, const OffspringLaw& law,
                             const VertexId& x, int n_max) {
  MeanGrowth g;
  const auto lm = log_mass_series(restrict_kernel(P, U), x, n_max);
  const double log_m = std::log(law.mean());
  g.log_expected.resize(lm.size());
  for (std::size_t n = 0; n < lm.size(); ++n) g.log_expected[n] = lm[n] + static_cast<double>(n) * log_m;
  g.rate = law.mean() * growth_from_log_mass(lm).value;
  return g;
}

std::vector<MeanEstimate> empirical_mean_population(const TransitionKernel& P, const SubgraphSpec& U,
                                                    const OffspringLaw& law, const VertexId& x, int n_max,
                                                    std::uint64_t trials, std::uint64_t seed, bool lumped) {
  InducedProcess proc(P, U, law, x, lumped);
  proc.prepare(n_max);
  std::vector<std::vector<double>> per_gen(n_max + 1);
  for (std::uint64_t t = 0; t < trials; ++t) {
    auto rng = trial_rng(seed, t);
    const auto pop = proc.run_population(n_max, rng);
    for (int n = 0; n <= n_max; ++n) per_gen[n].push_back(pop[n]);
  }
  std::vector<MeanEstimate> out;
  for (const auto& v : per_gen) out.push_back(mean_estimate(v));
  return out;
}

MartingaleCheck ks_martingale_check(const TransitionKernel& P, const SubgraphSpec& U, const OffspringLaw& law,
                                    const VertexId& x, int horizon, std::uint64_t trials, std::uint64_t seed,
                                    double cap) {
  MartingaleCheck mc;
  mc.zeta = stay_prob(P, U, x, 1);
  mc.growth = law.mean() * mc.zeta;
  if (!(mc.growth > 1.0))
    throw std::invalid_argument("martingale check needs m * zeta > 1 (got " + std::to_string(mc.growth) + ")");
  InducedProcess proc(P, U, law, x);
  proc.prepare(horizon);
  std::vector<std::vector<double>> w(horizon + 1);
  for (std::uint64_t t = 0; t < trials; ++t) {
    auto rng = trial_rng(seed, t);
    auto o = proc.run(horizon, cap, rng);
    if (o.status == TrialStatus::cap_exceeded) {
      ++mc.excluded_cap;
      continue;
    }
    ++mc.used_trials;
    o.population.resize(horizon + 1, 0.0);
    for (int n = 0; n <= horizon; ++n) w[n].push_back(o.population[n] / std::pow(mc.growth, n));
  }
  mc.flat = true;
  for (const auto& v : w) {
    mc.w.push_back(mean_estimate(v));
    if (!mc.w.back().ci.contains(1.0)) mc.flat = false;
  }
  return mc;
}

std::vector<std::pair<double, double>> coupled_domination(const TransitionKernel& P, const SubgraphSpec& U,
                                                          const OffspringLaw& law, const VertexId& x, int horizon,
                                                          Rng& rng, double cap) {
  // counts[v] = {pure, tainted}
  std::map<VertexId, std::array<double, 2>> cur, next;
  cur[x] = {U.contains(x) ? 1.0 : 0.0, U.contains(x) ? 0.0 : 1.0};
  std::vector<std::pair<double, double>> out;
  auto record = [&] {
    double pure = 0.0, inside = 0.0;
    for (const auto& [v, c] : cur) {
      pure += c[0];
      if (U.contains(v)) inside += c[0] + c[1];
    }
    out.emplace_back(pure, inside);
    return pure + inside;
  };
  record();
  for (int n = 1; n <= horizon && !cur.empty(); ++n) {
    next.clear();
    for (const auto& [v, c] : cur) {
      const auto row = P.neighbors(v);
      for (int type = 0; type < 2; ++type) {
        const double kids = law.sample_total(rng, c[type]);
        if (kids <= 0.0) continue;
        place(
            rng, kids, row, [](const Step& s) { return s.prob; },
            [&](const Step& s, double k) {
              const bool pure = type == 0 && U.contains(s.to);
              next[s.to][pure ? 0 : 1] += k;
            });
      }
    }
    std::swap(cur, next);
    double total = 0.0;
    for (const auto& [v, c] : cur) total += c[0] + c[1];
    record();
    if (total > cap) break;
  }
  return out;
}

TrialOutcome run_vertex_brw(const TransitionKernel& P, const OffspringLaw& law, const VertexId& x, int horizon,
                            double cap, Rng& rng, const GenerationObserver& observe) {
  return run_vertex(P, law, x, horizon, cap, rng, observe ? &observe : nullptr);
}

HittingEstimate hitting_probability(const TransitionKernel& P, const OffspringLaw& law, const VertexId& start,
                                    const VertexId& target, const SimulationOptions& opt) {
  if (opt.trials < 1) throw std::invalid_argument("trials must be >= 1");
  HittingEstimate est;
  est.trials = opt.trials;
  ExploredChain chain(P, target, opt.lumped);
  const State s0 = chain.intern(start);
  if (chain.lumped()) chain.expand(opt.horizon + 1, s0);
  ChainRunner runner{chain, law, {}, {}};
  for (std::uint64_t t = 0; t < opt.trials; ++t) {
    auto rng = trial_rng(opt.seed, t);
    bool hit = false;
    TrialOutcome o;
    if (chain.lumped()) {
      o = runner.run(s0, opt.horizon, opt.cap, rng, true);
      hit = o.local_visits > 0;
    } else {
      o = run_vertex_brw(P, law, start, opt.horizon, opt.cap, rng, [&](const ParticleGeneration& g) {
        hit = hit || g.counts.count(target) > 0;
        return !hit;
      });
    }
    if (hit)
      ++est.hits;
    else if (o.status != TrialStatus::extinct)
      ++est.undecided;
  }
  est.estimate = static_cast<double>(est.hits) / static_cast<double>(est.trials);
  est.ci = wilson_interval(est.hits, est.trials);
  return est;
}

}  // namespace brw
