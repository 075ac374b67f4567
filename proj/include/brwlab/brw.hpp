#pragma once

// Count-based simulation of the BRW and of the BRW induced on a subgraph U.
//
// Each particle at x has ν-many children, each placed independently at a
// P-neighbour; children landing outside U are killed. Counts per site evolve
// by one negative-binomial / multinomial draw for the total offspring of the
// site, followed by sequential binomial placement over the row of P_U.
//
// Two engines share these semantics: a vertex-level one (sparse map from
// VertexId to count) for arbitrary subgraphs, and one on radially lumped
// chains for subgraphs with a radial key. Lumping is exact in law for the
// total population and for the count at the start vertex.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "brwlab/chain.hpp"
#include "brwlab/kernel.hpp"
#include "brwlab/offspring.hpp"
#include "brwlab/stats.hpp"

namespace brw {

struct ParticleGeneration {
  int generation = 0;
  std::map<VertexId, double> counts;
  double total = 0.0;
  bool cap_hit = false;
};

ParticleGeneration single_particle(const VertexId& x);

enum class TrialStatus { extinct, alive_at_horizon, cap_exceeded };
std::string to_string(TrialStatus s);

struct TrialOutcome {
  TrialStatus status = TrialStatus::alive_at_horizon;
  /// Last generation simulated (the extinction generation when extinct).
  int stop_generation = 0;
  /// Generations n (including 0) with a particle at the start vertex.
  std::uint64_t local_visits = 0;
  int last_local_visit = 0;
  std::vector<double> population;

  bool persisted() const { return status != TrialStatus::extinct; }
};

/// One generation of the induced process (vertex-level).
ParticleGeneration step_induced(const ParticleGeneration& gen, const TransitionKernel& P, const SubgraphSpec& U,
                                const OffspringLaw& law, Rng& rng, double cap);

struct SimulationOptions {
  int horizon = 200;
  double cap = 1e6;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  /// Use the radial key of U when it has one.
  bool lumped = true;
  /// Persisting trials with more local visits than this feed the tail fraction.
  std::uint64_t local_threshold = 10;
};

/// The induced process of (P, U, law) started with one particle at x.
class InducedProcess {
 public:
  InducedProcess(const TransitionKernel& P, const SubgraphSpec& U, OffspringLaw law, VertexId x, bool lumped = true);

  bool lumped() const { return chain_.lumped(); }
  const OffspringLaw& law() const { return law_; }
  /// Prepares the lumped chain up to `horizon` so trials are independent of
  /// each other's exploration order. No-op for vertex-level simulation.
  void prepare(int horizon);
  TrialOutcome run(int horizon, double cap, Rng& rng);
  /// Per-generation totals only, ignoring the cap (used for moment checks).
  std::vector<double> run_population(int horizon, Rng& rng, double cap = HUGE_VAL);

 private:
  TransitionKernel pU_;
  OffspringLaw law_;
  VertexId x_;
  ExploredChain chain_;
  int prepared_ = -1;
};

TrialOutcome simulate_induced(const TransitionKernel& P, const SubgraphSpec& U, const OffspringLaw& law,
                              const VertexId& x, int horizon, double cap, Rng& rng, bool lumped = true);

struct PopulationQuantiles {
  int generation = 0;
  double alive_fraction = 0.0;
  double q10 = 0.0, q50 = 0.0, q90 = 0.0;
};

struct PersistenceEstimate {
  std::uint64_t trials = 0;
  std::uint64_t persisting = 0;
  std::uint64_t extinct = 0;
  std::uint64_t cap_exceeded = 0;
  double estimate = 0.0;
  Interval ci;
  /// Among persisting trials: fraction with local_visits > local_threshold.
  std::uint64_t local_tail = 0;
  double local_tail_fraction = 0.0;
  Interval local_tail_ci;
  std::uint64_t max_local_visits = 0;
  bool lumped = false;
  std::vector<PopulationQuantiles> quantiles;
};

/// Fraction of trials that are alive at the horizon or exceed the cap, with a
/// Wilson 95% interval. Trial t uses trial_rng(seed, t).
PersistenceEstimate persistence_probability(const TransitionKernel& P, const SubgraphSpec& U, const OffspringLaw& law,
                                            const VertexId& x, const SimulationOptions& opt);

/// Every trial outcome, in trial order.
std::vector<TrialOutcome> simulate_trials(const TransitionKernel& P, const SubgraphSpec& U, const OffspringLaw& law,
                                          const VertexId& x, const SimulationOptions& opt);

struct MeanGrowth {
  double rate = 0.0;
  /// log E[U_n^x] = n log m + log P_x(E_n), n = 0..n_max.
  std::vector<double> log_expected;
};

/// Growth rate of E[U_n^x] = m^n P_x(E_n), computed from the exact stay
/// probabilities.
MeanGrowth mean_growth_check(const TransitionKernel& P, const SubgraphSpec& U, const OffspringLaw& law,
                             const VertexId& x, int n_max);

/// Empirical E[U_n^x] for n = 0..n_max (no cap).
std::vector<MeanEstimate> empirical_mean_population(const TransitionKernel& P, const SubgraphSpec& U,
                                                    const OffspringLaw& law, const VertexId& x, int n_max,
                                                    std::uint64_t trials, std::uint64_t seed, bool lumped = true);

struct MartingaleCheck {
  double zeta = 0.0;
  double growth = 0.0;  // m * zeta
  std::uint64_t used_trials = 0;
  std::uint64_t excluded_cap = 0;
  std::vector<MeanEstimate> w;  // W̄_n, n = 0..horizon
  bool flat = false;            // every interval contains 1
};

/// W_n = U_n / (m ζ)^n per trial, averaged per generation. ζ = P_x(E_1);
/// requires m ζ > 1.
MartingaleCheck ks_martingale_check(const TransitionKernel& P, const SubgraphSpec& U, const OffspringLaw& law,
                                    const VertexId& x, int horizon, std::uint64_t trials, std::uint64_t seed,
                                    double cap = 1e300);

/// Coupled two-type run of the unrestricted BRW: particles whose whole
/// lineage stayed in U form the induced process. Returns, per generation,
/// (induced population, number of BRW particles inside U).
std::vector<std::pair<double, double>> coupled_domination(const TransitionKernel& P, const SubgraphSpec& U,
                                                          const OffspringLaw& law, const VertexId& x, int horizon,
                                                          Rng& rng, double cap = 1e7);

/// Vertex-level unrestricted BRW with a per-generation observer; returns the
/// outcome (local visits counted at x). The observer sees every generation,
/// including 0, and may stop the run by returning false.
using GenerationObserver = std::function<bool(const ParticleGeneration&)>;
TrialOutcome run_vertex_brw(const TransitionKernel& P, const OffspringLaw& law, const VertexId& x, int horizon,
                            double cap, Rng& rng, const GenerationObserver& observe);

struct HittingEstimate {
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
  double estimate = 0.0;
  Interval ci;
  /// Trials that neither hit nor died out by the horizon.
  std::uint64_t undecided = 0;
};

/// Probability that the BRW started at `start` ever puts a particle on
/// `target` (estimated up to the horizon). Runs on the chain lumped by the
/// kernel's radial key relative to `target` when available.
HittingEstimate hitting_probability(const TransitionKernel& P, const OffspringLaw& law, const VertexId& start,
                                    const VertexId& target, const SimulationOptions& opt);

}  // namespace brw
