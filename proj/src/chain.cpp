#include "brwlab/chain.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>

namespace brw {

ExploredChain::ExploredChain(TransitionKernel kernel, VertexId origin, bool lumped)
    : kernel_(std::move(kernel)), lumped_(lumped && kernel_.has_radial_key()) {
  intern(origin);
}

ExploredChain::State ExploredChain::intern(const VertexId& v) {
  if (lumped_) {
    const auto lab = reps_.empty() ? kernel_.radial_key()(v, v) : kernel_.radial_key()(reps_.front(), v);
    auto [it, fresh] = by_label_.try_emplace(lab, static_cast<State>(reps_.size()));
    if (fresh) {
      reps_.push_back(v);
      labels_.push_back(lab);
    }
    return it->second;
  }
  auto [it, fresh] = by_vertex_.try_emplace(v, static_cast<State>(reps_.size()));
  if (fresh) reps_.push_back(v);
  return it->second;
}

const std::vector<ExploredChain::Entry>& ExploredChain::row(State s) {
  if (row_ready(s)) return rows_[s];
  // Copy: interning below may reallocate reps_.
  const VertexId rep = reps_[s];
  const auto steps = kernel_.neighbors(rep);
  std::vector<Entry> out;
  if (lumped_) {
    std::map<std::int64_t, std::pair<State, double>> agg;
    for (const auto& st : steps) {
      const State t = intern(st.to);
      auto& slot = agg[labels_[t]];
      slot.first = t;
      slot.second += st.prob;
    }
    out.reserve(agg.size());
    for (const auto& [lab, tp] : agg) out.push_back({tp.first, tp.second, std::log(tp.second)});
  } else {
    out.reserve(steps.size());
    for (const auto& st : steps) {
      const State t = intern(st.to);
      auto it = std::find_if(out.begin(), out.end(), [t](const Entry& e) { return e.to == t; });
      if (it == out.end())
        out.push_back({t, st.prob, 0.0});
      else
        it->prob += st.prob;
    }
    for (auto& e : out) e.log_prob = std::log(e.prob);
  }
  if (rows_.size() <= s) {
    rows_.resize(s + 1);
    ready_.resize(s + 1, 0);
  }
  rows_[s] = std::move(out);
  ready_[s] = 1;
  return rows_[s];
}

const std::vector<ExploredChain::Entry>& ExploredChain::expanded_row(State s) const {
  if (!row_ready(s)) throw std::logic_error("chain state " + std::to_string(s) + " was not expanded");
  return rows_[s];
}

double ExploredChain::row_sum(State s) {
  double sum = 0.0;
  for (const auto& e : row(s)) sum += e.prob;
  return sum;
}

void ExploredChain::expand(int depth, State from) {
  std::vector<State> frontier{from};
  std::vector<char> seen(size(), 0);
  seen[from] = 1;
  for (int d = 0; d < depth && !frontier.empty(); ++d) {
    std::vector<State> next;
    for (State s : frontier) {
      for (const auto& e : row(s)) {
        if (seen.size() < size()) seen.resize(size(), 0);
        if (!seen[e.to]) {
          seen[e.to] = 1;
          next.push_back(e.to);
        }
      }
    }
    frontier = std::move(next);
  }
}

void ExploredChain::reset() {
  VertexId o = reps_.front();
  reps_.clear();
  labels_.clear();
  by_label_.clear();
  by_vertex_.clear();
  rows_.clear();
  ready_.clear();
  intern(o);
}

// ---------------------------------------------------------------------------

double log_sum_exp(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

LogPropagator::LogPropagator(ExploredChain& chain) : chain_(chain), logp_{0.0} {}

double LogPropagator::log_total() const {
  double m = kLogZero;
  for (double v : logp_) m = std::max(m, v);
  if (m == kLogZero) return kLogZero;
  double acc = 0.0;
  for (double v : logp_)
    if (v != kLogZero) acc += std::exp(v - m);
  return m + std::log(acc);
}

void LogPropagator::step() {
  const std::size_t n_src = logp_.size();
  for (std::size_t s = 0; s < n_src; ++s)
    if (logp_[s] != kLogZero) chain_.row(static_cast<ExploredChain::State>(s));
  const std::size_t n = chain_.size();
  max_.assign(n, kLogZero);
  acc_.assign(n, 0.0);
  for (std::size_t s = 0; s < n_src; ++s) {
    const double ls = logp_[s];
    if (ls == kLogZero) continue;
    for (const auto& e : chain_.expanded_row(static_cast<ExploredChain::State>(s)))
      max_[e.to] = std::max(max_[e.to], ls + e.log_prob);
  }
  for (std::size_t s = 0; s < n_src; ++s) {
    const double ls = logp_[s];
    if (ls == kLogZero) continue;
    for (const auto& e : chain_.expanded_row(static_cast<ExploredChain::State>(s)))
      acc_[e.to] += std::exp(ls + e.log_prob - max_[e.to]);
  }
  logp_.assign(n, kLogZero);
  for (std::size_t t = 0; t < n; ++t)
    if (max_[t] != kLogZero) logp_[t] = max_[t] + std::log(acc_[t]);
  ++steps_;
}

namespace {

template <class Observe>
std::vector<double> run_series(const TransitionKernel& kernel, const VertexId& x, int n_max, bool lumped,
                               Observe observe) {
  if (n_max < 0) throw std::invalid_argument("step count must be non-negative");
  ExploredChain chain(kernel, x, lumped);
  LogPropagator prop(chain);
  std::vector<double> out;
  out.reserve(n_max + 1);
  out.push_back(observe(chain, prop));
  for (int n = 1; n <= n_max; ++n) {
    prop.step();
    out.push_back(observe(chain, prop));
  }
  return out;
}

}  // namespace

std::vector<double> log_return_series(const TransitionKernel& kernel, const VertexId& x, int n_max,
                                      bool allow_lumping) {
  return run_series(kernel, x, n_max, allow_lumping,
                    [](ExploredChain&, const LogPropagator& p) { return p.log_at(0); });
}

std::vector<double> log_mass_series(const TransitionKernel& kernel, const VertexId& x, int n_max,
                                    bool allow_lumping) {
  return run_series(kernel, x, n_max, allow_lumping,
                    [](ExploredChain&, const LogPropagator& p) { return p.log_total(); });
}

std::vector<double> log_transition_series(const TransitionKernel& kernel, const VertexId& x, const VertexId& y,
                                          int n_max, bool allow_lumping) {
  if (x == y) return log_return_series(kernel, x, n_max, allow_lumping);
  if (!allow_lumping || !kernel.has_radial_key()) {
    return run_series(kernel, x, n_max, false, [&y](ExploredChain& c, const LogPropagator& p) {
      // Interning y does not perturb the DP: unseen states carry zero mass.
      return p.log_at(c.intern(y));
    });
  }
  // Pairs of keys are interned to fresh labels, so distinct pairs never collide.
  auto ids = std::make_shared<std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t>>();
  RadialKey pair_key = [key = kernel.radial_key(), y, ids](const VertexId& origin, const VertexId& v) {
    const auto k = std::make_pair(key(origin, v), key(y, v));
    return ids->try_emplace(k, static_cast<std::int64_t>(ids->size())).first->second;
  };
  const TransitionKernel two_point(kernel.name(), kernel.kind(),
                                   [kernel](const VertexId& v) { return kernel.neighbors(v); }, pair_key);
  return run_series(two_point, x, n_max, true, [&y](ExploredChain& c, const LogPropagator& p) {
    return p.log_at(c.intern(y));
  });
}

double n_step_prob(const TransitionKernel& kernel, const VertexId& x, const VertexId& y, int n) {
  return std::exp(log_transition_series(kernel, x, y, n).back());
}

std::unordered_map<VertexId, double, VertexHash> n_step_distribution(const TransitionKernel& kernel,
                                                                      const VertexId& x, int n) {
  ExploredChain chain(kernel, x, false);
  LogPropagator prop(chain);
  for (int i = 0; i < n; ++i) prop.step();
  std::unordered_map<VertexId, double, VertexHash> out;
  const auto& lp = prop.log_mass();
  for (std::size_t s = 0; s < lp.size(); ++s)
    if (lp[s] != kLogZero) out.emplace(chain.representative(static_cast<ExploredChain::State>(s)), std::exp(lp[s]));
  return out;
}

}  // namespace brw
