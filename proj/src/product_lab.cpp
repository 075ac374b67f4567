#include "brwlab/product_lab.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace brw {

namespace {

double phi_tree(std::uint32_t d) { return 2.0 * std::sqrt(d - 1.0) / d; }

std::vector<Step> tree_row(const TreeWord& w, std::uint32_t d) {
  std::vector<Step> row;
  const double p = 1.0 / d;
  if (!w.is_root()) row.push_back({w.parent(), p});
  const std::uint32_t n = w.is_root() ? d : d - 1;
  for (std::uint32_t c = 0; c < n; ++c) row.push_back({w.child(c), p});
  return row;
}

bool tree_valid(const TreeWord& w, std::uint32_t d) {
  for (std::size_t i = 0; i < w.path.size(); ++i)
    if (w.path[i] >= (i == 0 ? d : d - 1)) return false;
  return true;
}

}  // namespace

void ProductSpec::validate() const {
  if (d1 < 2 || d2 < 2) throw SpecError("product factors need degree >= 2");
  if (!(alpha1 > 0.0 && alpha2 > 0.0)) throw SpecError("product weights must be positive");
  if (std::abs(alpha1 + alpha2 - 1.0) > kRowTolerance) throw SpecError("product weights must sum to 1");
}

std::int64_t product_distance_key(const VertexId& origin, const VertexId& v) {
  const auto& o = std::get<ProductVertex>(origin);
  const auto& w = std::get<ProductVertex>(v);
  return static_cast<std::int64_t>(tree_distance(o.first, w.first) << 32 | tree_distance(o.second, w.second));
}

TransitionKernel product_kernel(const ProductSpec& spec) {
  spec.validate();
  auto fn = [spec](const VertexId& v) {
    const auto& pv = expect<ProductVertex>(v, "product");
    if (!tree_valid(pv.first, spec.d1) || !tree_valid(pv.second, spec.d2))
      throw EncodingError("pair " + to_string(v) + " is not a product vertex");
    std::vector<Step> row;
    row.reserve(spec.d1 + spec.d2);
    for (auto& s : tree_row(pv.first, spec.d1))
      row.push_back({ProductVertex{std::get<TreeWord>(s.to), pv.second}, spec.alpha1 * s.prob});
    for (auto& s : tree_row(pv.second, spec.d2))
      row.push_back({ProductVertex{pv.first, std::get<TreeWord>(s.to)}, spec.alpha2 * s.prob});
    return row;
  };
  std::ostringstream name;
  name << "SRW[T" << spec.d1 << "xT" << spec.d2 << "]";
  return TransitionKernel(name.str(), KernelKind::stochastic, std::move(fn), product_distance_key);
}

SubgraphSpec product_fiber(const ProductSpec& spec, int fiber, const ProductVertex& base) {
  spec.validate();
  if (fiber != 1 && fiber != 2) throw SpecError("fiber index must be 1 or 2");
  SubgraphSpec s;
  s.name = "fiber:" + std::to_string(fiber);
  s.base = base;
  if (fiber == 2)
    s.contains = [o = base.first](const VertexId& v) {
      const auto* p = std::get_if<ProductVertex>(&v);
      return p && p->first == o;
    };
  else
    s.contains = [o = base.second](const VertexId& v) {
      const auto* p = std::get_if<ProductVertex>(&v);
      return p && p->second == o;
    };
  s.radial_key = product_distance_key;
  return s;
}

ProductSummary product_spectral_summary(const ProductSpec& spec) {
  spec.validate();
  ProductSummary s;
  s.spec = spec;
  s.phi[0] = phi_tree(spec.d1);
  s.phi[1] = phi_tree(spec.d2);
  for (int i = 0; i < 2; ++i) {
    const double a = spec.alpha(i + 1);
    s.fiber[i] = make_summary(a * s.phi[i], s.phi[i], 2, 0, EstimateMethod::closed_form);
    s.recurrence_mean[i] = s.phi[i] / (s.fiber[i].rho_U * s.fiber[i].rho_U);
  }
  s.rho_G = spec.alpha1 * s.phi[0] + spec.alpha2 * s.phi[1];
  s.inv_rho_G = 1.0 / s.rho_G;
  return s;
}

std::vector<double> product_log_returns(const ProductSpec& spec, int n_max) {
  spec.validate();
  const VertexId root = TreeWord{};
  const auto p1 = log_return_series(tree_kernel(TreeSpec::homogeneous(spec.d1)), root, n_max);
  const auto p2 = log_return_series(tree_kernel(TreeSpec::homogeneous(spec.d2)), root, n_max);
  const double la1 = std::log(spec.alpha1), la2 = std::log(spec.alpha2);
  std::vector<double> out(n_max + 1, kLogZero);
  std::vector<double> terms;
  for (int n = 0; n <= n_max; ++n) {
    terms.clear();
    double mx = kLogZero;
    for (int k = 0; k <= n; ++k) {
      if (p1[k] == kLogZero || p2[n - k] == kLogZero) continue;
      const double t = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * la1 +
                       (n - k) * la2 + p1[k] + p2[n - k];
      terms.push_back(t);
      mx = std::max(mx, t);
    }
    if (mx == kLogZero) continue;
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - mx);
    out[n] = mx + std::log(acc);
  }
  return out;
}

ProductDPCheck product_dp_check(const ProductSpec& spec, int depth) {
  ProductDPCheck c;
  c.depth = depth;
  c.rho_G = radius_from_log_series(product_log_returns(spec, depth), 2);
  const auto P = product_kernel(spec);
  const VertexId o = ProductVertex{};
  for (int i = 0; i < 2; ++i) {
    const auto U = product_fiber(spec, i + 1);
    c.fiber[i] = summarize_subgraph(P, U, o, depth);
    c.zeta[i] = zeta_estimate(P, U, o, depth).value;
  }
  return c;
}

Window transient_window(const ProductSpec& spec, int fiber) {
  if (fiber != 1 && fiber != 2) throw SpecError("fiber index must be 1 or 2");
  const auto s = product_spectral_summary(spec);
  return Window{s.fiber[fiber - 1].m1, s.inv_rho_G};
}

// ---------------------------------------------------------------------------

FactorGroup FactorGroup::cyclic(std::uint32_t k) {
  if (k < 2) throw SpecError("cyclic factor needs order >= 2");
  FactorGroup g;
  g.kind = Kind::cyclic;
  g.size = k;
  g.gens = k == 2 ? std::vector<std::int32_t>{1} : std::vector<std::int32_t>{1, static_cast<std::int32_t>(k - 1)};
  g.mu.assign(g.gens.size(), 1.0 / g.gens.size());
  return g;
}

FactorGroup FactorGroup::free_group(std::uint32_t r) {
  if (r < 1) throw SpecError("free factor needs rank >= 1");
  FactorGroup g;
  g.kind = Kind::free;
  g.size = r;
  for (std::int32_t i = 1; i <= static_cast<std::int32_t>(r); ++i) {
    g.gens.push_back(i);
    g.gens.push_back(-i);
  }
  g.mu.assign(g.gens.size(), 1.0 / g.gens.size());
  return g;
}

FactorGroup FactorGroup::parse(const std::string& text) {
  if (text.size() >= 2 && (text[0] == 'Z' || text[0] == 'F')) {
    std::size_t used = 0;
    unsigned long n = 0;
    try {
      n = std::stoul(text.substr(1), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == text.size() - 1) return text[0] == 'Z' ? cyclic(n) : free_group(n);
  }
  throw SpecError("unknown factor group '" + text + "' (expected Zk or Fr)");
}

std::string FactorGroup::describe() const { return (kind == Kind::cyclic ? "Z" : "F") + std::to_string(size); }

bool FactorGroup::valid_token(std::int32_t t) const {
  if (kind == Kind::cyclic) return t >= 1 && t < static_cast<std::int32_t>(size);
  return t != 0 && std::abs(t) <= static_cast<std::int32_t>(size);
}

std::int32_t FactorGroup::inverse(std::int32_t t) const {
  return kind == Kind::cyclic ? static_cast<std::int32_t>(size) - t : -t;
}

bool FactorGroup::uniform_symmetric() const {
  for (std::size_t i = 0; i < gens.size(); ++i) {
    if (std::abs(mu[i] - mu[0]) > kRowTolerance) return false;
    if (std::find(gens.begin(), gens.end(), inverse(gens[i])) == gens.end()) return false;
  }
  // Circular distance is a valid key only for the nearest-neighbour walk on Z_k.
  if (kind == Kind::cyclic)
    return std::all_of(gens.begin(), gens.end(), [this](std::int32_t g) { return g == 1 || g == int(size) - 1; });
  return static_cast<std::uint32_t>(gens.size()) == 2 * size;
}

void FreeProductSpec::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw SpecError("free-product weight alpha must lie in (0, 1)");
  for (const auto* g : {&g1, &g2}) {
    if (g->gens.empty() || g->gens.size() != g->mu.size()) throw SpecError("factor " + g->describe() + " has no step measure");
    double sum = 0.0;
    for (std::size_t i = 0; i < g->gens.size(); ++i) {
      if (!g->valid_token(g->gens[i])) throw SpecError("invalid generator in " + g->describe());
      if (!(g->mu[i] > 0.0)) throw SpecError("step weights must be positive");
      if (std::find(g->gens.begin(), g->gens.end(), g->inverse(g->gens[i])) == g->gens.end())
        throw SpecError("generators of " + g->describe() + " are not closed under inverses");
      sum += g->mu[i];
    }
    if (std::abs(sum - 1.0) > kRowTolerance) throw SpecError("step measure of " + g->describe() + " must sum to 1");
    auto sorted = g->gens;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw SpecError("duplicate generators in " + g->describe());
  }
}

void validate_word(const FreeProductSpec& spec, const GroupWord& w) {
  for (std::size_t i = 0; i < w.letters.size(); ++i) {
    const auto& l = w.letters[i];
    if (l.factor != 1 && l.factor != 2) throw EncodingError("letter with unknown factor in " + to_string(w));
    const auto& g = spec.factor(l.factor);
    if (!g.valid_token(l.gen)) throw EncodingError("invalid token in " + to_string(w));
    if (i == 0 || w.letters[i - 1].factor != l.factor) continue;
    if (g.kind == FactorGroup::Kind::cyclic) throw EncodingError("two adjacent letters from one factor in " + to_string(w));
    if (w.letters[i - 1].gen == -l.gen) throw EncodingError("word " + to_string(w) + " is not freely reduced");
  }
}

GroupWord multiply(const FreeProductSpec& spec, const GroupWord& w, std::uint8_t factor, std::int32_t token) {
  const auto& g = spec.factor(factor);
  GroupWord out = w;
  auto& ls = out.letters;
  if (ls.empty() || ls.back().factor != factor) {
    ls.push_back({factor, token});
    return out;
  }
  if (g.kind == FactorGroup::Kind::cyclic) {
    const auto r = static_cast<std::int32_t>((ls.back().gen + token) % static_cast<std::int32_t>(g.size));
    if (r == 0)
      ls.pop_back();
    else
      ls.back().gen = r;
  } else if (ls.back().gen == -token) {
    ls.pop_back();
  } else {
    ls.push_back({factor, token});
  }
  return out;
}

GroupWord multiply(const FreeProductSpec& spec, const GroupWord& a, const GroupWord& b) {
  GroupWord out = a;
  for (const auto& l : b.letters) out = multiply(spec, out, l.factor, l.gen);
  return out;
}

GroupWord inverse(const FreeProductSpec& spec, const GroupWord& w) {
  GroupWord out;
  out.letters.reserve(w.letters.size());
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it)
    out.letters.push_back({it->factor, spec.factor(it->factor).inverse(it->gen)});
  return out;
}

TransitionKernel free_product_kernel(const FreeProductSpec& spec) {
  spec.validate();
  auto fn = [spec](const VertexId& v) {
    const auto& w = expect<GroupWord>(v, "free-product");
    validate_word(spec, w);
    std::vector<Step> row;
    row.reserve(spec.g1.gens.size() + spec.g2.gens.size());
    for (std::uint8_t f = 1; f <= 2; ++f) {
      const auto& g = spec.factor(f);
      const double wf = f == 1 ? spec.alpha : 1.0 - spec.alpha;
      for (std::size_t i = 0; i < g.gens.size(); ++i) row.push_back({multiply(spec, w, f, g.gens[i]), wf * g.mu[i]});
    }
    return row;
  };
  return TransitionKernel("RW[" + spec.g1.describe() + "*" + spec.g2.describe() + "]", KernelKind::stochastic,
                          std::move(fn));
}

SubgraphSpec gamma2_copy(const FreeProductSpec& spec) {
  spec.validate();
  SubgraphSpec s;
  s.name = "copy:2";
  s.base = GroupWord{};
  s.contains = [](const VertexId& v) {
    const auto* w = std::get_if<GroupWord>(&v);
    return w && std::all_of(w->letters.begin(), w->letters.end(), [](const Letter& l) { return l.factor == 2; });
  };
  if (spec.g2.uniform_symmetric()) {
    s.radial_key = [spec](const VertexId& origin, const VertexId& v) -> std::int64_t {
      const auto rel = multiply(spec, inverse(spec, std::get<GroupWord>(origin)), std::get<GroupWord>(v));
      if (spec.g2.kind == FactorGroup::Kind::free) return static_cast<std::int64_t>(rel.letters.size());
      if (rel.letters.empty()) return 0;
      const std::int64_t r = rel.letters.front().gen, k = spec.g2.size;
      return std::min(r, k - r);
    };
  }
  return s;
}

FreeProductThresholds free_product_thresholds(const FreeProductSpec& spec, int depth) {
  FreeProductThresholds t;
  const auto P = free_product_kernel(spec);
  const auto U = gamma2_copy(spec);
  const VertexId e = GroupWord{};
  t.zeta = 1.0 - spec.alpha;
  t.zeta_stay = stay_prob(P, U, e, 1);
  t.zeta_dp = zeta_estimate(P, U, e, depth).value;
  t.depth = depth;
  t.m0 = t.m1 = 1.0 / t.zeta;
  return t;
}

}  // namespace brw
