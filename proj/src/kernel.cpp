#include "brwlab/kernel.hpp"

#include <cmath>
#include <sstream>

namespace brw {

TransitionKernel::TransitionKernel(std::string name, KernelKind kind, NeighborFn fn, RadialKey key)
    : name_(std::move(name)), kind_(kind), fn_(std::move(fn)), key_(std::move(key)) {
  if (!fn_) throw KernelError("kernel " + name_ + " has no neighbour function");
}

std::vector<Step> TransitionKernel::neighbors(const VertexId& v) const {
  auto row = fn_(v);
  double sum = 0.0;
  for (const auto& s : row) {
    if (!(s.prob > 0.0) || s.prob > 1.0 + kRowTolerance)
      throw KernelError(name_ + ": invalid probability at " + to_string(v));
    sum += s.prob;
  }
  if (sum > 1.0 + kRowTolerance) throw KernelError(name_ + ": row sum exceeds 1 at " + to_string(v));
  if (kind_ == KernelKind::stochastic && std::abs(sum - 1.0) > kRowTolerance)
    throw KernelError(name_ + ": stochastic row does not sum to 1 at " + to_string(v));
  return row;
}

double TransitionKernel::row_sum(const VertexId& v) const {
  double sum = 0.0;
  for (const auto& s : neighbors(v)) sum += s.prob;
  return sum;
}

std::vector<Step> neighbors(const TransitionKernel& kernel, const VertexId& v) { return kernel.neighbors(v); }

SubgraphSpec whole_graph(const TransitionKernel& kernel, VertexId base) {
  return SubgraphSpec{"all", [](const VertexId&) { return true; }, std::move(base), kernel.radial_key()};
}

TransitionKernel restrict_kernel(const TransitionKernel& kernel, const SubgraphSpec& sub) {
  if (!sub.contains || !sub.contains(sub.base))
    throw SpecError("base vertex " + to_string(sub.base) + " is not a member of " + sub.name);
  auto fn = [kernel, contains = sub.contains](const VertexId& v) {
    auto row = kernel.neighbors(v);
    std::vector<Step> kept;
    kept.reserve(row.size());
    for (auto& s : row)
      if (contains(s.to)) kept.push_back(std::move(s));
    return kept;
  };
  return TransitionKernel(kernel.name() + "|" + sub.name, KernelKind::substochastic, std::move(fn), sub.radial_key);
}

TransitionKernel normalize_kernel(const TransitionKernel& pU) {
  auto fn = [pU](const VertexId& v) {
    auto row = pU.neighbors(v);
    double delta = 0.0;
    for (const auto& s : row) delta += s.prob;
    if (delta <= 0.0) throw NormalizationError("vertex " + to_string(v) + " cannot stay in U (row sum 0)");
    if (delta != 1.0)
      for (auto& s : row) s.prob /= delta;
    return row;
  };
  return TransitionKernel("Q[" + pU.name() + "]", KernelKind::stochastic, std::move(fn), pU.radial_key());
}

// ---------------------------------------------------------------------------
// Trees

TreeSpec TreeSpec::homogeneous(std::uint32_t degree) {
  if (degree < 2) throw SpecError("homogeneous tree needs degree >= 2");
  TreeSpec t;
  t.prefix_ = {degree};
  t.cycle_ = {degree - 1};
  t.homogeneous_degree_ = degree;
  return t;
}

TreeSpec TreeSpec::branching(std::vector<std::uint32_t> prefix, std::vector<std::uint32_t> cycle) {
  if (cycle.empty()) throw SpecError("tree branching needs a non-empty repeating part");
  for (auto n : prefix)
    if (n < 1) throw SpecError("tree branching numbers must be >= 1");
  for (auto n : cycle)
    if (n < 1) throw SpecError("tree branching numbers must be >= 1");
  TreeSpec t;
  t.prefix_ = std::move(prefix);
  t.cycle_ = std::move(cycle);
  return t;
}

std::uint32_t TreeSpec::children(std::size_t depth) const {
  if (depth < prefix_.size()) return prefix_[depth];
  return cycle_[(depth - prefix_.size()) % cycle_.size()];
}

std::uint32_t TreeSpec::degree(const TreeWord& w) const {
  return children(w.depth()) + (w.is_root() ? 0u : 1u);
}

bool TreeSpec::valid(const TreeWord& w) const {
  for (std::size_t i = 0; i < w.path.size(); ++i)
    if (w.path[i] >= children(i)) return false;
  return true;
}

double TreeSpec::level_size(std::size_t depth) const {
  double s = 1.0;
  for (std::size_t j = 0; j < depth; ++j) s *= children(j);
  return s;
}

std::string TreeSpec::describe() const {
  if (is_homogeneous()) return "T" + std::to_string(homogeneous_degree_);
  std::ostringstream os;
  os << "T{";
  for (auto n : prefix_) os << n << ',';
  os << '(';
  for (std::size_t i = 0; i < cycle_.size(); ++i) os << (i ? "," : "") << cycle_[i];
  os << ")*}";
  return os.str();
}

std::int64_t tree_distance_key(const VertexId& origin, const VertexId& v) {
  return static_cast<std::int64_t>(tree_distance(std::get<TreeWord>(origin), std::get<TreeWord>(v)));
}

TransitionKernel tree_kernel(const TreeSpec& spec) {
  auto fn = [spec](const VertexId& v) {
    const auto& w = expect<TreeWord>(v, "tree");
    if (!spec.valid(w)) throw EncodingError("word " + to_string(w) + " is not a vertex of " + spec.describe());
    const double p = 1.0 / spec.degree(w);
    std::vector<Step> row;
    row.reserve(spec.degree(w));
    if (!w.is_root()) row.push_back({w.parent(), p});
    const auto n = spec.children(w.depth());
    for (std::uint32_t c = 0; c < n; ++c) row.push_back({w.child(c), p});
    return row;
  };
  RadialKey key;
  if (spec.is_homogeneous()) key = tree_distance_key;
  return TransitionKernel("SRW[" + spec.describe() + "]", KernelKind::stochastic, std::move(fn), std::move(key));
}

}  // namespace brw
