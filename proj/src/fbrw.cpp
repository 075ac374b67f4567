#include "brwlab/fbrw.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

namespace brw {

namespace {

struct Ball {
  std::vector<VertexId> vertices;  // BFS order
  std::vector<int> dist;
  std::unordered_map<VertexId, std::size_t, VertexHash> index;
  std::vector<std::vector<Step>> rows;  // rows of vertices with dist < radius
  int radius = 0;                        // every vertex with dist < radius has its row
};

/// Stops once the ball holds more than `budget` vertices; rows are then
/// complete only below the level being expanded.
Ball explore(const TransitionKernel& pU, const VertexId& base, int radius, std::size_t budget) {
  Ball b;
  b.vertices.push_back(base);
  b.dist.push_back(0);
  b.index.emplace(base, 0);
  b.radius = radius;
  for (std::size_t i = 0; i < b.vertices.size(); ++i) {
    if (b.dist[i] >= radius) break;
    if (b.vertices.size() > budget) {
      b.radius = b.dist[i];
      break;
    }
    auto row = pU.neighbors(b.vertices[i]);
    for (const auto& s : row) {
      if (b.index.emplace(s.to, b.vertices.size()).second) {
        b.vertices.push_back(s.to);
        b.dist.push_back(b.dist[i] + 1);
      }
    }
    b.rows.push_back(std::move(row));
  }
  return b;
}

std::int64_t quantize(double p) { return std::llround(p * 1e12); }

}  // namespace

ProjectionMap constant_projection() { return {"constant", [](const VertexId&) { return 0; }, 1}; }

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "?";
}

ProjectionCheck check_projection(const TransitionKernel& pU, const ProjectionMap& g, const VertexId& base,
                                 int ball_radius, std::size_t max_vertices) {
  if (g.type_count < 1) throw SpecError("projection needs at least one type");
  ProjectionCheck out;
  // Rows are needed for every vertex of the closed ball.
  const Ball ball = explore(pU, base, ball_radius + 1, max_vertices);
  out.radius = ball.radius - 1;
  if (out.radius < ball_radius)
    out.note = "ball truncated at radius " + std::to_string(out.radius) + " by the vertex budget";
  std::vector<std::optional<Eigen::VectorXd>> rows(g.type_count);
  std::vector<VertexId> first(g.type_count, base);
  std::vector<char> seen(g.type_count, 0);
  for (std::size_t i = 0; i < ball.rows.size(); ++i) {
    const VertexId& x = ball.vertices[i];
    const int gx = g.label(x);
    if (gx < 0 || gx >= g.type_count) {
      out.note = "label of " + to_string(x) + " is outside the declared type set";
      return out;
    }
    Eigen::VectorXd row = Eigen::VectorXd::Zero(g.type_count);
    for (const auto& s : ball.rows[i]) {
      const int gy = g.label(s.to);
      if (gy < 0 || gy >= g.type_count) {
        out.note = "label of " + to_string(s.to) + " is outside the declared type set";
        return out;
      }
      row(gy) += s.prob;
      seen[gy] = 1;
    }
    seen[gx] = 1;
    ++out.vertices_checked;
    if (!rows[gx]) {
      rows[gx] = row;
      first[gx] = x;
      continue;
    }
    Eigen::Index y;
    const double dev = (row - *rows[gx]).cwiseAbs().maxCoeff(&y);
    if (dev > kRowTolerance) {
      out.verdict = Verdict::fail;
      out.witness = ProjectionWitness{first[gx], x, gx, static_cast<int>(y), (*rows[gx])(y), row(y)};
      return out;
    }
  }
  for (int t = 0; t < g.type_count; ++t)
    if (seen[t]) out.labels_seen.push_back(t);
  const bool covered = std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.has_value(); });
  if (!covered) {
    out.note = "not every type has a vertex inside the ball";
    return out;
  }
  out.verdict = Verdict::pass;
  out.quotient.resize(g.type_count, g.type_count);
  for (int t = 0; t < g.type_count; ++t) out.quotient.row(t) = rows[t]->transpose();
  return out;
}

Eigen::MatrixXd quotient_kernel(const TransitionKernel& pU, const ProjectionMap& g, const VertexId& base,
                                int ball_radius, std::size_t max_vertices) {
  auto check = check_projection(pU, g, base, ball_radius, max_vertices);
  if (check.verdict != Verdict::pass)
    throw ContractError("quotient_kernel needs a passing projection check (verdict: " + to_string(check.verdict) + ")");
  return check.quotient;
}

ProjectionMap refine_projection(const TransitionKernel& pU, const VertexId& base, int ball_radius, int max_rounds,
                                std::size_t max_vertices) {
  const Ball full = explore(pU, base, ball_radius + 1 + max_rounds, max_vertices);
  // Keep as many refinement rounds as the budget allows, shrinking the labelled ball if needed.
  ball_radius = std::min(ball_radius, std::max(0, full.radius - 1 - max_rounds));
  max_rounds = std::min(max_rounds, full.radius - 1 - ball_radius);
  const int R = full.radius;
  const Ball& ball = full;
  const std::size_t n = ball.vertices.size();
  std::vector<int> label(n, 0);
  int classes = 1;
  int valid = R;  // labels are exact for vertices with dist <= valid
  for (int round = 0; round < max_rounds; ++round) {
    std::map<std::vector<std::int64_t>, int> ids;
    std::vector<int> next(n, -1);
    const int inner = valid - 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (ball.dist[i] > inner) continue;
      std::map<int, double> agg;
      for (const auto& s : ball.rows[i]) agg[label[ball.index.at(s.to)]] += s.prob;
      std::vector<std::int64_t> sig{label[i]};
      for (const auto& [l, p] : agg) {
        sig.push_back(l);
        sig.push_back(quantize(p));
      }
      next[i] = ids.try_emplace(std::move(sig), static_cast<int>(ids.size())).first->second;
    }
    valid = inner;
    label = std::move(next);
    const int count = static_cast<int>(ids.size());
    if (count == classes && round > 0) break;
    classes = count;
  }
  auto table = std::make_shared<std::unordered_map<VertexId, int, VertexHash>>();
  int type_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (ball.dist[i] > ball_radius + 1 || label[i] < 0) continue;
    table->emplace(ball.vertices[i], label[i]);
    type_count = std::max(type_count, label[i] + 1);
  }
  ProjectionMap g;
  g.name = "refined(r=" + std::to_string(ball_radius) + ")";
  g.type_count = type_count;
  g.label = [table](const VertexId& v) {
    auto it = table->find(v);
    return it == table->end() ? -1 : it->second;
  };
  return g;
}

double perron_root(const Eigen::MatrixXd& q) {
  if (q.rows() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(q, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double quotient_m1(const Eigen::MatrixXd& q) { return 1.0 / perron_root(q); }

ThresholdEstimate m1_threshold(const TransitionKernel& pU, const VertexId& x, int n_max) {
  const auto z = growth_from_log_mass(log_mass_series(pU, x, n_max));
  ThresholdEstimate t;
  t.value = z.value > 0.0 ? 1.0 / z.value : HUGE_VAL;
  t.depth = z.depth;
  t.underflow_depth = z.underflow_depth;
  return t;
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::global_extinction:
      return "global_extinction";
    case Regime::global_not_local:
      return "global_not_local";
    case Regime::local_possible:
      return "local_possible";
  }
  return "?";
}

RegimeLabel classify_regime(double m, const SpectralSummary& summary) {
  if (!(m > 1.0)) throw std::invalid_argument("classify_regime needs m > 1");
  RegimeLabel r;
  r.m = m;
  r.m1 = summary.phi_U / summary.rho_U;
  r.inv_rho = 1.0 / summary.rho_U;
  if (m <= r.m1)
    r.regime = Regime::global_extinction;
  else if (m <= r.inv_rho)
    r.regime = Regime::global_not_local;
  else
    r.regime = Regime::local_possible;
  return r;
}

}  // namespace brw
