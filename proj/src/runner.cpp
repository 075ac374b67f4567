#include "brwlab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>

#include "brwlab/brw.hpp"
#include "brwlab/chain.hpp"
#include "brwlab/fbrw.hpp"
#include "brwlab/product_lab.hpp"
#include "brwlab/spectral.hpp"
#include "brwlab/tree_lab.hpp"

namespace brw {

using nlohmann::json;

namespace {

/// JSON has no infinities; they become null.
json num(double v) { return std::isfinite(v) ? json(v) : json(); }

json interval(const Interval& i) { return json::array({num(i.lo), num(i.hi)}); }

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string str(std::int64_t v) { return std::to_string(v); }

VertexId start_vertex(const ExperimentConfig& c, const SubgraphSpec& U) {
  if (!c.has("x")) return U.base;
  if (c.family.kind != "tree") throw ConfigError("--x is only supported for tree families");
  return parse_tree_word(c.params.at("x"));
}

std::uint32_t degree_of(const ExperimentConfig& c) {
  const auto d = c.family.empty() ? 3 : c.family.integer("d", 3);
  if (d < 3) throw ConfigError("this command needs a tree family with d >= 3");
  return static_cast<std::uint32_t>(d);
}

double lambda_of(const ExperimentConfig& c) {
  if (c.has("lambda")) return c.number("lambda", 0.0);
  if (c.law.kind == "edge") return c.law.number("lambda");
  throw ConfigError("this command needs lambda (--lambda or an edge law)");
}

std::optional<double> m_of(const ExperimentConfig& c) {
  if (c.has("m")) return c.number("m", 0.0);
  return std::nullopt;
}

json summary_json(const SpectralSummary& s) {
  return json{{"rho_U", num(s.rho_U)},   {"phi_U", num(s.phi_U)},   {"zeta", num(s.zeta)},
              {"m1", num(s.m1)},         {"inv_rho_U", num(1.0 / s.rho_U)},
              {"period", s.period},      {"depth", s.depth},        {"method", to_string(s.method)}};
}

SimulationOptions sim_options(const ExperimentConfig& c) {
  SimulationOptions o;
  o.horizon = c.horizon;
  o.cap = c.cap;
  o.trials = c.trials;
  o.seed = c.seed.value_or(0);
  o.local_threshold = static_cast<std::uint64_t>(c.number("local_threshold", 10));
  return o;
}

// --- commands ----------------------------------------------------------------

void run_spectral(const ExperimentConfig& c, Report& r) {
  const auto g = make_family(c.family);
  const auto U = make_subgraph(c.family, c.subgraph);
  const auto x = start_vertex(c, U);
  const auto s = summarize_subgraph(g.kernel, U, x, c.depth);
  r.json["result"] = summary_json(s);
  r.json["result"]["rho"] = num(s.rho_U);
  const auto pU = restrict_kernel(g.kernel, U);
  const auto ret = log_return_series(pU, x, c.depth);
  const auto mass = log_mass_series(pU, x, c.depth);
  r.csv.columns = {"n", "log_return", "log_stay"};
  for (int n = 0; n <= c.depth; ++n) r.csv.add({str(n), csv_number(ret[n]), csv_number(mass[n])});
}

void run_persist(const ExperimentConfig& c, Report& r) {
  const auto g = make_family(c.family);
  const auto U = make_subgraph(c.family, c.subgraph);
  const auto x = start_vertex(c, U);
  const auto law = make_law(c.family, c.law, m_of(c));
  const auto opt = sim_options(c);
  const auto est = persistence_probability(g.kernel, U, law, x, opt);
  json res{{"law", law.describe()},
           {"mean", num(law.mean())},
           {"trials", est.trials},
           {"persisting", est.persisting},
           {"extinct", est.extinct},
           {"cap_exceeded", est.cap_exceeded},
           {"estimate", num(est.estimate)},
           {"ci", interval(est.ci)},
           {"local_threshold", opt.local_threshold},
           {"local_tail", est.local_tail},
           {"local_tail_fraction", num(est.local_tail_fraction)},
           {"local_tail_ci", interval(est.local_tail_ci)},
           {"max_local_visits", est.max_local_visits},
           {"lumped", est.lumped}};
  if (U.radial_key && law.mean() > 1.0) {
    const auto s = summarize_subgraph(g.kernel, U, x, std::min(c.depth, 1000));
    const auto regime = classify_regime(law.mean(), s);
    res["spectral"] = summary_json(s);
    res["regime"] = to_string(regime.regime);
  }
  r.json["result"] = res;
  r.csv.columns = {"generation", "alive_fraction", "q10", "q50", "q90"};
  for (const auto& q : est.quantiles)
    r.csv.add({str(q.generation), csv_number(q.alive_fraction), csv_number(q.q10), csv_number(q.q50), csv_number(q.q90)});
}

void run_fbrw(const ExperimentConfig& c, Report& r) {
  const auto g = make_family(c.family);
  const auto U = make_subgraph(c.family, c.subgraph);
  const auto x = start_vertex(c, U);
  const auto pU = restrict_kernel(g.kernel, U);
  const int radius = static_cast<int>(c.number("radius", 6));
  const std::string mode = c.params.count("projection") ? c.params.at("projection") : "constant";
  ProjectionMap proj;
  if (mode == "constant")
    proj = constant_projection();
  else if (mode == "refine")
    proj = refine_projection(pU, U.base, radius);
  else
    throw ConfigError("unknown projection '" + mode + "' (constant or refine)");
  const auto check = check_projection(pU, proj, U.base, radius);
  json res{{"projection", proj.name},
           {"verdict", to_string(check.verdict)},
           {"radius", check.radius},
           {"types", proj.type_count},
           {"vertices_checked", check.vertices_checked},
           {"note", check.note}};
  r.csv.columns = {"type", "target", "value"};
  if (check.verdict == Verdict::pass) {
    json q = json::array();
    for (Eigen::Index i = 0; i < check.quotient.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < check.quotient.cols(); ++j) {
        row.push_back(num(check.quotient(i, j)));
        r.csv.add({str(i), str(j), csv_number(check.quotient(i, j))});
      }
      q.push_back(row);
    }
    res["quotient"] = q;
    res["perron_root"] = num(perron_root(check.quotient));
    res["m1"] = num(quotient_m1(check.quotient));
  }
  if (check.witness) {
    const auto& w = *check.witness;
    res["witness"] = json{{"x", to_string(w.x)},     {"x2", to_string(w.x2)},         {"type", w.type},
                          {"target_type", w.target_type}, {"value_x", num(w.value_x)}, {"value_x2", num(w.value_x2)}};
  }
  const auto t = m1_threshold(pU, x, c.depth);
  res["m1_threshold"] = json{{"value", num(t.value)}, {"depth", t.depth}};
  if (U.radial_key) {
    const auto s = summarize_subgraph(g.kernel, U, x, c.depth);
    res["spectral"] = summary_json(s);
    res["sandwich"] = s.phi_U / s.rho_U <= t.value * (1 + 1e-9) && t.value <= (1.0 / s.rho_U) * (1 + 1e-9);
    if (auto m = m_of(c)) res["regime"] = to_string(classify_regime(*m, s).regime);
  }
  r.json["result"] = res;
}

void run_tree_gamma(const ExperimentConfig& c, Report& r) {
  const auto d = static_cast<std::uint32_t>(c.family.empty() ? 3 : c.family.integer("d", 3));
  const auto tree = TreeSpec::homogeneous(d);
  const auto x = c.has("x") ? parse_tree_word(c.params.at("x")) : TreeWord{{0}};
  r.json["result"] = json{{"tree", tree.describe()}, {"x", to_string(x)}, {"gamma", num(boundary_measure(tree, x))}};
  r.csv.columns = {"depth", "level_size", "gamma"};
  for (std::size_t i = 0; i <= x.depth(); ++i)
    r.csv.add({str(static_cast<std::int64_t>(i)), csv_number(tree.level_size(i)), csv_number(1.0 / tree.level_size(i))});
}

/// "a|b|c" -> {a, b, c}.
std::vector<double> bar_list(const std::string& s) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const auto bar = s.find('|', start);
    out.push_back(parse_number(s.substr(start, bar - start)));
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  return out;
}

void run_tree_gw(const ExperimentConfig& c, Report& r) {
  const auto d = static_cast<std::uint32_t>(c.family.empty() ? 3 : c.family.integer("d", 3));
  const int level = static_cast<int>(c.number("level", 12));
  const auto tree = TreeSpec::homogeneous(d);
  const auto p = bar_list(c.params.count("p") ? c.params.at("p") : "0.7");
  std::vector<std::vector<double>> frac(level + 1);
  std::vector<double> boundary;
  for (std::uint64_t t = 0; t < c.trials; ++t) {
    auto rng = trial_rng(*c.seed, t);
    const auto gw = gw_percolate(tree, p, level, rng);
    for (int i = 0; i <= level; ++i) frac[i].push_back(gw.level_counts[i] / tree.level_size(i));
    boundary.push_back(gw.boundary_estimate());
  }
  GWRealization ref;
  ref.p = p;
  const auto b = mean_estimate(boundary);
  const double bound = ref.retention_probability(level);
  r.json["result"] = json{{"tree", tree.describe()},
                          {"level", level},
                          {"realizations", c.trials},
                          {"boundary_mean", num(b.mean)},
                          {"boundary_std_error", num(b.std_error)},
                          {"boundary_ci", interval(b.ci)},
                          {"retention_product", num(bound)},
                          {"within_3sigma_bound", b.mean <= bound + 3 * b.std_error}};
  r.csv.columns = {"level", "mean_fraction", "std_error", "retention_product"};
  for (int i = 0; i <= level; ++i) {
    const auto m = mean_estimate(frac[i]);
    r.csv.add({str(i), csv_number(m.mean), csv_number(m.std_error), csv_number(ref.retention_probability(i))});
  }
}

void run_tree_prune(const ExperimentConfig& c, Report& r) {
  const auto d = degree_of(c);
  const auto D = static_cast<std::uint32_t>(c.number("D", 12));
  std::vector<std::uint32_t> levels;
  if (c.has("levels")) {
    for (double v : bar_list(c.params.at("levels")))
      levels.push_back(static_cast<std::uint32_t>(v));
  } else {
    for (std::uint32_t i = 0; i < std::min<std::uint32_t>(D, 10); ++i) levels.push_back(i);
  }
  r.csv.columns = {"levels_pruned", "depth", "count", "level_size", "ratio", "bound", "within_bound"};
  bool all = true;
  for (std::size_t k = 1; k <= levels.size(); ++k) {
    const std::vector<std::uint32_t> prefix(levels.begin(), levels.begin() + k);
    const auto cert = pruned_certificate(d, prefix, D);
    all = all && cert.within_bound;
    r.csv.add({str(cert.levels), str(D), str(static_cast<std::int64_t>(cert.count)),
               str(static_cast<std::int64_t>(cert.level_size)),
               csv_number(static_cast<double>(cert.count) / cert.level_size),
               csv_number(std::pow((d - 1.0) / d, cert.levels)), cert.within_bound ? "1" : "0"});
  }
  r.json["result"] = json{{"d", d}, {"depth", D}, {"levels", levels}, {"all_within_bound", all}};
}

void run_tree_recursion(const ExperimentConfig& c, Report& r) {
  const auto d = degree_of(c);
  const double lambda = lambda_of(c);
  const int N = static_cast<int>(c.number("N", 60));
  const auto sol = solve_extinction_recursion(lambda, d, N);
  bool decreasing = true;
  for (std::size_t n = 1; n < sol.a.size(); ++n) decreasing = decreasing && sol.a[n] < sol.a[n - 1];
  r.json["result"] = json{{"lambda", lambda},
                          {"d", d},
                          {"regime", to_string(edge_breeding_regime(lambda, d))},
                          {"a1", num(sol.a1)},
                          {"decay_rate", num(sol.decay_rate)},
                          {"fast_root", num(sol.fast_root)},
                          {"max_residual", num(sol.max_residual)},
                          {"strictly_decreasing", decreasing},
                          {"bisection_steps", sol.bisection_steps}};
  r.csv.columns = {"n", "a_n"};
  for (std::size_t n = 0; n < sol.a.size(); ++n) r.csv.add({str(static_cast<std::int64_t>(n)), csv_number(sol.a[n])});
}

void run_tree_asets(const ExperimentConfig& c, Report& r) {
  const auto d = degree_of(c);
  const double lambda = lambda_of(c);
  const auto sol = solve_extinction_recursion(lambda, d, static_cast<int>(c.number("N", 60)));
  const auto A = construct_A_empty(sol, c.number("epsilon", 0.5), static_cast<std::uint32_t>(c.number("step", 1)));
  const auto D = static_cast<std::uint32_t>(c.number("D", 10));
  const auto& prm = A->params();
  r.csv.columns = {"depth", "certified", "level_size"};
  bool full = true;
  for (std::uint32_t k = 1; k <= D; ++k) {
    const auto cert = boundary_certificate(*A, d, k);
    const auto hits = std::count(cert.begin(), cert.end(), 1);
    full = full && hits == static_cast<std::int64_t>(cert.size());
    r.csv.add({str(k), str(hits), str(static_cast<std::int64_t>(cert.size()))});
  }
  const auto P = tree_kernel(TreeSpec::homogeneous(d));
  const auto law = edge_breeding_law(lambda, d);
  SubgraphSpec none;
  none.name = "none";
  const auto est = survival_without_visiting(P, law, TreeWord{}, as_subgraph(A, d), none, sim_options(c));
  r.json["result"] = json{{"set", A->describe()},
                          {"r0", prm.r0},
                          {"step", prm.step},
                          {"c", num(prm.c)},
                          {"delta", num(prm.delta)},
                          {"certified_sum", num(prm.certified_sum)},
                          {"full_certificate_to_depth", D},
                          {"full_certificate", full},
                          {"trials", est.trials},
                          {"survive_in_A", num(est.survive_in_A.estimate)},
                          {"survive_in_A_ci", interval(est.survive_in_A.ci)},
                          {"late_visit_A", num(est.late_visit_A.estimate)},
                          {"late_visit_A_ci", interval(est.late_visit_A.ci)},
                          {"last_visit_A", est.last_visit_A}};
}

void run_product(const ExperimentConfig& c, Report& r) {
  const auto fam = c.family.empty() ? Descriptor::parse("product:d1=3,d2=100,alpha1=3/103") : c.family;
  if (fam.kind != "product") throw ConfigError("product needs a product family");
  ProductSpec spec;
  spec.d1 = static_cast<std::uint32_t>(fam.integer("d1", 3));
  spec.d2 = static_cast<std::uint32_t>(fam.integer("d2", 100));
  spec.alpha1 = fam.number("alpha1", static_cast<double>(spec.d1) / (spec.d1 + spec.d2));
  spec.alpha2 = fam.number("alpha2", 1.0 - spec.alpha1);
  const auto s = product_spectral_summary(spec);
  json res{{"phi", {num(s.phi[0]), num(s.phi[1])}},
           {"fiber1", summary_json(s.fiber[0])},
           {"fiber2", summary_json(s.fiber[1])},
           {"rho_G", num(s.rho_G)},
           {"inv_rho_G", num(s.inv_rho_G)},
           {"recurrence_mean", {num(s.recurrence_mean[0]), num(s.recurrence_mean[1])}}};
  for (int i = 1; i <= 2; ++i) {
    const auto w = transient_window(spec, i);
    res["window" + std::to_string(i)] = json{{"lo", num(w.lo)}, {"hi", num(w.hi)}, {"empty", w.empty()}};
  }
  if (c.number("dp", 1) != 0) {
    const auto dp = product_dp_check(spec, c.depth);
    res["dp"] = json{{"depth", dp.depth},
                     {"rho_G", num(dp.rho_G)},
                     {"fiber1", summary_json(dp.fiber[0])},
                     {"fiber2", summary_json(dp.fiber[1])},
                     {"zeta", {num(dp.zeta[0]), num(dp.zeta[1])}}};
  }
  r.json["result"] = res;
  const auto ret = product_log_returns(spec, std::min(c.depth, 2000));
  r.csv.columns = {"n", "log_return"};
  for (std::size_t n = 0; n < ret.size(); ++n) r.csv.add({str(static_cast<std::int64_t>(n)), csv_number(ret[n])});
}

void run_freeprod(const ExperimentConfig& c, Report& r) {
  const auto fam = c.family.empty() ? Descriptor::parse("free_product:g1=Z2,g2=F2,alpha=0.3") : c.family;
  if (fam.kind != "free_product") throw ConfigError("freeprod needs a free_product family");
  FreeProductSpec spec;
  spec.g1 = FactorGroup::parse(fam.text("g1", "Z2"));
  spec.g2 = FactorGroup::parse(fam.text("g2", "F2"));
  spec.alpha = fam.number("alpha", 0.3);
  const int depth = std::min(c.depth, 2000);
  const auto t = free_product_thresholds(spec, depth);
  json res{{"g1", spec.g1.describe()}, {"g2", spec.g2.describe()}, {"alpha", spec.alpha},
           {"zeta", num(t.zeta)},      {"zeta_stay", num(t.zeta_stay)}, {"zeta_dp", num(t.zeta_dp)},
           {"m0", num(t.m0)},          {"m1", num(t.m1)},               {"depth", t.depth}};
  const auto U = gamma2_copy(spec);
  if (U.radial_key) res["spectral"] = summary_json(summarize_subgraph(free_product_kernel(spec), U, GroupWord{}, depth));
  r.json["result"] = res;
  const auto mass = log_mass_series(restrict_kernel(free_product_kernel(spec), U), GroupWord{}, depth);
  r.csv.columns = {"n", "log_stay"};
  for (int n = 0; n <= depth; ++n) r.csv.add({str(n), csv_number(mass[n])});
}

void run_reproduce(const ExperimentConfig& c, Report& r) {
  ReproduceOptions opt;
  if (c.seed) opt.seed = *c.seed;
  if (c.params.count("filter")) opt.filter = c.params.at("filter");
  const auto rows = reproduce_reference_tables(opt);
  json list = json::array();
  std::size_t failed = 0;
  r.csv.columns = {"name", "group", "value", "expected", "tolerance", "mode", "passed"};
  for (const auto& row : rows) {
    failed += !row.passed;
    list.push_back(json{{"name", row.name},
                        {"group", row.group},
                        {"value", num(row.value)},
                        {"expected", num(row.expected)},
                        {"tolerance", num(row.tolerance)},
                        {"mode", row.mode},
                        {"passed", row.passed}});
    r.csv.add({row.name, row.group, csv_number(row.value), csv_number(row.expected), csv_number(row.tolerance), row.mode,
               row.passed ? "1" : "0"});
  }
  json failing = json::array();
  for (const auto& row : rows)
    if (!row.passed) failing.push_back(row.name);
  r.json["result"] = json{{"seed", opt.seed}, {"rows", list}, {"passed", rows.size() - failed}, {"failed", failed},
                          {"failing", failing}};
  if (failed) r.exit_code = kExitReproduce;
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const SpecError*>(&e) ||
      dynamic_cast<const EncodingError*>(&e) || dynamic_cast<const std::invalid_argument*>(&e))
    return kExitConfig;
  return kExitNumeric;
}

std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_cell(cells[i]);
    }
    out += '\n';
  };
  line(columns);
  for (const auto& row : rows) line(row);
  return out;
}

Report run_experiment(const ExperimentConfig& config) {
  config.validate();
  static const std::map<std::string, std::function<void(const ExperimentConfig&, Report&)>> commands = {
      {"spectral", run_spectral},         {"persist", run_persist},       {"fbrw", run_fbrw},
      {"tree.gamma", run_tree_gamma},     {"tree.gw", run_tree_gw},       {"tree.prune", run_tree_prune},
      {"tree.recursion", run_tree_recursion}, {"tree.asets", run_tree_asets}, {"product", run_product},
      {"freeprod", run_freeprod},         {"reproduce", run_reproduce}};
  Report r;
  r.json = json{{"schema", kReportSchema}, {"version", kVersion}, {"command", config.command}, {"config", config}};
  commands.at(config.command)(config, r);
  return r;
}

void emit_report(const Report& report, const ExperimentConfig& config, std::ostream& console) {
  const bool want_json = config.format != OutputFormat::csv;
  const bool want_csv = config.format != OutputFormat::json;
  if (config.out.empty()) {
    if (want_json) console << report.json.dump(2) << '\n';
    if (want_csv) console << report.csv.str();
    return;
  }
  auto write = [](const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path);
    f << text;
  };
  if (want_json) write(config.out + ".json", report.json.dump(2) + "\n");
  if (want_csv) write(config.out + ".csv", report.csv.str());
}

// --- reproduction suite ---------------------------------------------------------

std::vector<ReproRow> reproduce_reference_tables(const ReproduceOptions& options) {
  struct Entry {
    std::string name, group, mode;
    double expected, tolerance;
    std::function<double()> value;
  };
  const ProductSpec main_product;  // T3 x T100, alpha1 = 3/103
  const double phi1 = 2.0 * std::sqrt(2.0) / 3.0, phi2 = 2.0 * std::sqrt(99.0) / 100.0;
  const double inv_rho_G = 103.0 / (2.0 * std::sqrt(2.0) + 2.0 * std::sqrt(99.0));
  const std::uint64_t seed = options.seed;
  auto summary = [main_product] { return product_spectral_summary(main_product); };

  auto persistence_ci = [seed, main_product](double factor, bool upper) {
    const auto P = product_kernel(main_product);
    const auto U = product_fiber(main_product, 2);
    const double m1 = product_spectral_summary(main_product).fiber[1].m1;
    SimulationOptions o;
    o.trials = 2000;
    o.seed = seed;
    const auto est =
        persistence_probability(P, U, OffspringLaw::geometric_with_mean(factor * m1), ProductVertex{}, o);
    return upper ? est.ci.hi : est.ci.lo;
  };
  struct GWStats {
    MeanEstimate boundary, level6;
  };
  auto gw_stats = [seed] {
    const auto tree = TreeSpec::homogeneous(3);
    std::vector<double> b, l6;
    for (std::uint64_t t = 0; t < 2000; ++t) {
      auto rng = trial_rng(seed, t);
      const auto gw = gw_percolate(tree, {0.7}, 12, rng);
      b.push_back(gw.boundary_estimate());
      l6.push_back(gw.level_counts[6] / tree.level_size(6));
    }
    return GWStats{mean_estimate(b), mean_estimate(l6)};
  };
  auto recursion = [] { return solve_extinction_recursion(0.34, 3, 60); };
  auto regime = [](double lambda) { return static_cast<double>(edge_breeding_regime(lambda, 3)); };

  std::vector<Entry> entries = {
      {"product.phi_U1", "closed_form", "abs", phi1, 1e-9, [=] { return summary().phi[0]; }},
      {"product.phi_U2", "closed_form", "abs", phi2, 1e-9, [=] { return summary().phi[1]; }},
      {"product.m1_U2", "closed_form", "abs", 1.03, 1e-9, [=] { return summary().fiber[1].m1; }},
      {"product.inv_rho_G", "closed_form", "abs", inv_rho_G, 1e-9, [=] { return summary().inv_rho_G; }},
      {"product.inv_rho_G_rounded", "closed_form", "abs", 4.5, 0.05, [=] { return summary().inv_rho_G; }},
      {"product.recurrence_mean_U2", "closed_form", "abs", 103.0 * 103.0 / (200.0 * std::sqrt(99.0)), 1e-9,
       [=] { return summary().recurrence_mean[1]; }},
      {"product.recurrence_mean_U2_rounded", "closed_form", "abs", 5.33, 0.005,
       [=] { return summary().recurrence_mean[1]; }},
      {"product.window_U2_width", "closed_form", "gt", 0.0, 0.0,
       [=] {
         const auto w = transient_window(main_product, 2);
         return w.hi - w.lo;
       }},
      {"freeprod.zeta", "closed_form", "abs", 0.7, 1e-12,
       [] { return free_product_thresholds(FreeProductSpec{}, 50).zeta_stay; }},
      {"freeprod.m1", "closed_form", "abs", 1.0 / 0.7, 1e-9, [] { return free_product_thresholds(FreeProductSpec{}, 50).m1; }},
      {"spectral.T3_radius", "dp", "rel", phi1, 0.02,
       [] { return spectral_radius_estimate(tree_kernel(TreeSpec::homogeneous(3)), TreeWord{}, 2000).value; }},
      {"spectral.fiber_U2_zeta", "dp", "abs", 100.0 / 103.0, 1e-9,
       [=] { return zeta_estimate(product_kernel(main_product), product_fiber(main_product, 2), ProductVertex{}, 2000).value; }},
      {"spectral.product_rho_G", "dp", "rel", 1.0 / inv_rho_G, 0.02,
       [=] { return radius_from_log_series(product_log_returns(main_product, 2000), 2); }},
      {"edge.regime_lambda_0.30", "property", "abs", static_cast<double>(EdgeRegime::global_extinction), 0,
       [=] { return regime(0.30); }},
      {"edge.regime_lambda_0.34", "property", "abs", static_cast<double>(EdgeRegime::global_survival_local_extinction),
       0, [=] { return regime(0.34); }},
      {"edge.regime_lambda_0.40", "property", "abs", static_cast<double>(EdgeRegime::local_survival), 0,
       [=] { return regime(0.40); }},
      {"recursion.max_residual", "property", "le", 1e-10, 0, [=] { return recursion().max_residual; }},
      {"recursion.strictly_decreasing", "property", "abs", 1, 0,
       [=] {
         const auto s = recursion();
         for (std::size_t n = 1; n < s.a.size(); ++n)
           if (!(s.a[n] < s.a[n - 1])) return 0.0;
         return 1.0;
       }},
      {"recursion.decay_vs_fast_root", "property", "rel", 1.0, 1e-3,
       [=] {
         const auto s = recursion();
         return s.decay_rate / s.fast_root;
       }},
      {"prune.certificate_i_le_10", "property", "abs", 1, 0,
       [] {
         for (std::uint32_t i = 1; i <= 10; ++i) {
           std::vector<std::uint32_t> levels(i);
           for (std::uint32_t k = 0; k < i; ++k) levels[k] = k;
           if (!pruned_certificate(3, levels, 12).within_bound) return 0.0;
         }
         return 1.0;
       }},
      {"gw.boundary_mean_bound", "monte_carlo", "le", std::pow(0.7, 12), 0,
       [=] {
         const auto s = gw_stats();
         return s.boundary.mean - 3 * s.boundary.std_error;
       }},
      {"gw.retention_level6", "monte_carlo", "abs", 0.0, 3.0,
       [=] {
         const auto s = gw_stats();
         return (s.level6.mean - std::pow(0.7, 6)) / s.level6.std_error;
       }},
      {"persist.fiber_U2_below_m1", "monte_carlo", "lt", 0.01, 0, [=] { return persistence_ci(0.8, true); }},
      {"persist.fiber_U2_above_m1", "monte_carlo", "gt", 0.0, 0, [=] { return persistence_ci(1.25, false); }},
  };
  std::vector<ReproRow> rows;
  for (const auto& e : entries) {
    if (!options.filter.empty() && e.name.find(options.filter) == std::string::npos) continue;
    if (options.only && std::find(options.only->begin(), options.only->end(), e.name) == options.only->end()) continue;
    ReproRow row{e.name, e.group, e.value(), e.expected, e.tolerance, e.mode, false};
    const double v = row.value, x = row.expected, tol = row.tolerance;
    if (e.mode == "abs")
      row.passed = std::abs(v - x) <= tol;
    else if (e.mode == "rel")
      row.passed = std::abs(v - x) <= tol * std::abs(x);
    else if (e.mode == "le")
      row.passed = v <= x + tol;
    else if (e.mode == "ge")
      row.passed = v >= x - tol;
    else if (e.mode == "lt")
      row.passed = v < x;
    else if (e.mode == "gt")
      row.passed = v > x;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace brw
