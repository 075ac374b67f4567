#include "brwlab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "brwlab/product_lab.hpp"

namespace brw {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::vector<double> number_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& part : split(s, '|')) out.push_back(parse_number(part));
  return out;
}

std::vector<std::uint32_t> count_list(const std::string& s) {
  std::vector<std::uint32_t> out;
  if (s.empty()) return out;
  for (double v : number_list(s)) {
    if (v < 0 || v != std::floor(v) || v > 4e9) throw ConfigError("expected a non-negative integer, got " + s);
    out.push_back(static_cast<std::uint32_t>(v));
  }
  return out;
}

const std::set<std::string> kStochastic = {"persist", "tree.gw", "tree.asets"};

}  // namespace

double parse_number(const std::string& text) {
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const double q = parse_number(text.substr(0, slash)) / parse_number(text.substr(slash + 1));
    if (!std::isfinite(q)) throw ConfigError("not a number: '" + text + "'");
    return q;
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (text.empty() || used != text.size() || !std::isfinite(v)) throw ConfigError("not a number: '" + text + "'");
  return v;
}

Descriptor Descriptor::parse(const std::string& text) {
  Descriptor d;
  const auto colon = text.find(':');
  d.kind = text.substr(0, colon);
  if (d.kind.empty()) throw ConfigError("descriptor '" + text + "' has no kind");
  if (colon == std::string::npos) return d;
  for (const auto& item : split(text.substr(colon + 1), ',')) {
    const auto eq = item.find('=');
    const std::string key = eq == std::string::npos ? "index" : item.substr(0, eq);
    const std::string value = eq == std::string::npos ? item : item.substr(eq + 1);
    if (key.empty() || value.empty()) throw ConfigError("malformed parameter '" + item + "' in '" + text + "'");
    if (!d.params.emplace(key, value).second) throw ConfigError("duplicate parameter '" + key + "' in '" + text + "'");
  }
  return d;
}

std::string Descriptor::str() const {
  std::string s = kind;
  char sep = ':';
  for (const auto& [k, v] : params) {
    s += sep;
    s += k + "=" + v;
    sep = ',';
  }
  return s;
}

double Descriptor::number(const std::string& key) const {
  auto it = params.find(key);
  if (it == params.end()) throw ConfigError(kind + " descriptor needs parameter '" + key + "'");
  return parse_number(it->second);
}

double Descriptor::number(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::int64_t Descriptor::integer(const std::string& key) const {
  const double v = number(key);
  if (v != std::floor(v) || std::abs(v) > 9e15) throw ConfigError("parameter '" + key + "' must be an integer");
  return static_cast<std::int64_t>(v);
}

std::int64_t Descriptor::integer(const std::string& key, std::int64_t fallback) const {
  return has(key) ? integer(key) : fallback;
}

std::string Descriptor::text(const std::string& key, const std::string& fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void to_json(nlohmann::json& j, const Descriptor& d) {
  j = nlohmann::json::object();
  j["kind"] = d.kind;
  for (const auto& [k, v] : d.params) j[k] = v;
}

void from_json(const nlohmann::json& j, Descriptor& d) {
  d = {};
  if (j.is_string()) {
    d = Descriptor::parse(j.get<std::string>());
    return;
  }
  if (!j.is_object()) throw ConfigError("descriptor must be a string or an object");
  for (const auto& [k, v] : j.items()) {
    std::string value = v.is_string() ? v.get<std::string>() : v.dump();
    if (k == "kind" || k == "family")
      d.kind = value;
    else
      d.params[k] = value;
  }
  if (d.kind.empty()) throw ConfigError("descriptor object needs a 'kind'");
}

std::string to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::json:
      return "json";
    case OutputFormat::csv:
      return "csv";
    case OutputFormat::both:
      return "both";
  }
  return "?";
}

OutputFormat parse_format(const std::string& text) {
  if (text == "json") return OutputFormat::json;
  if (text == "csv") return OutputFormat::csv;
  if (text == "both") return OutputFormat::both;
  throw ConfigError("unknown output format '" + text + "'");
}

bool ExperimentConfig::stochastic() const {
  if (kStochastic.count(command)) return true;
  return command == "fbrw" && subgraph.kind == "gw";
}

double ExperimentConfig::number(const std::string& key, double fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : parse_number(it->second);
}

void ExperimentConfig::validate() const {
  static const std::set<std::string> commands = {"spectral",       "persist",    "fbrw",       "tree.gamma",
                                                 "tree.gw",        "tree.prune", "tree.asets", "tree.recursion",
                                                 "product",        "freeprod",   "reproduce"};
  if (!commands.count(command)) throw ConfigError("unknown command '" + command + "'");
  if (horizon < 1) throw ConfigError("horizon must be positive");
  if (!(cap > 0.0)) throw ConfigError("cap must be positive");
  if (trials < 1) throw ConfigError("trials must be positive");
  if (depth < 1) throw ConfigError("depth must be positive");
  if (stochastic() && !seed) throw ConfigError("command '" + command + "' is stochastic and needs a seed");
  static const std::set<std::string> positive = {"m", "lambda", "epsilon", "radius", "N", "D", "level", "step"};
  for (const auto& [k, v] : params)
    if (positive.count(k) && !(parse_number(v) > 0.0)) throw ConfigError("parameter '" + k + "' must be positive");
  if (has("m") && !law.empty()) throw ConfigError("give either an offspring law or m, not both");
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = nlohmann::json{{"command", c.command},
                     {"family", c.family},
                     {"subgraph", c.subgraph},
                     {"law", c.law},
                     {"horizon", c.horizon},
                     {"cap", c.cap},
                     {"trials", c.trials},
                     {"depth", c.depth},
                     {"seed", c.seed ? nlohmann::json(*c.seed) : nlohmann::json()},
                     {"out", c.out},
                     {"format", to_string(c.format)},
                     {"params", c.params}};
  if (c.law.empty()) j["law"] = nullptr;
  if (c.family.empty()) j["family"] = nullptr;
  if (c.subgraph.empty()) j["subgraph"] = nullptr;
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {"command", "family", "subgraph", "law",    "horizon", "cap",
                                              "trials",  "depth",  "seed",     "out",    "format",  "params"};
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw ConfigError("unknown config key '" + k + "'");
  c = {};
  try {
    c.command = j.at("command").get<std::string>();
    auto descriptor = [&](const char* key, Descriptor& d) {
      if (j.contains(key) && !j[key].is_null()) d = j[key].get<Descriptor>();
    };
    descriptor("family", c.family);
    descriptor("subgraph", c.subgraph);
    descriptor("law", c.law);
    if (j.contains("horizon")) c.horizon = j["horizon"].get<int>();
    if (j.contains("cap")) c.cap = j["cap"].get<double>();
    if (j.contains("trials")) {
      if (j["trials"].is_number_integer() && j["trials"].get<std::int64_t>() < 0)
        throw ConfigError("trials must be positive");
      c.trials = j["trials"].get<std::uint64_t>();
    }
    if (j.contains("depth")) c.depth = j["depth"].get<int>();
    if (j.contains("seed") && !j["seed"].is_null()) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out")) c.out = j["out"].get<std::string>();
    if (j.contains("format")) c.format = parse_format(j["format"].get<std::string>());
    if (j.contains("params"))
      for (const auto& [k, v] : j["params"].items()) c.params[k] = v.is_string() ? v.get<std::string>() : v.dump();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return j.get<ExperimentConfig>();
}

// ---------------------------------------------------------------------------

namespace {

ProductSpec product_spec(const Descriptor& f) {
  ProductSpec s;
  s.d1 = static_cast<std::uint32_t>(f.integer("d1", 3));
  s.d2 = static_cast<std::uint32_t>(f.integer("d2", 100));
  if (f.has("alpha1")) {
    s.alpha1 = f.number("alpha1");
    s.alpha2 = f.has("alpha2") ? f.number("alpha2") : 1.0 - s.alpha1;
  } else if (f.has("alpha2")) {
    s.alpha2 = f.number("alpha2");
    s.alpha1 = 1.0 - s.alpha2;
  } else {
    // Degree-proportional weights: the SRW on the product graph.
    s.alpha1 = static_cast<double>(s.d1) / (s.d1 + s.d2);
    s.alpha2 = static_cast<double>(s.d2) / (s.d1 + s.d2);
  }
  return s;
}

FreeProductSpec free_product_spec(const Descriptor& f) {
  FreeProductSpec s;
  s.g1 = FactorGroup::parse(f.text("g1", "Z2"));
  s.g2 = FactorGroup::parse(f.text("g2", "F2"));
  s.alpha = f.number("alpha", 0.3);
  return s;
}

std::uint32_t tree_degree(const Descriptor& family) {
  if (family.kind != "tree") throw ConfigError("this subgraph needs a tree family");
  const auto d = family.integer("d", 3);
  if (d < 2) throw ConfigError("tree degree must be >= 2");
  return static_cast<std::uint32_t>(d);
}

}  // namespace

GraphFamily make_family(const Descriptor& f) {
  if (f.kind == "tree") {
    if (f.has("prefix") || f.has("cycle")) {
      const auto spec = TreeSpec::branching(count_list(f.text("prefix")), count_list(f.text("cycle", "1")));
      return {tree_kernel(spec), TreeWord{}, 0};
    }
    const auto d = tree_degree(f);
    return {tree_kernel(TreeSpec::homogeneous(d)), TreeWord{}, d};
  }
  if (f.kind == "product") return {product_kernel(product_spec(f)), ProductVertex{}, 0};
  if (f.kind == "free_product") return {free_product_kernel(free_product_spec(f)), GroupWord{}, 0};
  throw ConfigError("unknown graph family '" + f.kind + "'");
}

SubgraphSpec make_subgraph(const Descriptor& family, const Descriptor& sub) {
  if (sub.empty() || sub.kind == "all") {
    const auto g = make_family(family);
    return whole_graph(g.kernel, g.origin);
  }
  if (sub.kind == "fiber") {
    if (family.kind != "product") throw ConfigError("fiber subgraphs need a product family");
    return product_fiber(product_spec(family), static_cast<int>(sub.integer("index", 2)));
  }
  if (sub.kind == "copy") {
    if (family.kind != "free_product") throw ConfigError("copy subgraphs need a free_product family");
    if (sub.integer("index", 2) != 2) throw ConfigError("only the copy of the second factor is supported");
    return gamma2_copy(free_product_spec(family));
  }
  if (sub.kind == "prune") {
    const auto d = tree_degree(family);
    const bool every = sub.text("every", "0") == "1";
    return prune_tree(d, count_list(sub.text("levels")), every);
  }
  if (sub.kind == "branching") {
    const auto d = tree_degree(family);
    const auto spec = TreeSpec::branching(count_list(sub.text("prefix")), count_list(sub.text("cycle", "1")));
    return as_subgraph(branching_subtree(d, spec), d, true);
  }
  if (sub.kind == "gw") {
    const auto d = tree_degree(family);
    Rng rng = trial_rng(static_cast<std::uint64_t>(sub.integer("seed", 1)), 0);
    auto gw = std::make_shared<GWRealization>(
        gw_percolate(TreeSpec::homogeneous(d), number_list(sub.text("p", "0.7")), static_cast<int>(sub.integer("depth", 12)), rng));
    return as_subgraph(gw_cluster_set(std::move(gw)), d, false);
  }
  throw ConfigError("unknown subgraph '" + sub.kind + "'");
}

OffspringLaw make_law(const Descriptor& family, const Descriptor& law, std::optional<double> m) {
  if (law.empty()) {
    if (!m) throw ConfigError("an offspring law (or m) is required");
    return OffspringLaw::geometric_with_mean(*m);
  }
  if (law.kind == "geom") return OffspringLaw::geometric_with_mean(law.number("m"));
  if (law.kind == "edge") {
    const auto d = law.has("d") ? static_cast<std::uint32_t>(law.integer("d")) : tree_degree(family);
    return edge_breeding_law(law.number("lambda"), d);
  }
  if (law.kind == "pmf") return OffspringLaw::from_pmf(number_list(law.text("p")));
  if (law.kind == "point") return OffspringLaw::point_mass(static_cast<std::uint32_t>(law.integer("n", law.integer("index", 2))));
  if (law.kind == "powerlog") return OffspringLaw::power_log_tail(law.number("a"), law.number("b", 0.0));
  throw ConfigError("unknown offspring law '" + law.kind + "'");
}

}  // namespace brw
