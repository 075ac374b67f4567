#pragma once

// Experiment configuration: descriptors for graph families, subgraphs and
// offspring laws, plus the run parameters. Descriptors have a text form
// "kind:key=value,key=value" (a bare value is stored under "index") and a
// JSON form {"kind": ..., "key": "value", ...}.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "brwlab/kernel.hpp"
#include "brwlab/offspring.hpp"
#include "brwlab/tree_lab.hpp"

namespace brw {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses a decimal number or a fraction "p/q".
double parse_number(const std::string& text);

struct Descriptor {
  std::string kind;
  std::map<std::string, std::string> params;

  static Descriptor parse(const std::string& text);
  std::string str() const;
  bool empty() const { return kind.empty(); }
  bool has(const std::string& key) const { return params.count(key) > 0; }
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  std::int64_t integer(const std::string& key) const;
  std::int64_t integer(const std::string& key, std::int64_t fallback) const;
  std::string text(const std::string& key, const std::string& fallback = "") const;

  bool operator==(const Descriptor&) const = default;
};

void to_json(nlohmann::json& j, const Descriptor& d);
void from_json(const nlohmann::json& j, Descriptor& d);

enum class OutputFormat { json, csv, both };
std::string to_string(OutputFormat f);
OutputFormat parse_format(const std::string& text);

struct ExperimentConfig {
  /// spectral, persist, fbrw, tree.gamma, tree.gw, tree.prune,
  /// tree.recursion, tree.asets, product, freeprod, reproduce.
  std::string command;
  Descriptor family;    // tree:d=3 | product:d1=..,d2=..,alpha1=.. | free_product:g1=Z2,g2=F2,alpha=..
  Descriptor subgraph;  // all | fiber:2 | copy:2 | prune:levels=1.2 | branching:prefix=3,cycle=2 | gw:p=..,depth=..,seed=..
  Descriptor law;       // geom:m=2 | edge:lambda=0.34 | pmf:p=0.25|0.5|0.25 | point:n=2 | powerlog:a=3,b=2
  int horizon = 200;
  double cap = 1e6;
  std::uint64_t trials = 10000;
  int depth = 2000;
  std::optional<std::uint64_t> seed;
  std::string out;  // path prefix; empty writes to stdout
  OutputFormat format = OutputFormat::json;
  /// Command-specific knobs (m, lambda, x, levels, epsilon, radius, filter, ...).
  std::map<std::string, std::string> params;

  /// Throws ConfigError.
  void validate() const;
  bool stochastic() const;
  double number(const std::string& key, double fallback) const;
  bool has(const std::string& key) const { return params.count(key) > 0; }

  bool operator==(const ExperimentConfig&) const = default;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);
ExperimentConfig load_config(const std::string& path);

/// A graph family instantiated from its descriptor.
struct GraphFamily {
  TransitionKernel kernel;
  VertexId origin;
  std::uint32_t tree_degree = 0;  // trees only
};

GraphFamily make_family(const Descriptor& family);
SubgraphSpec make_subgraph(const Descriptor& family, const Descriptor& subgraph);
/// `m` overrides an empty law descriptor with geom:m=<m>.
OffspringLaw make_law(const Descriptor& family, const Descriptor& law, std::optional<double> m = std::nullopt);

}  // namespace brw
