// brwlab: command-line front end for the experiment runner.

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "brwlab/runner.hpp"

namespace {

struct Cli {
  brw::ExperimentConfig config;
  std::optional<std::uint64_t> seed, trials;
  std::optional<int> horizon, depth;
  std::optional<double> cap;
  std::optional<std::string> out, format, family, subgraph, law, config_path;
};

void add_param(CLI::App* app, Cli& cli, const std::string& flag, const std::string& key, const std::string& help) {
  app->add_option_function<std::string>(
      flag, [&cli, key](const std::string& v) { cli.config.params[key] = v; }, help);
}

void add_descriptors(CLI::App* app, Cli& cli, bool with_law) {
  app->add_option("--family", cli.family, "graph family, e.g. tree:d=3 or product:d1=3,d2=100,alpha1=3/103");
  app->add_option("--subgraph", cli.subgraph, "all | fiber:2 | copy:2 | prune:levels=0|1 | branching:cycle=2 | gw:p=0.7,depth=8");
  if (with_law) app->add_option("--law", cli.law, "geom:m=2 | edge:lambda=0.34 | pmf:p=0.2|0.8 | point:2 | powerlog:a=3,b=2");
  add_param(app, cli, "--x", "x", "start vertex (tree word such as 0.1.1)");
}

void tree_family(CLI::App* app, Cli& cli) {
  app->add_option_function<int>(
      "--d", [&cli](int d) { cli.family = "tree:d=" + std::to_string(d); }, "tree degree (default 3)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"brwlab: branching random walks restricted to subgraphs"};
  app.fallthrough();
  app.require_subcommand(1);
  Cli cli;

  app.add_option("--seed", cli.seed, "master seed (required for stochastic commands)");
  app.add_option("--trials", cli.trials, "number of trials or realizations");
  app.add_option("--horizon", cli.horizon, "generations per trial");
  app.add_option("--cap", cli.cap, "population cap");
  app.add_option("--depth", cli.depth, "DP depth");
  app.add_option("--out", cli.out, "output path prefix (writes <out>.json / <out>.csv)");
  app.add_option("--format", cli.format, "json, csv or both")->check(CLI::IsMember({"json", "csv", "both"}));

  auto* spectral = app.add_subcommand("spectral", "spectral radius, phi_U, zeta and m1 of a subgraph");
  add_descriptors(spectral, cli, false);

  auto* persist = app.add_subcommand("persist", "persistence probability of the induced BRW");
  add_descriptors(persist, cli, true);
  add_param(persist, cli, "--m", "m", "geometric offspring law with this mean");
  add_param(persist, cli, "--local-threshold", "local_threshold", "local-visit count for the tail fraction");

  auto* fbrw = app.add_subcommand("fbrw", "check a finite projection and estimate m1");
  add_descriptors(fbrw, cli, false);
  add_param(fbrw, cli, "--radius", "radius", "ball radius for the row check");
  add_param(fbrw, cli, "--projection", "projection", "constant or refine");
  add_param(fbrw, cli, "--m", "m", "mean offspring for the regime label");

  auto* tree = app.add_subcommand("tree", "tree constructions");
  tree->require_subcommand(1);
  auto* gamma = tree->add_subcommand("gamma", "boundary measure of a cylinder");
  tree_family(gamma, cli);
  add_param(gamma, cli, "--x", "x", "tree word");
  auto* gw = tree->add_subcommand("gw", "Galton-Watson percolation boundary estimates");
  tree_family(gw, cli);
  add_param(gw, cli, "--p", "p", "retention probabilities p_0|p_1|... (last repeats)");
  add_param(gw, cli, "--level", "level", "percolation depth");
  auto* prune = tree->add_subcommand("prune", "pruned-tree boundary certificates");
  tree_family(prune, cli);
  add_param(prune, cli, "--levels", "levels", "pruned levels l_1|l_2|...");
  add_param(prune, cli, "--D", "D", "certificate depth");
  auto* recursion = tree->add_subcommand("recursion", "solve the edge-breeding extinction recursion");
  tree_family(recursion, cli);
  add_param(recursion, cli, "--lambda", "lambda", "edge-breeding rate");
  add_param(recursion, cli, "--N", "N", "number of terms");
  auto* asets = tree->add_subcommand("asets", "boundary-dense set visited finitely often");
  tree_family(asets, cli);
  add_param(asets, cli, "--lambda", "lambda", "edge-breeding rate");
  add_param(asets, cli, "--epsilon", "epsilon", "bound on the expected number of visited points");
  add_param(asets, cli, "--step", "step", "depth increment between points");
  add_param(asets, cli, "--D", "D", "certificate depth");
  add_param(asets, cli, "--N", "N", "recursion terms");

  auto* product = app.add_subcommand("product", "closed forms and DP checks on T_d1 x T_d2");
  product->add_option("--family", cli.family, "product:d1=..,d2=..,alpha1=..");
  add_param(product, cli, "--dp", "dp", "1 to run the DP cross-check (default), 0 to skip");

  auto* freeprod = app.add_subcommand("freeprod", "stay thresholds on a free-product factor copy");
  freeprod->add_option("--family", cli.family, "free_product:g1=Z2,g2=F2,alpha=0.3");

  auto* reproduce = app.add_subcommand("reproduce", "fixed suite of reference values");
  add_param(reproduce, cli, "--filter", "filter", "only rows whose name contains this text");

  auto* run = app.add_subcommand("run", "run a JSON config file");
  run->add_option("--config", cli.config_path, "config path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? brw::kExitOk : brw::kExitConfig;
  }

  try {
    auto& c = cli.config;
    if (cli.config_path) {
      c = brw::load_config(*cli.config_path);
    } else {
      const std::map<CLI::App*, std::string> names = {
          {spectral, "spectral"},    {persist, "persist"},   {fbrw, "fbrw"},     {gamma, "tree.gamma"},
          {gw, "tree.gw"},           {prune, "tree.prune"},  {recursion, "tree.recursion"},
          {asets, "tree.asets"},     {product, "product"},   {freeprod, "freeprod"}, {reproduce, "reproduce"}};
      for (const auto& [sub, name] : names)
        if (sub->parsed()) c.command = name;
      const bool tree_cmd = c.command.rfind("tree.", 0) == 0;
      if (cli.family)
        c.family = brw::Descriptor::parse(*cli.family);
      else if (c.command == "spectral" || c.command == "persist" || c.command == "fbrw" || tree_cmd)
        c.family = brw::Descriptor::parse("tree:d=3");
      if (cli.subgraph) c.subgraph = brw::Descriptor::parse(*cli.subgraph);
      if (cli.law) c.law = brw::Descriptor::parse(*cli.law);
    }
    if (cli.seed) c.seed = cli.seed;
    if (cli.trials) c.trials = *cli.trials;
    if (cli.horizon) c.horizon = *cli.horizon;
    if (cli.cap) c.cap = *cli.cap;
    if (cli.depth) c.depth = *cli.depth;
    if (cli.out) c.out = *cli.out;
    if (cli.format) c.format = brw::parse_format(*cli.format);

    const auto report = brw::run_experiment(c);
    brw::emit_report(report, c, std::cout);
    if (report.exit_code != brw::kExitOk) {
      for (const auto& name : report.json["result"].value("failing", nlohmann::json::array()))
        std::cerr << "FAILED " << name.get<std::string>() << '\n';
    }
    return report.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "brwlab: " << e.what() << '\n';
    return brw::exit_code_for(e);
  }
}
