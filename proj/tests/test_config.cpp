#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "brwlab/config.hpp"
#include "brwlab/runner.hpp"
#include "brwlab/tree_lab.hpp"

using namespace brw;

TEST_CASE("numbers and fractions") {
  CHECK(parse_number("2.5") == 2.5);
  CHECK(parse_number("3/103") == doctest::Approx(3.0 / 103.0).epsilon(1e-15));
  CHECK(parse_number("1e-3") == 0.001);
  for (const char* bad : {"", "abc", "1/0", "2x", "/3"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_number(bad), ConfigError);
  }
}

TEST_CASE("descriptor text form round-trips") {
  const auto d = Descriptor::parse("product:d1=3,d2=100,alpha1=3/103");
  CHECK(d.kind == "product");
  CHECK(d.integer("d1") == 3);
  CHECK(d.number("alpha1") == doctest::Approx(3.0 / 103.0));
  CHECK(Descriptor::parse(d.str()) == d);
  const auto f = Descriptor::parse("fiber:2");
  CHECK(f.integer("index") == 2);
  CHECK(Descriptor::parse(f.str()) == f);
  CHECK(Descriptor::parse("all").params.empty());
  CHECK(Descriptor::parse("pmf:p=0.25|0.5|0.25").text("p") == "0.25|0.5|0.25");
  CHECK_THROWS_AS(Descriptor::parse(":x=1"), ConfigError);
  CHECK_THROWS_AS(Descriptor::parse("tree:d=3,d=4"), ConfigError);
  CHECK_THROWS_AS(Descriptor::parse("tree:d="), ConfigError);
  CHECK_THROWS_AS(d.number("missing"), ConfigError);
  CHECK_THROWS_AS(Descriptor::parse("tree:d=2.5").integer("d"), ConfigError);

  nlohmann::json j = d;
  CHECK(j.get<Descriptor>() == d);
  CHECK(nlohmann::json("fiber:2").get<Descriptor>() == f);
}

TEST_CASE("config JSON round-trips and rejects unknown keys") {
  ExperimentConfig c;
  c.command = "persist";
  c.family = Descriptor::parse("product:d1=3,d2=100");
  c.subgraph = Descriptor::parse("fiber:2");
  c.law = Descriptor::parse("geom:m=2");
  c.trials = 500;
  c.seed = 7;
  c.format = OutputFormat::both;
  c.params["radius"] = "4";
  nlohmann::json j = c;
  CHECK(j.get<ExperimentConfig>() == c);

  auto bad = j;
  bad["colour"] = "blue";
  CHECK_THROWS_AS(bad.get<ExperimentConfig>(), ConfigError);
  auto zero = j;
  zero["trials"] = 0;
  CHECK_THROWS_AS(zero.get<ExperimentConfig>().validate(), ConfigError);

  const std::string path = "test_config_roundtrip.json";
  {
    std::ofstream out(path);
    out << j.dump(2);
  }
  CHECK(load_config(path) == c);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_config("no/such/file.json"), ConfigError);
}

TEST_CASE("config validation") {
  ExperimentConfig c;
  c.command = "persist";
  c.params["m"] = "2";
  CHECK(c.stochastic());
  CHECK_THROWS_AS(c.validate(), ConfigError);  // no seed
  c.seed = 1;
  CHECK_NOTHROW(c.validate());
  c.trials = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.trials = 10;
  c.law = Descriptor::parse("geom:m=2");
  CHECK_THROWS_AS(c.validate(), ConfigError);  // both m and a law
  c.law = {};
  c.params["m"] = "-1";
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.params["m"] = "2";
  c.command = "teleport";
  CHECK_THROWS_AS(c.validate(), ConfigError);

  ExperimentConfig s;
  s.command = "spectral";
  CHECK_FALSE(s.stochastic());
  CHECK_NOTHROW(s.validate());
  s.command = "fbrw";
  s.subgraph = Descriptor::parse("gw:p=0.7,depth=6");
  CHECK(s.stochastic());
}

TEST_CASE("family, subgraph and law factories") {
  CHECK_THROWS_AS(make_family(Descriptor::parse("torus:n=3")), ConfigError);
  CHECK_THROWS_AS(make_subgraph(Descriptor::parse("tree:d=3"), Descriptor::parse("fiber:2")), ConfigError);
  CHECK_THROWS_AS(make_subgraph(Descriptor::parse("product"), Descriptor::parse("copy:2")), ConfigError);
  const auto fam = make_family(Descriptor::parse("tree:d=4"));
  CHECK(fam.tree_degree == 4);
  const auto U = make_subgraph(Descriptor::parse("tree:d=3"), Descriptor::parse("prune:levels=1|3"));
  CHECK(U.contains(TreeWord{{0, 0}}));
  CHECK_FALSE(U.contains(TreeWord{{0, 1}}));
  const auto law = make_law(Descriptor::parse("tree:d=3"), Descriptor::parse("edge:lambda=0.34"));
  CHECK(law.mean() == doctest::Approx(1.02));
  CHECK(make_law({}, Descriptor::parse("pmf:p=0.25|0.5|0.25")).mean() == doctest::Approx(1.0));
  CHECK(make_law({}, {}, 2.0).mean() == doctest::Approx(2.0));
  CHECK_THROWS_AS(make_law({}, {}), ConfigError);
  CHECK_THROWS_AS(make_law({}, Descriptor::parse("zipf:s=2")), ConfigError);
}

TEST_CASE("run_experiment: spectral radius of T3") {
  ExperimentConfig c;
  c.command = "spectral";
  c.family = Descriptor::parse("tree:d=3");
  c.depth = 1000;
  const auto r = run_experiment(c);
  CHECK(r.exit_code == kExitOk);
  CHECK(r.json["schema"] == kReportSchema);
  CHECK(r.json["command"] == "spectral");
  CHECK(r.json["result"]["rho"].get<double>() == doctest::Approx(2 * std::sqrt(2.0) / 3).epsilon(0.02));
  CHECK_FALSE(r.csv.rows.empty());
}

TEST_CASE("run_experiment: persistence CSV is byte-identical per seed") {
  ExperimentConfig c;
  c.command = "persist";
  c.family = Descriptor::parse("product:d1=3,d2=100,alpha1=3/103");
  c.subgraph = Descriptor::parse("fiber:2");
  c.params["m"] = "1.5";
  c.trials = 200;
  c.seed = 5;
  const auto a = run_experiment(c).csv.str();
  const auto b = run_experiment(c).csv.str();
  CHECK(a == b);
  CHECK_FALSE(a.empty());
  c.seed = 6;
  CHECK(run_experiment(c).csv.str() != a);
}

TEST_CASE("reproduce with an empty selection runs nothing") {
  ReproduceOptions opt;
  opt.only = std::vector<std::string>{};
  CHECK(reproduce_reference_tables(opt).empty());
  opt.only.reset();
  opt.filter = "no-such-row";
  CHECK(reproduce_reference_tables(opt).empty());
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ConfigError("x")) == kExitConfig);
  CHECK(exit_code_for(SpecError("x")) == kExitConfig);
  CHECK(exit_code_for(EncodingError("x")) == kExitConfig);
  CHECK(exit_code_for(std::invalid_argument("x")) == kExitConfig);
  CHECK(exit_code_for(SolverError("x")) == kExitNumeric);
  CHECK(exit_code_for(std::runtime_error("x")) == kExitNumeric);
  CHECK(csv_number(0.1) == "0.10000000000000001");
  CsvTable t{{"a", "b"}, {}};
  t.add({"1", "2"});
  CHECK(t.str() == "a,b\n1,2\n");
}
