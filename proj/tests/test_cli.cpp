#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "conslab/config.hpp"
#include "conslab/convergence.hpp"
#include "conslab/csv.hpp"
#include "conslab/experiments.hpp"
#include "doctest.h"

using namespace conslab;

TEST_CASE("slope fit") {
  std::vector<double> h{0.1, 0.05, 0.025, 0.0125}, r;
  for (double x : h) r.push_back(3.0 * x * x);
  const SlopeFit f = fit_slope(h, r, 0.9, 3);
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-6));
  REQUIRE(f.pair_slopes.size() == 3);
  for (double s : f.pair_slopes) CHECK(s == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(f.pass);

  const SlopeFit flat = fit_slope(h, std::vector<double>(4, 0.5), 0.9, 3);
  CHECK(std::abs(flat.slope) < 1e-12);
  CHECK_FALSE(flat.pass);

  CHECK_THROWS_AS(fit_slope({0.1, 0.05}, {1.0, 0.5}, 0.9, 3), Error);
  CHECK_THROWS_AS(fit_slope({0.1, 0.05, 0.025}, {1.0, 0.0, 0.5}, 0.9, 3), Error);
}

TEST_CASE("csv formatting round trips") {
  Csv t({"a", "b", "c"});
  t.row().add(0.1).add(3).add(std::string("x"));
  t.row().add(1.0 / 3.0).add(-7).add(std::string("y"));
  const std::string s = t.str();
  CHECK(s.rfind("a,b,c\n0.10000000000000001,3,x\n", 0) == 0);
  CHECK(std::stod(Csv::num(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK_THROWS_AS(Csv({"a"}).row().add(std::string("x,y")), Error);
  Csv incomplete({"a", "b"});
  incomplete.row().add(1);
  CHECK_THROWS_AS(incomplete.str(), Error);

  const auto dir = std::filesystem::temp_directory_path() / "conslab_csv_test";
  std::filesystem::remove_all(dir);
  t.write(dir / "t.csv");
  std::ifstream f(dir / "t.csv");
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == s);
  CHECK_FALSE(std::filesystem::exists(dir / "t.csv.tmp"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("config parsing") {
  const auto one = parse_config(R"({"experiment": "wente", "n": [33, 65], "seed": 7, "family": "bubble"})");
  REQUIRE(one.size() == 1);
  CHECK(one[0].kind == ExperimentKind::wente);
  CHECK(one[0].n_list == std::vector<int>{33, 65});
  CHECK(one[0].seed == 7);
  CHECK(one[0].family == Family::bubble);
  CHECK(one[0].stem() == "wente");

  const auto many = parse_config(R"({"n": [33], "lambda": 0.2, "experiments": [
      {"experiment": "gauge"}, {"experiment": "frames", "lambdas": [0.1, 0.3]}]})");
  REQUIRE(many.size() == 2);
  CHECK(many[0].lambdas == std::vector<double>{0.2});
  CHECK(many[1].lambdas == std::vector<double>{0.1, 0.3});
  CHECK(many[1].n_list == std::vector<int>{33});

  const auto bad = [](const char* text, const char* needle) {
    CHECK_THROWS_WITH_AS(parse_config(text), doctest::Contains(needle), ConfigError);
  };
  bad("{", "not valid JSON");
  bad("[1]", "must be a JSON object");
  bad(R"({"n": [33]})", "missing 'experiment'");
  bad(R"({"experiment": "wente", "grid": 33})", "unknown key 'grid'");
  bad(R"({"experiment": "wente", "n": [32]})", "must be odd");
  bad(R"({"experiment": "wente", "n": [65, 33]})", "ascending");
  bad(R"({"experiment": "wente", "n": 33})", "array");
  bad(R"({"experiment": "wente", "seed": "x"})", "'seed' must be an integer");
  bad(R"({"experiment": "convergence", "n": [33, 65]})", "at least 3");
  bad(R"({"experiment": "fourier"})", "unknown experiment");
  bad(R"({"experiment": "wente", "family": "noise"})", "'family'");
  bad(R"({"experiment": "heinz", "H": 0})", "nonzero");
  bad(R"({"experiment": "frames", "geometry": "mean_curvature"})", "sphere_harmonic");
  bad(R"({"experiments": [{"experiment": "wente"}, {"experiment": "wente"}]})", "duplicate");
  bad(R"({"experiment": "wente", "name": "../x"})", "plain file stem");
}

TEST_CASE("wente experiment: 20 rows, deterministic bytes") {
  ExperimentConfig c;
  c.kind = ExperimentKind::wente;
  c.n_list = {33};
  c.seed = 7;
  const ExperimentOutcome a = run_experiment(c), b = run_experiment(c);
  CHECK(a.pass());
  REQUIRE(a.tables.size() == 1);
  CHECK(a.tables[0].first == "wente.csv");
  CHECK(a.tables[0].second.rows() == 20);
  CHECK(a.tables[0].second.str() == b.tables[0].second.str());
  CHECK(summarize(a).find("PASS") != std::string::npos);
}

TEST_CASE("heinz experiment") {
  ExperimentConfig c;
  c.kind = ExperimentKind::heinz;
  c.H = 2.0;
  c.lambdas = {0.5};
  c.n_list = {33, 65};
  const ExperimentOutcome o = run_experiment(c);
  CHECK(o.pass());
  CHECK(o.tables.size() == 2);
}

TEST_CASE("convergence experiment flags a residual that does not decay") {
  ExperimentConfig c;
  c.kind = ExperimentKind::convergence;
  c.payload = Payload::heinz;
  c.H = 2.0;
  c.lambdas = {0.5};
  c.n_list = {17, 33, 65};
  c.min_slope = 1.9;
  CHECK(run_experiment(c).pass());
  c.min_slope = 3.0;
  const ExperimentOutcome o = run_experiment(c);
  CHECK_FALSE(o.pass());
  CHECK(o.error.empty());
}

TEST_CASE("experiment errors are reported, not thrown") {
  ExperimentConfig c;
  c.kind = ExperimentKind::gauge;
  c.n_list = {17};
  c.lambdas = {3.0};  // energy far above the smallness threshold
  const ExperimentOutcome o = run_experiment(c);
  CHECK_FALSE(o.pass());
  CHECK(o.error.find("smallness") != std::string::npos);
  CHECK(o.tables.empty());
}
