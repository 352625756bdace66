#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "conslab/conslaw.hpp"
#include "conslab/csv.hpp"
#include "conslab/gauge.hpp"
#include "conslab/sampling.hpp"
#include "conslab/targets.hpp"
#include "conslab/wente.hpp"

namespace conslab {

enum class ExperimentKind { wente, gauge, conslaw, frames, heinz, convergence };
ExperimentKind parse_experiment(const std::string& name);
std::string experiment_name(ExperimentKind k);

// Residuals tracked by the convergence experiment.
enum class Payload { shatah, conslaw, frames, heinz, harmonic };
Payload parse_payload(const std::string& name);
std::string payload_name(Payload p);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::wente;
  std::string name;             // output stem; empty means the kind name
  std::vector<int> n_list{33};  // odd, ascending
  std::uint64_t seed = 0;

  // wente
  int samples = 20;
  Family family = Family::random;
  BC bc = BC::dirichlet;
  Domain domain = Domain::disk;

  // fixtures
  GeometryKind geometry = GeometryKind::sphere_harmonic;
  std::vector<double> lambdas{0.3};
  double H = 1.0;
  Payload payload = Payload::conslaw;

  // bounds
  double min_slope = 0.9;
  double slack = 0.1;            // on the 1/(2 pi) and 1/sqrt(2 pi) constants
  double gauge_tol = 1e-3;       // residual / ||Omega||, gauge and (A, B) relation
  double ratio_max = 3.0;        // gauge and (A, B) gradient ratios
  double c_spread = 3.0;         // max / min of the empirical second-derivative constant over lambda
  double c_refine = 0.2;         // relative drift of that constant over n
  double hodge_tol = 1e-6;
  double exact_tol = 1e-10;

  GaugeOptions gauge;
  ABOptions ab;
  int jobs = 1;

  std::string stem() const { return name.empty() ? experiment_name(kind) : name; }
};

struct Check {
  std::string name;
  double value = 0.0, bound = 0.0;
  bool upper = true;  // value <= bound, else value >= bound
  bool pass = false;
};

struct ExperimentOutcome {
  std::string name;
  ExperimentKind kind = ExperimentKind::wente;
  std::vector<Check> checks;
  std::vector<std::pair<std::string, Csv>> tables;  // file name, content
  std::vector<std::filesystem::path> files;
  std::string error;  // set when the run threw; pass() is then false
  bool pass() const;
};

// Runs one experiment. Tables are written under out_dir only after the whole
// experiment finished; an empty out_dir keeps them in memory.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir = {});

// One line per check plus a verdict line.
std::string summarize(const ExperimentOutcome& o);

}  // namespace conslab
