#include "conslab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace conslab {

namespace {

using json = nlohmann::json;

const std::set<std::string> kKeys = {
    "experiment", "name",      "n",         "seed",      "samples",    "family",        "bc",
    "domain",     "geometry",  "lambda",    "lambdas",   "H",          "payload",       "min_slope",
    "slack",      "gauge_tol", "ratio_max", "c_spread",  "c_refine",   "hodge_tol",     "exact_tol",
    "eps",        "force",     "max_iter",  "tol_div",   "polish_iters", "fp_tol",      "max_sweeps",
    "jobs"};

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw ConfigError(where + ": " + msg);
}

double get_number(const json& v, const std::string& key, const std::string& where) {
  if (!v.is_number()) fail(where, "'" + key + "' must be a number");
  return v.get<double>();
}

long long get_int(const json& v, const std::string& key, const std::string& where) {
  if (!v.is_number_integer()) fail(where, "'" + key + "' must be an integer");
  return v.get<long long>();
}

std::string get_string(const json& v, const std::string& key, const std::string& where) {
  if (!v.is_string()) fail(where, "'" + key + "' must be a string");
  return v.get<std::string>();
}

double positive(double x, const std::string& key, const std::string& where) {
  if (!(x > 0.0)) fail(where, "'" + key + "' must be positive");
  return x;
}

template <class F>
auto named(const std::string& key, const std::string& where, F&& parse) {
  try {
    return parse();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail(where, "'" + key + "': " + e.what());
  }
}

ExperimentConfig build(const json& obj, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!kKeys.count(it.key())) fail(where, "unknown key '" + it.key() + "'");
  if (!obj.contains("experiment")) fail(where, "missing 'experiment'");

  ExperimentConfig c;
  const std::string kind = get_string(obj["experiment"], "experiment", where);
  c.kind = named("experiment", where, [&] { return parse_experiment(kind); });

  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    if (k == "experiment") continue;
    if (k == "name") {
      c.name = get_string(v, k, where);
      if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos || c.name[0] == '.')
        fail(where, "'name' must be a plain file stem");
    } else if (k == "n") {
      if (!v.is_array() || v.empty()) fail(where, "'n' must be a non-empty array of grid sizes");
      c.n_list.clear();
      for (const auto& e : v) c.n_list.push_back(static_cast<int>(get_int(e, k, where)));
    } else if (k == "seed") {
      const long long s = get_int(v, k, where);
      if (s < 0) fail(where, "'seed' must be non-negative");
      c.seed = static_cast<std::uint64_t>(s);
    } else if (k == "samples") {
      c.samples = static_cast<int>(get_int(v, k, where));
      if (c.samples < 1) fail(where, "'samples' must be >= 1");
    } else if (k == "family") {
      const std::string s = get_string(v, k, where);
      c.family = named(k, where, [&] { return parse_family(s); });
    } else if (k == "bc") {
      const std::string s = get_string(v, k, where);
      c.bc = named(k, where, [&] { return parse_bc(s); });
    } else if (k == "domain") {
      const std::string s = get_string(v, k, where);
      if (s == "disk") c.domain = Domain::disk;
      else if (s == "square") c.domain = Domain::square;
      else fail(where, "'domain' must be disk or square");
    } else if (k == "geometry") {
      const std::string s = get_string(v, k, where);
      c.geometry = named(k, where, [&] { return parse_geometry(s); });
    } else if (k == "lambda") {
      c.lambdas = {positive(get_number(v, k, where), k, where)};
    } else if (k == "lambdas") {
      if (!v.is_array() || v.empty()) fail(where, "'lambdas' must be a non-empty array");
      c.lambdas.clear();
      for (const auto& e : v) c.lambdas.push_back(positive(get_number(e, k, where), k, where));
    } else if (k == "H") {
      c.H = get_number(v, k, where);
      if (c.H == 0.0) fail(where, "'H' must be nonzero");
    } else if (k == "payload") {
      const std::string s = get_string(v, k, where);
      c.payload = named(k, where, [&] { return parse_payload(s); });
    } else if (k == "min_slope") {
      c.min_slope = get_number(v, k, where);
    } else if (k == "slack") {
      c.slack = get_number(v, k, where);
      if (c.slack < 0.0) fail(where, "'slack' must be non-negative");
    } else if (k == "gauge_tol") {
      c.gauge_tol = positive(get_number(v, k, where), k, where);
    } else if (k == "ratio_max") {
      c.ratio_max = positive(get_number(v, k, where), k, where);
    } else if (k == "c_spread") {
      c.c_spread = get_number(v, k, where);
      if (!(c.c_spread >= 1.0)) fail(where, "'c_spread' must be >= 1");
    } else if (k == "c_refine") {
      c.c_refine = positive(get_number(v, k, where), k, where);
    } else if (k == "hodge_tol") {
      c.hodge_tol = positive(get_number(v, k, where), k, where);
    } else if (k == "exact_tol") {
      c.exact_tol = positive(get_number(v, k, where), k, where);
    } else if (k == "eps") {
      c.gauge.eps = positive(get_number(v, k, where), k, where);
    } else if (k == "force") {
      if (!v.is_boolean()) fail(where, "'force' must be true or false");
      c.gauge.force = v.get<bool>();
    } else if (k == "max_iter") {
      c.gauge.max_iter = static_cast<int>(get_int(v, k, where));
      if (c.gauge.max_iter < 1) fail(where, "'max_iter' must be >= 1");
    } else if (k == "tol_div") {
      c.gauge.tol_div = positive(get_number(v, k, where), k, where);
    } else if (k == "polish_iters") {
      c.gauge.polish_iters = static_cast<int>(get_int(v, k, where));
      if (c.gauge.polish_iters < 0) fail(where, "'polish_iters' must be >= 0");
    } else if (k == "fp_tol") {
      c.ab.tol_fp = positive(get_number(v, k, where), k, where);
    } else if (k == "max_sweeps") {
      c.ab.max_sweeps = static_cast<int>(get_int(v, k, where));
      if (c.ab.max_sweeps < 1) fail(where, "'max_sweeps' must be >= 1");
    } else if (k == "jobs") {
      c.jobs = static_cast<int>(get_int(v, k, where));
      if (c.jobs < 1) fail(where, "'jobs' must be >= 1");
    }
  }

  for (size_t i = 0; i < c.n_list.size(); ++i) {
    const int n = c.n_list[i];
    if (n < 17 || n % 2 == 0) fail(where, "grid size " + std::to_string(n) + " must be odd and >= 17");
    if (i && n <= c.n_list[i - 1]) fail(where, "grid sizes must be strictly ascending");
  }
  if (c.kind == ExperimentKind::convergence && c.n_list.size() < 3)
    fail(where, "convergence needs at least 3 grid sizes");
  if (c.kind == ExperimentKind::frames && c.geometry != GeometryKind::sphere_harmonic)
    fail(where, "frames runs on the sphere_harmonic geometry only");
  if (c.kind == ExperimentKind::heinz && obj.contains("geometry") && c.geometry != GeometryKind::mean_curvature)
    fail(where, "heinz uses the mean_curvature geometry");
  return c;
}

}  // namespace

std::vector<ExperimentConfig> parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object");

  std::vector<ExperimentConfig> out;
  if (root.contains("experiments")) {
    const json& list = root["experiments"];
    if (!list.is_array() || list.empty()) throw ConfigError("'experiments' must be a non-empty array");
    json defaults = root;
    defaults.erase("experiments");
    for (size_t i = 0; i < list.size(); ++i) {
      if (!list[i].is_object()) throw ConfigError("experiments[" + std::to_string(i) + "] must be an object");
      json merged = defaults;
      merged.update(list[i]);
      out.push_back(build(merged, "experiments[" + std::to_string(i) + "]"));
    }
  } else {
    out.push_back(build(root, "config"));
  }

  std::set<std::string> stems;
  for (const auto& c : out)
    if (!stems.insert(c.stem()).second)
      throw ConfigError("duplicate experiment name '" + c.stem() + "'; set distinct 'name' keys");
  return out;
}

std::vector<ExperimentConfig> load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace conslab
