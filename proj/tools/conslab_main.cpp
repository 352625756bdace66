#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "conslab/config.hpp"
#include "conslab/experiments.hpp"

namespace fs = std::filesystem;

namespace {

// 0 pass, 1 a bound failed or an experiment threw, 2 usage or config error.
constexpr int kPass = 0, kFail = 1, kUsage = 2;

int run(const std::string& config_path, std::string out, const std::string& seed, int jobs) {
  std::vector<conslab::ExperimentConfig> configs;
  try {
    configs = conslab::load_config(config_path);
  } catch (const conslab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n"
              << "schema: see the Config section of README.md\n";
    return kUsage;
  }
  if (!seed.empty()) {
    try {
      size_t used = 0;
      const unsigned long long s = std::stoull(seed, &used);
      if (used != seed.size()) throw std::invalid_argument(seed);
      for (auto& c : configs) c.seed = s;
    } catch (const std::exception&) {
      std::cerr << "usage error: --seed must be a non-negative integer\n";
      return kUsage;
    }
  }
  // --jobs overrides the per-experiment key; without it experiments run one at a time.
  if (jobs > 0)
    for (auto& c : configs) c.jobs = jobs;
  const size_t batch_size = jobs > 0 ? static_cast<size_t>(jobs) : 1;

  if (out.empty()) {
    const char* env = std::getenv("CONSLAB_OUT");
    out = env && *env ? env : "conslab_out";
  }
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) {
    std::cerr << "usage error: output directory " << out << " is not writable\n";
    return kUsage;
  }

  // Experiments write distinct files; the summary is printed after the join.
  std::vector<conslab::ExperimentOutcome> outcomes(configs.size());
  for (size_t start = 0; start < configs.size(); start += batch_size) {
    std::vector<std::future<conslab::ExperimentOutcome>> batch;
    for (size_t i = start; i < std::min(configs.size(), start + batch_size); ++i)
      batch.push_back(std::async(std::launch::async, [&, i] { return conslab::run_experiment(configs[i], out); }));
    for (size_t k = 0; k < batch.size(); ++k) outcomes[start + k] = batch[k].get();
  }

  bool ok = true;
  for (const auto& o : outcomes) {
    std::cout << conslab::summarize(o);
    for (const auto& f : o.files) std::cout << "  wrote " << f.string() << "\n";
    ok = ok && o.pass();
  }
  return ok ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conslab: conservation-law experiments on the unit disk"};
  app.require_subcommand(1);
  std::string config, out, seed;
  int jobs = 0;
  auto* cmd = app.add_subcommand("run", "Run the experiments described by a JSON config file");
  cmd->add_option("config", config, "Config file")->required();
  cmd->add_option("--out", out, "Output directory (default: $CONSLAB_OUT, else ./conslab_out)");
  cmd->add_option("--seed", seed, "Override the seed of every experiment");
  cmd->add_option("--jobs", jobs, "Parallel experiments and Wente samples")->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }
  return run(config, out, seed, jobs);
}
