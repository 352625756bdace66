#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "conslab/error.hpp"
#include "conslab/experiments.hpp"

namespace conslab {

struct ConfigError : Error {
  using Error::Error;
};

// JSON config: either one flat object describing an experiment, or an object
// with an "experiments" array whose entries override the remaining top-level
// keys. Every key is typed and validated before anything runs; unknown keys
// are errors. The key list is in README.md.
std::vector<ExperimentConfig> parse_config(const std::string& text);
std::vector<ExperimentConfig> load_config(const std::filesystem::path& path);

}  // namespace conslab
