#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "quddpm/datasets.hpp"
#include "quddpm/training.hpp"

namespace quddpm {

inline constexpr const char* kVersion = "0.1.0";

/// Unknown preset, unknown key, or a value of the wrong type.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::vector<std::string> preset_names();

/// Full configuration tree of a preset; throws ConfigError for unknown names.
nlohmann::json preset_config(const std::string& name);

/// Applies "a.b.c=value". The key must already exist and the value must parse
/// to the same JSON type (numbers interchange freely, "exact" shots stay strings).
void apply_override(nlohmann::json& config, const std::string& assignment);

/// Checks every field and returns the typed views; throws ConfigError.
EnsembleSpec ensemble_spec_from(const nlohmann::json& config);
TrainConfig train_config_from(const nlohmann::json& config);

struct RunOptions {
  std::filesystem::path out_dir = "runs";
  bool dump_ensembles = false;
  bool verbose = true;
};

/// Runs the experiment named by config["experiment"] and writes
/// <out_dir>/<name>-<seed>/{manifest.json, curves.csv, metrics.json, records.csv,
/// model.json, *.qens}. Returns the manifest.
nlohmann::json run_experiment(const nlohmann::json& config, const RunOptions& opts);

nlohmann::json run_preset(const std::string& name, const std::vector<std::string>& overrides,
                          std::uint64_t seed, const RunOptions& opts);

/// Least-squares slope of log(y) against log(x); non-positive y are rejected.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace quddpm
