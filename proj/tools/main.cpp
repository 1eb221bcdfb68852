// quddpm command-line runner.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "quddpm/experiment.hpp"
#include "quddpm/parallel.hpp"
#include "quddpm/training.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum denoising diffusion model experiments"};
  app.set_version_flag("--version", quddpm::kVersion);

  std::string preset;
  std::string config_path;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 0;
  std::string mode;
  std::string shots;
  bool dump = false;
  bool quiet = false;
  bool list = false;
  bool print_config = false;
  std::string out_dir = "runs";

  app.add_option("--preset", preset, "Preset name");
  app.add_option("--config", config_path, "JSON config file (a preset tree, possibly edited)");
  app.add_option("--set", overrides, "Override a config value, key=value with dotted keys")->take_all();
  app.add_option_function<std::uint64_t>("--seed", [&](std::uint64_t s) { seed = s; seed_given = true; }, "Master seed");
  app.add_option("--threads", threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  app.add_option("--mode", mode, "Denoising mode")->check(CLI::IsMember({"branched", "sampled"}));
  app.add_option("--shots", shots, "SWAP-test shots per pair, or 'exact'");
  app.add_flag("--dump-ensemble", dump, "Write .qens dumps of target, noise and generated ensembles");
  app.add_option("--out-dir", out_dir, "Output root");
  app.add_flag("--quiet", quiet, "No progress output");
  app.add_flag("--list-presets", list, "Print preset names and exit");
  app.add_flag("--print-config", print_config, "Print the resolved config and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (list) {
    for (const auto& p : quddpm::preset_names()) std::cout << p << '\n';
    return 0;
  }

  try {
    nlohmann::json config;
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      if (!is) throw quddpm::ConfigError("cannot read config file " + config_path);
      nlohmann::json user;
      try {
        user = nlohmann::json::parse(is);
      } catch (const nlohmann::json::parse_error& e) {
        throw quddpm::ConfigError(std::string("config file: ") + e.what());
      }
      // A config file may be a full tree or a run manifest.
      if (user.contains("config") && user.contains("version")) user = user["config"];
      config = quddpm::preset_config(preset.empty() ? user.value("name", std::string("cluster1q")) : preset);
      for (const auto& [key, value] : user.flatten().items()) {
        std::string dotted = key.substr(1);
        for (auto& ch : dotted) if (ch == '/') ch = '.';
        if (!config.contains(nlohmann::json::json_pointer(key))) {
          // Array elements are allowed to be replaced wholesale.
          const auto parent = nlohmann::json::json_pointer(key).parent_pointer();
          if (!config.contains(parent) || !config[parent].is_array()) {
            throw quddpm::ConfigError("unknown config key '" + dotted + "'");
          }
        }
        config[nlohmann::json::json_pointer(key)] = value;
      }
    } else {
      if (preset.empty()) throw quddpm::ConfigError("one of --preset or --config is required");
      config = quddpm::preset_config(preset);
    }
    for (const auto& o : overrides) quddpm::apply_override(config, o);
    if (!mode.empty()) quddpm::apply_override(config, "train.mode=" + mode);
    if (!shots.empty()) quddpm::apply_override(config, "shots=" + shots);
    if (seed_given) config["seed"] = seed;
    quddpm::ensemble_spec_from(config);
    quddpm::train_config_from(config);

    if (print_config) {
      std::cout << config.dump(2) << '\n';
      return 0;
    }
    quddpm::set_thread_count(threads);
    quddpm::RunOptions opts;
    opts.out_dir = out_dir;
    opts.dump_ensembles = dump;
    opts.verbose = !quiet;
    const auto manifest = quddpm::run_experiment(config, opts);
    std::cout << manifest.at("metrics").dump(2) << '\n';
    std::cout << "wrote " << manifest.at("outputs").at("manifest").get<std::string>() << '\n';
    return 0;
  } catch (const quddpm::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const quddpm::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
