#include "quddpm/experiment.hpp"

#include <Eigen/QR>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <tuple>

#include "quddpm/baselines.hpp"
#include "quddpm/metrics.hpp"
#include "quddpm/parallel.hpp"

namespace quddpm {

using nlohmann::json;

namespace {

json base_config() {
  const double s3 = 1.0 / std::sqrt(3.0);
  return {
      {"name", "custom"},
      {"experiment", "train"},
      {"task", "cluster"},
      {"seed", 0},
      {"shots", "exact"},
      {"data",
       {{"kind", "cluster"},
        {"n", 1},
        {"N", 100},
        {"epsilon", 0.08},
        {"c", json::array({json::array({s3, 0.0}), json::array({s3, 0.0}), json::array({s3, 0.0})})},
        {"p", 0.3},
        {"delta0", std::numbers::pi / 3},
        {"g_min", 0.2},
        {"g_max", 0.4}}},
      {"model", {{"n_ancilla", 1}, {"layers", 4}, {"T", 20}}},
      {"schedule", {{"kind", "ramp"}, {"angle_max", std::numbers::pi}, {"g_max", std::numbers::pi}}},
      {"train",
       {{"metric", "mmd"},
        {"mode", "branched"},
        {"iters_per_cycle", 200},
        {"step_size", 0.05},
        {"beta1", 0.9},
        {"beta2", 0.999},
        {"adam_epsilon", 1e-8},
        {"plateau_window", 20},
        {"plateau_tolerance", 1e-5},
        {"init_range", std::numbers::pi},
        {"spsa_probes", 4},
        {"spsa_perturbation", 0.01},
        {"noise", "haar"},
        {"N_test", 100}}},
      {"metrics", {{"ferro_threshold", 0.8}, {"histogram_bins", 20}}},
      {"benchmark", {{"discriminator_layers", 16}, {"gan_cycles", 5}}},
      {"generalization",
       {{"T_values", json::array({5, 10, 20, 40})},
        {"N_values", json::array({25, 50, 100, 200})},
        {"T_fixed", 20},
        {"N_fixed", 100},
        {"validation_N", 4000},
        {"repeats", 3}}},
  };
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"cluster1q", "cluster2q", "cluster4q-generror", "corrnoise", "tfim", "circle", "benchmark2q"};
}

json preset_config(const std::string& name) {
  json c = base_config();
  c["name"] = name;
  if (name == "cluster1q") {
    // defaults
  } else if (name == "cluster2q" || name == "benchmark2q") {
    c["data"]["n"] = 2;
    c["data"]["epsilon"] = 0.06;
    c["model"]["layers"] = 6;
    if (name == "benchmark2q") c["experiment"] = "benchmark";
  } else if (name == "cluster4q-generror") {
    c["experiment"] = "generalization";
    c["data"]["n"] = 4;
    c["data"]["epsilon"] = 0.06;
    c["model"]["n_ancilla"] = 2;
    c["model"]["layers"] = 8;
    c["train"]["iters_per_cycle"] = 1000;
    c["generalization"]["repeats"] = 5;
  } else if (name == "corrnoise") {
    c["task"] = "correlated_noise";
    c["data"]["kind"] = "correlated_noise";
    c["data"]["n"] = 2;
    c["data"]["N"] = 500;
    c["model"]["n_ancilla"] = 2;
    c["model"]["layers"] = 6;
    c["train"]["N_test"] = 2000;
  } else if (name == "tfim") {
    c["task"] = "tfim";
    c["data"]["kind"] = "tfim";
    c["data"]["n"] = 4;
    c["model"]["n_ancilla"] = 2;
    c["model"]["layers"] = 12;
    c["model"]["T"] = 30;
    c["train"]["iters_per_cycle"] = 600;
  } else if (name == "circle") {
    c["task"] = "circle";
    c["data"]["kind"] = "circle";
    c["data"]["N"] = 500;
    c["model"]["n_ancilla"] = 2;
    c["model"]["layers"] = 6;
    c["model"]["T"] = 40;
    c["train"]["metric"] = "wasserstein";
    c["train"]["iters_per_cycle"] = 100;
    c["train"]["N_test"] = 500;
  } else {
    std::string known;
    for (const auto& p : preset_names()) known += (known.empty() ? "" : ", ") + p;
    throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
  }
  return c;
}

void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json* node = &config;
  std::stringstream path(key);
  std::string part;
  while (std::getline(path, part, '.')) {
    if (!node->is_object() || !node->contains(part)) throw ConfigError("unknown config key '" + key + "'");
    node = &(*node)[part];
  }
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  const bool numeric_ok = node->is_number() && value.is_number();
  const bool shots_ok = key == "shots" && (value.is_number_integer() || value == "exact");
  if (key == "shots" && !shots_ok) throw ConfigError("override 'shots' expects \"exact\" or an integer, got '" + text + "'");
  if (!numeric_ok && !shots_ok && node->type() != value.type()) {
    throw ConfigError("override '" + key + "' expects " + std::string(node->type_name()) + ", got '" + text + "'");
  }
  if (node->is_number_integer() && value.is_number_float()) {
    throw ConfigError("override '" + key + "' expects an integer, got '" + text + "'");
  }
  *node = value;
}

namespace {

template <typename T>
T get(const json& j, const char* section, const char* key) {
  try {
    return j.at(section).at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config ") + section + "." + key + ": " + e.what());
  }
}

ShotBudget shots_from(const json& c) {
  const json& s = c.at("shots");
  try {
    return s.is_string() ? ShotBudget::parse(s.get<std::string>()) : ShotBudget::per_pair(s.get<int>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

EnsembleSpec ensemble_spec_from(const json& c) {
  EnsembleSpec s;
  try {
    s.kind = ensemble_kind_from_string(get<std::string>(c, "data", "kind"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  s.n = get<int>(c, "data", "n");
  s.count = get<int>(c, "data", "N");
  s.epsilon = get<double>(c, "data", "epsilon");
  const auto coeffs = get<std::vector<std::vector<double>>>(c, "data", "c");
  if (coeffs.size() != 3) throw ConfigError("data.c needs three [re, im] pairs");
  for (std::size_t i = 0; i < 3; ++i) {
    if (coeffs[i].size() != 2) throw ConfigError("data.c needs three [re, im] pairs");
    s.coefficients[i] = Complex(coeffs[i][0], coeffs[i][1]);
  }
  s.p = get<double>(c, "data", "p");
  s.delta0 = get<double>(c, "data", "delta0");
  s.g_min = get<double>(c, "data", "g_min");
  s.g_max = get<double>(c, "data", "g_max");
  if (s.n < 1 || s.n > 12 || s.count < 1) throw ConfigError("data.n must be in [1, 12] and data.N >= 1");
  if (s.kind == EnsembleSpec::Kind::CorrelatedNoise && s.n != 2) throw ConfigError("correlated noise needs data.n = 2");
  if (s.kind == EnsembleSpec::Kind::Circle && s.n != 1) throw ConfigError("circle needs data.n = 1");
  return s;
}

TrainConfig train_config_from(const json& c) {
  TrainConfig t;
  t.n = get<int>(c, "data", "n");
  t.N = get<int>(c, "data", "N");
  t.n_ancilla = get<int>(c, "model", "n_ancilla");
  t.layers = get<int>(c, "model", "layers");
  t.T = get<int>(c, "model", "T");
  try {
    t.metric = metric_from_string(get<std::string>(c, "train", "metric"));
    t.mode = denoise_mode_from_string(get<std::string>(c, "train", "mode"));
    t.noise = noise_source_from_string(get<std::string>(c, "train", "noise"));
    const auto kind = get<std::string>(c, "schedule", "kind");
    if (kind != "ramp" && kind != "constant") throw std::invalid_argument("schedule.kind must be ramp or constant");
    t.schedule.kind = kind == "ramp" ? DiffusionSchedule::Kind::Ramp : DiffusionSchedule::Kind::Constant;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  t.schedule.angle_max = get<double>(c, "schedule", "angle_max");
  t.schedule.g_max = get<double>(c, "schedule", "g_max");
  t.schedule.T = t.T;
  t.iters_per_cycle = get<int>(c, "train", "iters_per_cycle");
  t.adam.step_size = get<double>(c, "train", "step_size");
  t.adam.beta1 = get<double>(c, "train", "beta1");
  t.adam.beta2 = get<double>(c, "train", "beta2");
  t.adam.epsilon = get<double>(c, "train", "adam_epsilon");
  t.plateau_window = get<int>(c, "train", "plateau_window");
  t.plateau_tolerance = get<double>(c, "train", "plateau_tolerance");
  t.init_range = get<double>(c, "train", "init_range");
  t.spsa.probes = get<int>(c, "train", "spsa_probes");
  t.spsa.perturbation = get<double>(c, "train", "spsa_perturbation");
  t.N_test = get<int>(c, "train", "N_test");
  t.shots = shots_from(c);
  try {
    t.validate();
    Adam(t.adam, 1);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return t;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need two or more points");
  Eigen::MatrixXd a(static_cast<Eigen::Index>(x.size()), 2);
  Eigen::VectorXd b(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("loglog_slope: values must be positive");
    a(static_cast<Eigen::Index>(i), 0) = std::log(x[i]);
    a(static_cast<Eigen::Index>(i), 1) = 1.0;
    b(static_cast<Eigen::Index>(i)) = std::log(y[i]);
  }
  return a.colPivHouseholderQr().solve(b)(0);
}

namespace {

using Clock = std::chrono::steady_clock;

class CurveWriter {
 public:
  void add(int t, const std::string& metric, double value, const std::string& phase) {
    rows_ << t << ',' << metric << ',' << std::setprecision(17) << value << ',' << phase << '\n';
    ++count_;
  }
  void write(const std::filesystem::path& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << "t,metric,value,phase\n" << rows_.str();
  }

 private:
  std::ostringstream rows_;
  int count_ = 0;
};

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

MetricOptions metric_options(const json& c, const EnsembleSpec& spec) {
  MetricOptions o;
  const double norm = std::norm(spec.coefficients[0]) + std::norm(spec.coefficients[1]) + std::norm(spec.coefficients[2]);
  o.c1_abs2 = norm > 0.0 ? std::norm(spec.coefficients[1]) / norm : 0.0;
  o.delta0 = spec.delta0;
  o.ferro_threshold = get<double>(c, "metrics", "ferro_threshold");
  o.histogram_bins = get<int>(c, "metrics", "histogram_bins");
  return o;
}

// Scalar metrics of an ensemble, written as curve rows at step t.
void add_task_rows(CurveWriter& w, int t, const MetricReport& r, const std::string& phase) {
  for (const auto& [k, v] : r.values) {
    if (k == "count" || k.ends_with("_std")) continue;
    w.add(t, k, v, phase);
  }
}

struct RunContext {
  const json& config;
  const RunOptions& opts;
  std::filesystem::path dir;
  RandomStream master;
  json manifest;
  json outputs = json::object();
  json durations = json::object();

  void log(const std::string& msg) const {
    if (opts.verbose) std::cerr << "[" << config.at("name").get<std::string>() << "] " << msg << '\n';
  }
  void output(const std::string& key, const std::filesystem::path& file) { outputs[key] = file.string(); }
};

json run_train(RunContext& ctx) {
  const json& c = ctx.config;
  const EnsembleSpec spec = ensemble_spec_from(c);
  const TrainConfig cfg = train_config_from(c);
  const TaskKind task = task_kind_from_string(c.at("task").get<std::string>());
  const MetricOptions mopts = metric_options(c, spec);

  auto t0 = Clock::now();
  RandomStream data_rng = ctx.master.substream("data");
  const Ensemble target = generate(spec, data_rng);
  const RandomStream train_rng = ctx.master.substream("train");
  const TrainResult res = train(cfg, target, train_rng, [&](const TrainRecord& r) {
    std::ostringstream msg;
    msg << "cycle " << r.cycle << "/" << cfg.T << " step " << r.step << " loss " << std::setprecision(4)
        << r.initial_loss << " -> " << r.final_loss << " after " << r.losses.size() << " evals, D(S~,S0) "
        << r.distance_to_target;
    ctx.log(msg.str());
  });
  ctx.durations["train"] = std::chrono::duration<double>(Clock::now() - t0).count();

  t0 = Clock::now();
  const RandomStream test_rng = ctx.master.substream("test");
  RandomStream noise_rng = test_rng.substream("noise/test");
  const Ensemble test_noise = gen_haar(cfg.n, cfg.N_test, noise_rng);
  const RandomStream test_backward = test_rng.substream("backward/test");

  CurveWriter curves;
  const auto& traj = res.trajectory;
  const std::string metric_name = to_string(cfg.metric);
  const Eigen::VectorXd diffusion = diffusion_distance_curve(traj, target, cfg.metric);
  for (int t = 0; t <= cfg.T; ++t) {
    curves.add(t, metric_name, diffusion(t), "diffusion");
    add_task_rows(curves, t, compute_metrics(traj.at(t), task, mopts), "diffusion");
  }
  curves.add(cfg.T, metric_name, ensemble_distance(cfg.metric, res.noise, target), "training");
  add_task_rows(curves, cfg.T, compute_metrics(res.noise, task, mopts), "training");
  for (const auto& r : res.records) {
    curves.add(r.step - 1, metric_name, r.distance_to_target, "training");
  }
  {
    // Replays the training-noise backward pass for per-step task metrics.
    Ensemble s = res.noise;
    const RandomStream regen = train_rng.substream("train/backward");
    for (int t = cfg.T; t >= 1; --t) {
      s = run_backward_step(res.model, s, t, regen);
      add_task_rows(curves, t - 1, compute_metrics(s, task, mopts), "training");
    }
  }
  Ensemble test = test_noise;
  curves.add(cfg.T, metric_name, ensemble_distance(cfg.metric, test, target), "testing");
  add_task_rows(curves, cfg.T, compute_metrics(test, task, mopts), "testing");
  for (int t = cfg.T; t >= 1; --t) {
    test = run_backward_step(res.model, test, t, test_backward);
    curves.add(t - 1, metric_name, ensemble_distance(cfg.metric, test, target), "testing");
    add_task_rows(curves, t - 1, compute_metrics(test, task, mopts), "testing");
  }
  ctx.durations["evaluate"] = std::chrono::duration<double>(Clock::now() - t0).count();

  json metrics;
  metrics["task"] = to_string(task);
  metrics["metric"] = metric_name;
  metrics["data"] = compute_metrics(target, task, mopts).to_json();
  metrics["diffusion_T"] = compute_metrics(traj.at(cfg.T), task, mopts).to_json();
  metrics["noise"] = compute_metrics(test_noise, task, mopts).to_json();
  metrics["train"] = compute_metrics(res.generated, task, mopts).to_json();
  metrics["test"] = compute_metrics(test, task, mopts).to_json();
  metrics["distance_train"] = ensemble_distance(cfg.metric, res.generated, target);
  metrics["distance_test"] = ensemble_distance(cfg.metric, test, target);
  metrics["mmd_train"] = mmd(res.generated, target);
  metrics["mmd_test"] = mmd(test, target);
  metrics["final_cycle_loss"] = res.records.back().final_loss;
  if (!cfg.shots.exact()) {
    RandomStream shot_rng = ctx.master.substream("shots");
    const FidelityMatrix f = fidelity_matrix(res.generated, target, cfg.shots, &shot_rng);
    const MeasurementError em = measurement_error_estimate(f, cfg.shots.shots);
    metrics["shots"] = cfg.shots.shots;
    metrics["mean_fidelity_shots"] = mean_fidelity(f, res.generated.weights, target.weights);
    metrics["mean_fidelity_exact"] = mean_fidelity(res.generated, target);
    metrics["measurement_error"] = em.one_minus_f;
    metrics["measurement_error_bernoulli"] = em.bernoulli;
  }

  curves.write(ctx.dir / "curves.csv");
  ctx.output("curves", ctx.dir / "curves.csv");
  write_records_csv(ctx.dir / "records.csv", res.records, cfg.metric);
  ctx.output("records", ctx.dir / "records.csv");
  json meta = {{"seed", ctx.config.at("seed")}, {"trajectory_key", traj.seed}, {"config", ctx.config}};
  save_model(ctx.dir / "model.json", res.model, meta);
  ctx.output("model", ctx.dir / "model.json");
  if (ctx.opts.dump_ensembles) {
    const std::vector<std::pair<std::string, const Ensemble*>> dumps = {
        {"target", &target}, {"noise_train", &res.noise}, {"generated_train", &res.generated},
        {"noise_test", &test_noise}, {"generated_test", &test}, {"diffused", &traj.at(cfg.T)}};
    for (const auto& [name, e] : dumps) {
      write_ensemble(ctx.dir / (name + ".qens"), *e);
      ctx.output("ensemble_" + name, ctx.dir / (name + ".qens"));
    }
  }
  return metrics;
}

json run_benchmark(RunContext& ctx) {
  const json& c = ctx.config;
  const EnsembleSpec spec = ensemble_spec_from(c);
  const TrainConfig cfg = train_config_from(c);
  GanSettings gan;
  gan.discriminator_layers = get<int>(c, "benchmark", "discriminator_layers");
  gan.cycles = get<int>(c, "benchmark", "gan_cycles");

  const auto t0 = Clock::now();
  RandomStream data_rng = ctx.master.substream("data");
  const Ensemble target = generate(spec, data_rng);
  const auto report = benchmark_compare(target, cfg, ctx.master.substream("train"), gan);
  ctx.durations["benchmark"] = std::chrono::duration<double>(Clock::now() - t0).count();

  json metrics = json::object();
  std::ofstream records(ctx.dir / "records.csv");
  records << "cycle,iter,loss,metric,seconds,seed,model\n";
  CurveWriter curves;
  for (const auto& e : report) {
    ctx.log(e.model + ": D " + std::to_string(e.distance) + ", F0 train " + std::to_string(e.fidelity_train) +
            ", F0 test " + std::to_string(e.fidelity_test));
    metrics[e.model] = {{"parameters", e.parameters},
                        {"distance", e.distance},
                        {"fidelity_center_train", e.fidelity_train},
                        {"fidelity_center_test", e.fidelity_test}};
    const std::filesystem::path tmp = ctx.dir / ("records-" + e.model + ".csv");
    write_records_csv(tmp, e.records, cfg.metric, e.model);
    std::ifstream in(tmp);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) records << line << '\n';
    in.close();
    std::filesystem::remove(tmp);
    curves.add(0, to_string(cfg.metric) + "_" + e.model, e.distance, "training");
  }
  curves.write(ctx.dir / "curves.csv");
  ctx.output("curves", ctx.dir / "curves.csv");
  ctx.output("records", ctx.dir / "records.csv");
  metrics["metric"] = to_string(cfg.metric);
  metrics["separation"] = std::min(metrics["qudt"]["distance"].get<double>(), metrics["qugan"]["distance"].get<double>()) /
                          std::max(metrics["quddpm"]["distance"].get<double>(), 1e-300);
  return metrics;
}

json run_generalization(RunContext& ctx) {
  const json& c = ctx.config;
  const EnsembleSpec spec0 = ensemble_spec_from(c);
  const TrainConfig cfg0 = train_config_from(c);
  const json& g = c.at("generalization");
  const auto T_values = g.at("T_values").get<std::vector<int>>();
  const auto N_values = g.at("N_values").get<std::vector<int>>();
  const int T_fixed = g.at("T_fixed").get<int>();
  const int N_fixed = g.at("N_fixed").get<int>();
  const int validation_N = g.at("validation_N").get<int>();
  const int repeats = g.at("repeats").get<int>();
  if (repeats < 1 || validation_N < 1 || T_values.size() < 2 || N_values.size() < 2) {
    throw ConfigError("generalization: need repeats >= 1, validation_N >= 1 and two or more sweep values");
  }

  EnsembleSpec vspec = spec0;
  vspec.count = validation_N;
  RandomStream vrng = ctx.master.substream("validation");
  const Ensemble target_val = generate(vspec, vrng);
  RandomStream vnoise = ctx.master.substream("validation/noise");
  const Ensemble noise_val = gen_haar(spec0.n, validation_N, vnoise);

  std::map<std::tuple<int, int, int>, double> done;
  auto measure = [&](int T, int N, int rep) {
    if (const auto it = done.find({T, N, rep}); it != done.end()) return it->second;
    TrainConfig cfg = cfg0;
    cfg.T = T;
    cfg.N = N;
    cfg.schedule.T = T;
    EnsembleSpec spec = spec0;
    spec.count = N;
    const RandomStream run = ctx.master.substream("sweep/T" + std::to_string(T) + "/N" + std::to_string(N), static_cast<std::uint64_t>(rep));
    RandomStream data_rng = run.substream("data");
    const Ensemble target = generate(spec, data_rng);
    const TrainResult res = train(cfg, target, run.substream("train"));
    const double e = generalization_error(res.model, target, target_val, res.noise, noise_val, cfg, run.substream("train"));
    ctx.log("T=" + std::to_string(T) + " N=" + std::to_string(N) + " repeat " + std::to_string(rep) + ": E_gen " + std::to_string(e));
    done[{T, N, rep}] = e;
    return e;
  };

  CurveWriter curves;
  json metrics;
  auto sweep = [&](const std::vector<int>& values, bool over_T, const std::string& label) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (int v : values) {
      double sum = 0.0;
      for (int r = 0; r < repeats; ++r) sum += over_T ? measure(v, N_fixed, r) : measure(T_fixed, v, r);
      xs.push_back(v);
      ys.push_back(sum / repeats);
      curves.add(v, label, ys.back(), "testing");
    }
    metrics[label] = {{"x", xs}, {"e_gen", ys}};
    try {
      metrics[label]["slope"] = loglog_slope(xs, ys);
    } catch (const std::invalid_argument&) {
      metrics[label]["slope"] = nullptr;
    }
  };
  const auto t0 = Clock::now();
  sweep(T_values, true, "egen_vs_T");
  sweep(N_values, false, "egen_vs_N");
  ctx.durations["sweeps"] = std::chrono::duration<double>(Clock::now() - t0).count();
  curves.write(ctx.dir / "curves.csv");
  ctx.output("curves", ctx.dir / "curves.csv");
  return metrics;
}

}  // namespace

json run_experiment(const json& config, const RunOptions& opts) {
  json c = config;
  const auto seed = c.at("seed").get<std::uint64_t>();
  const auto name = c.at("name").get<std::string>();
  const auto experiment = c.at("experiment").get<std::string>();
  // Validate the typed views before creating any output.
  ensemble_spec_from(c);
  train_config_from(c);
  task_kind_from_string(c.at("task").get<std::string>());
  if (experiment != "train" && experiment != "benchmark" && experiment != "generalization") {
    throw ConfigError("unknown experiment '" + experiment + "'");
  }

  RunContext ctx{c, opts, opts.out_dir / (name + "-" + std::to_string(seed)), RandomStream(seed), json::object()};
  std::filesystem::create_directories(ctx.dir);
  const auto t0 = Clock::now();
  json metrics;
  if (experiment == "train") {
    metrics = run_train(ctx);
  } else if (experiment == "benchmark") {
    metrics = run_benchmark(ctx);
  } else {
    metrics = run_generalization(ctx);
  }
  ctx.durations["total"] = std::chrono::duration<double>(Clock::now() - t0).count();
  write_json(ctx.dir / "metrics.json", metrics);
  ctx.output("metrics", ctx.dir / "metrics.json");
  ctx.output("manifest", ctx.dir / "manifest.json");

  json manifest = {{"version", kVersion},
                   {"name", name},
                   {"seed", seed},
                   {"threads", thread_count()},
                   {"config", c},
                   {"durations", ctx.durations},
                   {"outputs", ctx.outputs},
                   {"metrics", metrics}};
  write_json(ctx.dir / "manifest.json", manifest);
  return manifest;
}

json run_preset(const std::string& name, const std::vector<std::string>& overrides, std::uint64_t seed,
                const RunOptions& opts) {
  json c = preset_config(name);
  for (const auto& o : overrides) apply_override(c, o);
  c["seed"] = seed;
  return run_experiment(c, opts);
}

}  // namespace quddpm
