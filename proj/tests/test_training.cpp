#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "quddpm/datasets.hpp"
#include "quddpm/parallel.hpp"
#include "quddpm/training.hpp"

using namespace quddpm;

namespace {

TrainConfig small_config() {
  TrainConfig cfg;
  cfg.n = 1;
  cfg.n_ancilla = 1;
  cfg.layers = 2;
  cfg.T = 3;
  cfg.N = 20;
  cfg.N_test = 20;
  cfg.iters_per_cycle = 15;
  cfg.schedule.T = 3;
  return cfg;
}

DenoiseStep random_step(int nd, int na, int layers, RandomStream& rng) {
  DenoiseStep s(nd, na, layers);
  for (auto& t : s.params.theta) t = rng.uniform(-3.2, 3.2);
  return s;
}

}  // namespace

TEST_SUITE("training") {

TEST_CASE("config validation") {
  TrainConfig cfg = small_config();
  CHECK_NOTHROW(cfg.validate());
  cfg.layers = 0;
  CHECK_THROWS(cfg.validate());
  cfg = small_config();
  cfg.n_ancilla = 20;
  CHECK_THROWS(cfg.validate());
  cfg = small_config();
  cfg.spsa.probes = 0;
  CHECK_THROWS(cfg.validate());
  CHECK(noise_source_from_string(to_string(NoiseSource::Scrambling)) == NoiseSource::Scrambling);
}

TEST_CASE("MMD step objective: value, adjoint, shift rule and finite differences") {
  RandomStream rng(1);
  const auto step = random_step(2, 1, 2, rng);
  const auto input = gen_haar(2, 12, rng);
  const auto target = gen_cluster(2, 0.1, 9, rng);
  TrainConfig cfg = small_config();
  cfg.n = 2;
  const StepObjective obj(step, input, target, cfg);
  REQUIRE(obj.has_gradient());
  const auto vg = obj.value_gradient(step.params);
  CHECK(vg.value == doctest::Approx(mmd(apply_step_branched(step, input), target)).epsilon(1e-12));
  const double h = 1e-5;
  for (Eigen::Index k = 0; k < step.params.size(); ++k) {
    HeaParams a = step.params, b = step.params;
    a.theta(k) += h;
    b.theta(k) -= h;
    const double fd = (obj.value_gradient(a).value - obj.value_gradient(b).value) / (2 * h);
    CHECK(std::abs(vg.gradient(k) - fd) < 1e-6);
    CHECK(std::abs(vg.gradient(k) - mmd_shift_gradient(step, input, target, k)) < 1e-10);
  }
}

TEST_CASE("Wasserstein step objective gradient matches finite differences") {
  RandomStream rng(2);
  const auto step = random_step(1, 2, 3, rng);
  const auto input = gen_haar(1, 20, rng);
  const auto target = gen_circle(15, rng);
  TrainConfig cfg = small_config();
  cfg.n_ancilla = 2;
  cfg.metric = Metric::Wasserstein;
  const StepObjective obj(step, input, target, cfg);
  REQUIRE(obj.has_gradient());
  const auto vg = obj.value_gradient(step.params);
  CHECK(vg.value == doctest::Approx(wasserstein(apply_step_branched(step, input), target)).epsilon(1e-10));
  const double h = 1e-6;
  for (Eigen::Index k = 0; k < step.params.size(); ++k) {
    HeaParams a = step.params, b = step.params;
    a.theta(k) += h;
    b.theta(k) -= h;
    const double fd = (obj.value_gradient(a).value - obj.value_gradient(b).value) / (2 * h);
    CHECK(std::abs(vg.gradient(k) - fd) < 1e-5);
  }
}

TEST_CASE("sampled-mode objectives have no exact gradient") {
  RandomStream rng(3);
  TrainConfig cfg = small_config();
  cfg.mode = DenoiseMode::Sampled;
  const auto step = random_step(1, 1, 2, rng);
  const StepObjective obj(step, gen_haar(1, 10, rng), gen_cluster(1, 0.1, 10, rng), cfg);
  CHECK_FALSE(obj.has_gradient());
  CHECK_THROWS_AS((void)obj.value_gradient(step.params), std::logic_error);
  const RandomStream s(4);
  CHECK(obj.value(step.params, s) == obj.value(step.params, s));
}

TEST_CASE("NaN parameters abort with a numerical error") {
  RandomStream rng(5);
  auto step = random_step(1, 1, 2, rng);
  const TrainConfig cfg = small_config();
  const StepObjective obj(step, gen_haar(1, 10, rng), gen_cluster(1, 0.1, 10, rng), cfg);
  step.params.theta(0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(train_step(step, obj, cfg, 5, RandomStream(1)), NumericalError);
}

TEST_CASE("training runs are reproducible and thread-count independent") {
  RandomStream data(6);
  const auto target = gen_cluster(1, 0.08, 20, data);
  const TrainConfig cfg = small_config();
  set_thread_count(1);
  const auto a = train(cfg, target, RandomStream(7));
  set_thread_count(4);
  const auto b = train(cfg, target, RandomStream(7));
  set_thread_count(0);
  REQUIRE(a.records.size() == 3);
  for (int t = 1; t <= 3; ++t) CHECK(a.model.step(t).params.theta == b.model.step(t).params.theta);
  for (std::size_t i = 0; i < a.generated.size(); ++i)
    CHECK(a.generated.states[i].amplitudes() == b.generated.states[i].amplitudes());
  // records go from step T down to 1 with non-increasing best loss
  CHECK(a.records.front().step == 3);
  CHECK(a.records.back().step == 1);
  for (const auto& r : a.records) CHECK(r.final_loss <= r.initial_loss);
  // the generated ensemble is the sampled backward run on the frozen noise
  const auto regen = run_backward(a.model, a.noise, 0, DenoiseMode::Sampled, RandomStream(7).substream("train/backward"));
  for (std::size_t i = 0; i < regen.size(); ++i) CHECK(regen.states[i].amplitudes() == a.generated.states[i].amplitudes());
  const auto c = train(cfg, target, RandomStream(8));
  CHECK(c.model.step(1).params.theta != a.model.step(1).params.theta);
  CHECK_THROWS(train(cfg, gen_cluster(2, 0.1, 5, data), RandomStream(1)));
}

TEST_CASE("test generation draws fresh noise") {
  RandomStream rng(9);
  DenoiseModel model(1, 1, 2, 3);
  for (int t = 1; t <= 3; ++t) model.step(t) = random_step(1, 1, 2, rng);
  const auto a = test_generate(model, 50, RandomStream(3));
  const auto b = test_generate(model, 50, RandomStream(3));
  CHECK(a.size() == 50);
  CHECK(a.states[10].amplitudes() == b.states[10].amplitudes());
}

TEST_CASE("measurement error estimate") {
  FidelityMatrix f{Eigen::MatrixXd::Constant(3, 4, 0.75)};
  const auto e = measurement_error_estimate(f, 100);
  CHECK(e.one_minus_f == doctest::Approx(std::sqrt(12 * 0.25 / 100) / 12));
  CHECK(e.bernoulli == doctest::Approx(std::sqrt(12 * (1 - 0.5625) / 100) / 12));
  CHECK_THROWS(measurement_error_estimate(f, 0));
}

TEST_CASE("generalization error replays the training records") {
  const auto cfg = small_config();
  RandomStream data(10);
  const auto tr = gen_cluster(1, 0.1, cfg.N, data), te = gen_cluster(1, 0.1, 300, data);
  const auto nte = gen_haar(1, 300, data);
  const RandomStream train_rng(77);
  const TrainResult res = train(cfg, tr, train_rng);

  const double e = generalization_error(res.model, tr, te, res.noise, nte, cfg, train_rng);
  const auto replay = run_backward(res.model, res.noise, 0, DenoiseMode::Sampled, train_rng.substream("train/backward"));
  CHECK(replay.states.size() == res.generated.states.size());
  for (std::size_t i = 0; i < replay.states.size(); ++i) {
    CHECK(replay.states[i].amplitudes() == res.generated.states[i].amplitudes());
  }
  const auto held_out = run_backward(res.model, nte, 0, DenoiseMode::Sampled, train_rng.substream("train/backward"));
  CHECK(e == doctest::Approx(mmd(held_out, te) - mmd(res.generated, tr)).epsilon(1e-12));
  CHECK(generalization_error(res.model, tr, tr, res.noise, res.noise, cfg, train_rng) == 0.0);
}

TEST_CASE("records CSV") {
  TrainRecord r;
  r.cycle = 2;
  r.step = 19;
  r.losses = {0.5, 0.25};
  r.seconds = {0.0, 0.1};
  r.seed = 11;
  const auto path = std::filesystem::temp_directory_path() / "quddpm_records.csv";
  write_records_csv(path, {r}, Metric::Mmd);
  std::ifstream in(path);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "cycle,iter,loss,metric,seconds,seed");
  CHECK(row == "2,0,0.5,mmd,0,11");
  std::filesystem::remove(path);
}

}
