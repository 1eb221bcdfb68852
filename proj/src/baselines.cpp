#include "quddpm/baselines.hpp"

#include <chrono>

#include "quddpm/datasets.hpp"

namespace quddpm {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Ensemble training_noise(const TrainConfig& cfg, const RandomStream& rng) {
  RandomStream noise_rng = rng.substream("noise/train");
  return gen_haar(cfg.n, cfg.N, noise_rng);
}

void randomize(HeaParams& p, double range, RandomStream rng) {
  for (Eigen::Index i = 0; i < p.size(); ++i) p.theta(i) = rng.uniform(-range, range);
}

Ensemble single_step_output(const DenoiseStep& step, const Ensemble& noise, const RandomStream& rng) {
  DenoiseModel m(step.n_data, step.n_ancilla, step.params.layers, 1);
  m.step(1) = step;
  return run_backward(m, noise, 0, DenoiseMode::Sampled, rng);
}

TrainRecord make_record(int cycle, std::vector<double> losses, std::vector<double> seconds,
                        std::uint64_t seed, std::string label) {
  TrainRecord r;
  r.cycle = cycle;
  r.step = 1;
  r.initial_loss = losses.front();
  r.final_loss = *std::min_element(losses.begin(), losses.end());
  r.losses = std::move(losses);
  r.seconds = std::move(seconds);
  r.wall_seconds = r.seconds.empty() ? 0.0 : r.seconds.back();
  r.seed = seed;
  r.label = std::move(label);
  return r;
}

// Projector onto qubit 0 = |0>, the readout of the discriminator.
void readout_projector(const StateVector::Vector& in, StateVector::Vector& out) {
  out = in;
  out.tail(in.size() / 2).setZero();
}

std::vector<StateVector> padded_spectrum(const ComplexMatrix& rho, int n_ancilla, Eigen::VectorXd& weights) {
  const Ensemble s = spectral_ensemble(rho);
  std::vector<StateVector> out;
  for (const auto& v : s.states) out.push_back(append_ancillas(v, n_ancilla));
  weights = s.weights * rho.trace().real();
  return out;
}

int discriminator_ancillas(const HeaParams& d, Eigen::Index dim) {
  const int n_data = static_cast<int>(std::lround(std::log2(static_cast<double>(dim))));
  const int n_anc = d.n_qubits - n_data;
  if (n_anc < 0) throw std::invalid_argument("discriminator narrower than the data register");
  return n_anc;
}

// E_D = (I x <0|) U_D^dag P0 U_D (I x |0>): P(real | rho) = tr(rho E_D).
ComplexMatrix discriminator_effect(const HeaParams& d, Eigen::Index dim) {
  const int n_anc = discriminator_ancillas(d, dim);
  const int n_data = d.n_qubits - n_anc;
  ComplexMatrix v(Eigen::Index{1} << d.n_qubits, dim);
  for (Eigen::Index z = 0; z < dim; ++z) {
    StateVector s = append_ancillas(StateVector::basis(n_data, static_cast<std::uint64_t>(z)), n_anc);
    apply_hea(s, d);
    v.col(z) = s.amplitudes();
  }
  ComplexMatrix projected = v;
  projected.bottomRows(v.rows() / 2).setZero();
  return v.adjoint() * projected;
}

}  // namespace

std::pair<QuDTModel, BaselineResult> train_qudt(const TrainConfig& cfg, const Ensemble& target,
                                                const RandomStream& rng) {
  cfg.validate();
  BaselineResult out;
  out.noise = training_noise(cfg, rng);
  QuDTModel model{DenoiseStep(cfg.n, cfg.n_ancilla, cfg.layers * cfg.T)};
  const RandomStream init = rng.substream("init/qudt");
  randomize(model.generator.params, cfg.init_range, init);
  TrainConfig branched = cfg;
  branched.mode = DenoiseMode::Branched;
  const StepObjective objective(model.generator, out.noise, target, branched);
  auto fit = train_step(model.generator, objective, branched, cfg.T * cfg.iters_per_cycle,
                        rng.substream("optim/qudt"));
  out.records.push_back(make_record(1, std::move(fit.losses), std::move(fit.seconds), init.key(), ""));
  out.generated = single_step_output(model.generator, out.noise, rng.substream("qudt/backward"));
  return {std::move(model), std::move(out)};
}

double discriminator_real_probability(const HeaParams& discriminator, const ComplexMatrix& rho) {
  return std::clamp((rho * discriminator_effect(discriminator, rho.rows())).trace().real(), 0.0, 1.0);
}

ExpectationGradient discriminator_loss(const HeaParams& discriminator, const ComplexMatrix& fake,
                                       const ComplexMatrix& real) {
  const int n_anc = discriminator_ancillas(discriminator, fake.rows());
  Eigen::VectorXd wf;
  Eigen::VectorXd wr;
  auto inputs = padded_spectrum(fake, n_anc, wf);
  auto real_inputs = padded_spectrum(real, n_anc, wr);
  inputs.insert(inputs.end(), real_inputs.begin(), real_inputs.end());
  Eigen::VectorXd w(wf.size() + wr.size());
  w << wf, -wr;
  return hea_expectation_gradient(discriminator, inputs, w, readout_projector);
}

std::pair<QuGANModel, BaselineResult> train_qugan(const TrainConfig& cfg, const Ensemble& target,
                                                  const RandomStream& rng, GanSettings gan) {
  cfg.validate();
  if (gan.cycles < 1 || gan.discriminator_layers < 1) throw std::invalid_argument("train_qugan: bad settings");
  BaselineResult out;
  out.noise = training_noise(cfg, rng);
  QuGANModel model{DenoiseStep(cfg.n, cfg.n_ancilla, cfg.layers * cfg.T),
                   HeaParams(cfg.n + cfg.n_ancilla, gan.discriminator_layers)};
  const RandomStream init = rng.substream("init/qugan");
  randomize(model.generator.params, cfg.init_range, init.substream("generator"));
  randomize(model.discriminator, cfg.init_range, init.substream("discriminator"));

  const int phase_iters = cfg.T * cfg.iters_per_cycle / (2 * gan.cycles);
  const ComplexMatrix real = mean_density(target);
  const ComplexMatrix noise = mean_density(out.noise);
  Eigen::VectorXd wn;
  const auto noise_inputs = padded_spectrum(noise, cfg.n_ancilla, wn);

  for (int c = 1; c <= gan.cycles; ++c) {
    const ComplexMatrix fake = apply_step_channel(model.generator, noise);
    HeaParams& d = model.discriminator;
    const GradientObjective d_loss = [&](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
      const HeaParams q(d.n_qubits, d.layers, x);
      auto vg = discriminator_loss(q, fake, real);
      if (grad != nullptr) *grad = std::move(vg.gradient);
      return vg.value;
    };
    auto fit_d = minimize_adam(d.theta, d_loss, cfg.adam, phase_iters, cfg.plateau_window, cfg.plateau_tolerance);
    out.records.push_back(make_record(c, std::move(fit_d.losses), std::move(fit_d.seconds), init.key(), "gan_d"));

    const ComplexMatrix effect = discriminator_effect(d, real.rows());
    const Observable fool = data_register_observable(-effect, cfg.n_ancilla);
    HeaParams& g = model.generator.params;
    const GradientObjective g_loss = [&](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
      const HeaParams q(g.n_qubits, g.layers, x);
      auto vg = hea_expectation_gradient(q, noise_inputs, wn, fool);
      if (grad != nullptr) *grad = std::move(vg.gradient);
      return vg.value;
    };
    auto fit_g = minimize_adam(g.theta, g_loss, cfg.adam, phase_iters, cfg.plateau_window, cfg.plateau_tolerance);
    out.records.push_back(make_record(c, std::move(fit_g.losses), std::move(fit_g.seconds), init.key(), "gan_g"));
  }
  out.generated = single_step_output(model.generator, out.noise, rng.substream("qugan/backward"));
  return {std::move(model), std::move(out)};
}

namespace {

double fidelity_to_zero(const Ensemble& e) {
  return mean_fidelity(e, Ensemble::uniform({StateVector(e.n_qubits())}));
}

Ensemble test_noise(const TrainConfig& cfg, const RandomStream& rng) {
  RandomStream r = rng.substream("noise/test");
  return gen_haar(cfg.n, cfg.N_test, r);
}

}  // namespace

std::vector<BenchmarkEntry> benchmark_compare(const Ensemble& target, const TrainConfig& cfg,
                                              const RandomStream& rng, GanSettings gan) {
  std::vector<BenchmarkEntry> report;
  const Ensemble noise_te = test_noise(cfg, rng);
  {
    const auto t0 = Clock::now();
    auto res = train(cfg, target, rng);
    BenchmarkEntry e;
    e.model = "quddpm";
    e.parameters = res.model.parameter_count();
    e.distance = ensemble_distance(cfg.metric, res.generated, target);
    e.fidelity_train = fidelity_to_zero(res.generated);
    e.fidelity_test = fidelity_to_zero(
        run_backward(res.model, noise_te, 0, DenoiseMode::Sampled, rng.substream("backward/test")));
    e.seconds = since(t0);
    e.records = std::move(res.records);
    report.push_back(std::move(e));
  }
  {
    const auto t0 = Clock::now();
    auto [model, res] = train_qudt(cfg, target, rng);
    BenchmarkEntry e;
    e.model = "qudt";
    e.parameters = model.generator.params.size();
    e.distance = ensemble_distance(cfg.metric, res.generated, target);
    e.fidelity_train = fidelity_to_zero(res.generated);
    e.fidelity_test = fidelity_to_zero(single_step_output(model.generator, noise_te, rng.substream("backward/test")));
    e.seconds = since(t0);
    e.records = std::move(res.records);
    report.push_back(std::move(e));
  }
  {
    const auto t0 = Clock::now();
    auto [model, res] = train_qugan(cfg, target, rng, gan);
    BenchmarkEntry e;
    e.model = "qugan";
    e.parameters = model.generator.params.size();
    e.distance = ensemble_distance(cfg.metric, res.generated, target);
    e.fidelity_train = fidelity_to_zero(res.generated);
    e.fidelity_test = fidelity_to_zero(single_step_output(model.generator, noise_te, rng.substream("backward/test")));
    e.seconds = since(t0);
    e.records = std::move(res.records);
    report.push_back(std::move(e));
  }
  return report;
}

}  // namespace quddpm
