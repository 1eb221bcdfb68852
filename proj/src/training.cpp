#include "quddpm/training.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "quddpm/datasets.hpp"
#include "quddpm/parallel.hpp"
#include "quddpm/transport.hpp"

namespace quddpm {

std::string to_string(NoiseSource s) { return s == NoiseSource::Haar ? "haar" : "scrambling"; }

NoiseSource noise_source_from_string(const std::string& name) {
  if (name == "haar") return NoiseSource::Haar;
  if (name == "scrambling") return NoiseSource::Scrambling;
  throw std::invalid_argument("unknown noise source '" + name + "'");
}

void TrainConfig::validate() const {
  if (n < 1 || n_ancilla < 1 || layers < 1 || T < 1 || N < 1 || N_test < 1) {
    throw std::invalid_argument("TrainConfig: n, n_ancilla, layers, T, N, N_test must be positive");
  }
  if (n + n_ancilla > 20) throw std::invalid_argument("TrainConfig: register too wide to simulate");
  if (iters_per_cycle < 0 || plateau_window < 1 || plateau_tolerance < 0.0) {
    throw std::invalid_argument("TrainConfig: bad iteration or plateau settings");
  }
  if (init_range < 0.0) throw std::invalid_argument("TrainConfig: init_range must be >= 0");
  if (spsa.probes < 1 || !(spsa.perturbation > 0.0)) throw std::invalid_argument("TrainConfig: bad SPSA settings");
  schedule.validate();
}

namespace {

// Partial trace over trailing ancillas of |full><full|.
ComplexMatrix reduced_density(const StateVector::Vector& full, Eigen::Index d, Eigen::Index anc) {
  Eigen::Map<const ComplexMatrix> m(full.data(), anc, d);
  return m.transpose() * m.conjugate();
}

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

}  // namespace

StepObjective::StepObjective(const DenoiseStep& shape, Ensemble input, Ensemble target,
                             const TrainConfig& cfg)
    : shape_(shape),
      input_(std::move(input)),
      target_(std::move(target)),
      metric_(cfg.metric),
      mode_(cfg.mode) {
  input_.validate();
  target_.validate();
  if (input_.n_qubits() != shape_.n_data || target_.n_qubits() != shape_.n_data) {
    throw std::invalid_argument("StepObjective: ensembles do not live on the step's data register");
  }
  if (cfg.uses_gradients() && metric_ == Metric::Wasserstein) {
    for (const auto& s : input_.states) padded_inputs_.push_back(append_ancillas(s, shape_.n_ancilla));
    gradient_ready_ = true;
  } else if (cfg.uses_gradients()) {
    const Ensemble spectral = spectral_ensemble(mean_density(input_));
    for (const auto& s : spectral.states) spectral_inputs_.push_back(append_ancillas(s, shape_.n_ancilla));
    spectral_weights_ = spectral.weights;
    target_density_ = mean_density(target_);
    gradient_ready_ = true;
  }
}

ExpectationGradient StepObjective::value_gradient(const HeaParams& p) const {
  if (!gradient_ready_) throw std::logic_error("StepObjective: exact gradients need branched mode");
  return metric_ == Metric::Wasserstein ? wasserstein_gradient(p) : mmd_gradient(p);
}

ExpectationGradient StepObjective::wasserstein_gradient(const HeaParams& p) const {
  const Eigen::Index d = Eigen::Index{1} << shape_.n_data;
  const Eigen::Index anc = Eigen::Index{1} << shape_.n_ancilla;
  const std::size_t m = padded_inputs_.size();
  std::vector<StateVector> outputs(padded_inputs_);
  parallel_for(m, [&](std::size_t i) { apply_hea(outputs[i], p); });

  // Branch (i, b) holds the unnormalized data amplitudes v = (I x <b|) U|x_i, 0>.
  struct Branch {
    std::size_t input;
    Eigen::Index outcome;
    double prob;
  };
  std::vector<Branch> branches;
  for (std::size_t i = 0; i < m; ++i) {
    const auto amps = outputs[i].amplitudes().reshaped(anc, d);
    for (Eigen::Index b = 0; b < anc; ++b) {
      const double prob = amps.row(b).squaredNorm();
      if (prob > 1e-12) branches.push_back({i, b, prob});
    }
  }
  const auto nb = static_cast<Eigen::Index>(branches.size());
  const auto nt = static_cast<Eigen::Index>(target_.size());
  ComplexMatrix v(d, nb);
  Eigen::VectorXd a(nb);
  for (Eigen::Index k = 0; k < nb; ++k) {
    const auto& br = branches[static_cast<std::size_t>(k)];
    v.col(k) = outputs[br.input].amplitudes().reshaped(anc, d).row(br.outcome).transpose();
    a(k) = input_.weights(static_cast<Eigen::Index>(br.input)) * br.prob;
  }
  const double total = a.sum();
  a /= total;
  ComplexMatrix phi = stacked_amplitudes(target_);
  const ComplexMatrix c = phi.adjoint() * v;  // c(j, k) = <phi_j | v_k>
  Eigen::MatrixXd fid(nb, nt);
  for (Eigen::Index k = 0; k < nb; ++k) {
    fid.row(k) = c.col(k).cwiseAbs2().transpose() / branches[static_cast<std::size_t>(k)].prob;
  }
  const Eigen::MatrixXd cost = transport_cost(fid, 1);
  const TransportResult ot = solve_transport(a, target_.weights, cost, true);

  ExpectationGradient out{ot.cost, Eigen::VectorXd::Zero(p.size())};
  // dW = sum P dC + sum u da at fixed plan and duals; costates are dW / d<v|.
  constexpr double kCostFloor = 1e-3;
  ComplexMatrix dv = ComplexMatrix::Zero(d, nb);
  for (const auto& f : ot.plan) {
    const auto k = static_cast<Eigen::Index>(f.source);
    const auto j = static_cast<Eigen::Index>(f.sink);
    const double prob = branches[static_cast<std::size_t>(k)].prob;
    const double scale = -f.mass / (2.0 * std::max(cost(k, j), kCostFloor) * prob);
    dv.col(k) += scale * (c(j, k) * phi.col(j) - fid(k, j) * v.col(k));
  }
  for (Eigen::Index k = 0; k < nb; ++k) {
    const double w = input_.weights(static_cast<Eigen::Index>(branches[static_cast<std::size_t>(k)].input)) / total;
    dv.col(k) += ot.source_potential(k) * w * v.col(k);
  }
  std::vector<StateVector::Vector> costates(m, StateVector::Vector::Zero(d * anc));
  for (Eigen::Index k = 0; k < nb; ++k) {
    const auto& br = branches[static_cast<std::size_t>(k)];
    costates[br.input].reshaped(anc, d).row(br.outcome) = dv.col(k).transpose();
  }
  std::vector<Eigen::VectorXd> grads(m, Eigen::VectorXd::Zero(p.size()));
  parallel_for(m, [&](std::size_t i) {
    hea_adjoint_accumulate(p, outputs[i].amplitudes(), std::move(costates[i]), 1.0, grads[i]);
  });
  for (const auto& g : grads) out.gradient += g;
  return out;
}

ExpectationGradient StepObjective::mmd_gradient(const HeaParams& p) const {
  const Eigen::Index d = Eigen::Index{1} << shape_.n_data;
  const Eigen::Index anc = Eigen::Index{1} << shape_.n_ancilla;
  const std::size_t m = spectral_inputs_.size();
  std::vector<StateVector> outputs(spectral_inputs_);
  parallel_for(m, [&](std::size_t j) { apply_hea(outputs[j], p); });
  ComplexMatrix sigma = ComplexMatrix::Zero(d, d);
  for (std::size_t j = 0; j < m; ++j) {
    sigma += spectral_weights_(static_cast<Eigen::Index>(j)) * reduced_density(outputs[j].amplitudes(), d, anc);
  }
  const ComplexMatrix diff = sigma - target_density_;
  ExpectationGradient out{diff.squaredNorm(), Eigen::VectorXd::Zero(p.size())};
  // dL = 2 tr[(sigma - rho) d sigma]: the derivative of <O> with O = 2 (sigma - rho) x I held fixed.
  const Observable obs = data_register_observable(2.0 * diff, shape_.n_ancilla);
  std::vector<Eigen::VectorXd> grads(m, Eigen::VectorXd::Zero(p.size()));
  parallel_for(m, [&](std::size_t j) {
    StateVector::Vector costate;
    obs(outputs[j].amplitudes(), costate);
    hea_adjoint_accumulate(p, outputs[j].amplitudes(), std::move(costate),
                           spectral_weights_(static_cast<Eigen::Index>(j)), grads[j]);
  });
  for (const auto& g : grads) out.gradient += g;
  return out;
}

double StepObjective::value(const HeaParams& p, const RandomStream& outcomes) const {
  if (gradient_ready_) return value_gradient(p).value;
  const DenoiseStep step(shape_.n_data, shape_.n_ancilla, p);
  if (mode_ == DenoiseMode::Branched) {
    return ensemble_distance(metric_, apply_step_branched(step, input_), target_);
  }
  DenoiseModel single(shape_.n_data, shape_.n_ancilla, p.layers, 1);
  single.step(1) = step;
  return ensemble_distance(metric_, run_backward_step(single, input_, 1, outcomes), target_);
}

StepTrainingResult train_step(DenoiseStep& step, const StepObjective& objective, const TrainConfig& cfg,
                              int max_iters, const RandomStream& rng) {
  HeaParams& p = step.params;
  const RandomStream eval_stream = rng.substream("eval");
  RandomStream spsa_rng = rng.substream("spsa");
  std::uint64_t spsa_calls = 0;
  const GradientObjective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
    const HeaParams q(p.n_qubits, p.layers, x);
    if (grad == nullptr) return objective.value(q, eval_stream);
    if (objective.has_gradient()) {
      auto vg = objective.value_gradient(q);
      *grad = std::move(vg.gradient);
      return vg.value;
    }
    // Common random outcomes for the + and - evaluations of each probe.
    const RandomStream iter_stream = rng.substream("probe", spsa_calls++);
    *grad = spsa_gradient(
        [&](const Eigen::VectorXd& y, int probe) {
          return objective.value(HeaParams(p.n_qubits, p.layers, y),
                                 iter_stream.substream("common", static_cast<std::uint64_t>(probe)));
        },
        x, cfg.spsa, spsa_rng);
    return objective.value(q, eval_stream);
  };
  MinimizeResult fit;
  try {
    fit = minimize_adam(p.theta, f, cfg.adam, max_iters, cfg.plateau_window, cfg.plateau_tolerance);
  } catch (const std::domain_error& e) {
    throw NumericalError(e.what());
  }
  return StepTrainingResult{std::move(fit.losses), std::move(fit.seconds), fit.initial_loss, fit.best_loss};
}

double cycle_loss(const DenoiseModel& model, int k, const Ensemble& s_k, const Ensemble& input,
                  const TrainConfig& cfg, const RandomStream& rng) {
  if (k < 0 || k >= model.T()) throw std::out_of_range("cycle_loss: k must lie in [0, T)");
  const DenoiseStep& step = model.step(k + 1);
  if (cfg.mode == DenoiseMode::Branched) {
    return ensemble_distance(cfg.metric, apply_step_branched(step, input), s_k);
  }
  return ensemble_distance(cfg.metric, run_backward_step(model, input, k + 1, rng), s_k);
}

double mmd_shift_gradient(const DenoiseStep& step, const Ensemble& input, const Ensemble& s_k,
                          Eigen::Index index) {
  if (index < 0 || index >= step.params.size()) throw std::out_of_range("mmd_shift_gradient: bad index");
  DenoiseStep plus = step;
  DenoiseStep minus = step;
  plus.params.theta(index) += std::numbers::pi / 2;
  minus.params.theta(index) -= std::numbers::pi / 2;
  const Ensemble s0 = apply_step_branched(step, input);
  const Ensemble sp = apply_step_branched(plus, input);
  const Ensemble sm = apply_step_branched(minus, input);
  return mean_fidelity(sp, s0) - mean_fidelity(sm, s0) - (mean_fidelity(sp, s_k) - mean_fidelity(sm, s_k));
}

TrainResult train(const TrainConfig& cfg, const Ensemble& target, const RandomStream& rng,
                  const std::function<void(const TrainRecord&)>& on_cycle) {
  cfg.validate();
  target.validate();
  if (target.n_qubits() != cfg.n) {
    throw std::invalid_argument("train: target has " + std::to_string(target.n_qubits()) +
                                " qubits, config says " + std::to_string(cfg.n));
  }
  DiffusionSchedule sched = cfg.schedule;
  sched.T = cfg.T;

  TrainResult result;
  result.trajectory = run_forward(target, sched, rng);
  RandomStream noise_rng = rng.substream("noise/train");
  result.noise = cfg.noise == NoiseSource::Haar ? gen_haar(cfg.n, cfg.N, noise_rng)
                                                : noise_sampler(result.trajectory, cfg.N, noise_rng);
  result.model = DenoiseModel(cfg.n, cfg.n_ancilla, cfg.layers, cfg.T);
  const RandomStream regen = rng.substream("train/backward");

  Ensemble current = result.noise;
  for (int c = 1; c <= cfg.T; ++c) {
    const auto t0 = Clock::now();
    const int t = cfg.T - c + 1;
    DenoiseStep& step = result.model.step(t);
    RandomStream init = rng.substream("init/cycle", static_cast<std::uint64_t>(c));
    for (Eigen::Index i = 0; i < step.params.size(); ++i) {
      step.params.theta(i) = init.uniform(-cfg.init_range, cfg.init_range);
    }
    const StepObjective objective(step, current, result.trajectory.at(t - 1), cfg);
    const auto fit = train_step(step, objective, cfg, cfg.iters_per_cycle,
                                rng.substream("optim/cycle", static_cast<std::uint64_t>(c)));
    current = run_backward_step(result.model, current, t, regen);

    TrainRecord rec;
    rec.cycle = c;
    rec.step = t;
    rec.losses = fit.losses;
    rec.seconds = fit.seconds;
    rec.initial_loss = fit.initial_loss;
    rec.final_loss = fit.final_loss;
    rec.distance_to_step = ensemble_distance(cfg.metric, current, result.trajectory.at(t - 1));
    rec.distance_to_target = ensemble_distance(cfg.metric, current, result.trajectory.at(0));
    rec.seed = init.key();
    rec.wall_seconds = since(t0);
    if (on_cycle) on_cycle(rec);
    result.records.push_back(std::move(rec));
  }
  result.generated = std::move(current);
  return result;
}

Ensemble test_generate(const DenoiseModel& model, int n_samples, const RandomStream& rng) {
  RandomStream noise_rng = rng.substream("noise/test");
  const Ensemble noise = gen_haar(model.n_data, n_samples, noise_rng);
  return run_backward(model, noise, 0, DenoiseMode::Sampled, rng.substream("backward/test"));
}

MeasurementError measurement_error_estimate(const FidelityMatrix& f, int shots) {
  if (shots < 1) throw std::invalid_argument("measurement_error_estimate: shots must be >= 1");
  const auto& v = f.values.array();
  const double pairs = static_cast<double>(v.rows() * v.cols());
  MeasurementError e;
  e.one_minus_f = std::sqrt((1.0 - v).max(0.0).sum() / shots) / pairs;
  e.bernoulli = std::sqrt((1.0 - v.square()).max(0.0).sum() / shots) / pairs;
  return e;
}

double generalization_error(const DenoiseModel& model, const Ensemble& target_train,
                            const Ensemble& target_test, const Ensemble& noise_train,
                            const Ensemble& noise_test, const TrainConfig& cfg, const RandomStream& rng) {
  const RandomStream records = rng.substream("train/backward");
  auto loss = [&](const Ensemble& target, const Ensemble& noise) {
    return ensemble_distance(cfg.metric, run_backward(model, noise, 0, DenoiseMode::Sampled, records), target);
  };
  return loss(target_test, noise_test) - loss(target_train, noise_train);
}

void write_records_csv(const std::filesystem::path& path, const std::vector<TrainRecord>& records,
                       Metric metric, const std::string& model) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_records_csv: cannot open " + path.string());
  os << std::setprecision(17);
  os << "cycle,iter,loss,metric,seconds,seed" << (model.empty() ? "" : ",model") << '\n';
  for (const auto& r : records) {
    for (std::size_t i = 0; i < r.losses.size(); ++i) {
      os << r.cycle << ',' << i << ',' << r.losses[i] << ',' << (r.label.empty() ? to_string(metric) : r.label) << ',' << r.seconds[i]
         << ',' << r.seed;
      if (!model.empty()) os << ',' << model;
      os << '\n';
    }
  }
}

}  // namespace quddpm
