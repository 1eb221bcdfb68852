#include "quddpm/denoise.hpp"

#include <Eigen/Eigenvalues>

#include <fstream>
#include <numeric>
#include <stdexcept>

#include "quddpm/parallel.hpp"

namespace quddpm {

namespace {
constexpr int kModelFormatVersion = 1;
}

DenoiseStep::DenoiseStep(int nd, int na, int layers)
    : DenoiseStep(nd, na, HeaParams(nd + na, layers)) {}

DenoiseStep::DenoiseStep(int nd, int na, HeaParams p) : n_data(nd), n_ancilla(na), params(std::move(p)) {
  if (nd < 1 || na < 1) throw std::invalid_argument("DenoiseStep: need n_data >= 1 and n_ancilla >= 1");
  if (params.n_qubits != nd + na) {
    throw std::invalid_argument("DenoiseStep: circuit width " + std::to_string(params.n_qubits) +
                                " != n_data + n_ancilla = " + std::to_string(nd + na));
  }
}

std::vector<int> DenoiseStep::ancilla_qubits() const {
  std::vector<int> q(static_cast<std::size_t>(n_ancilla));
  std::iota(q.begin(), q.end(), n_data);
  return q;
}

DenoiseModel::DenoiseModel(int nd, int na, int l, int T) : n_data(nd), n_ancilla(na), layers(l) {
  if (T < 0) throw std::invalid_argument("DenoiseModel: T must be non-negative");
  steps.assign(static_cast<std::size_t>(T), DenoiseStep(nd, na, l));
}

DenoiseStep& DenoiseModel::step(int t) {
  if (t < 1 || t > T()) throw std::out_of_range("DenoiseModel: step " + std::to_string(t) + " outside [1, T]");
  return steps[static_cast<std::size_t>(t) - 1];
}

const DenoiseStep& DenoiseModel::step(int t) const {
  if (t < 1 || t > T()) throw std::out_of_range("DenoiseModel: step " + std::to_string(t) + " outside [1, T]");
  return steps[static_cast<std::size_t>(t) - 1];
}

Eigen::Index DenoiseModel::parameter_count() const {
  Eigen::Index total = 0;
  for (const auto& s : steps) total += s.params.size();
  return total;
}

void DenoiseModel::validate() const {
  for (const auto& s : steps) {
    if (s.n_data != n_data || s.n_ancilla != n_ancilla || s.params.layers != layers ||
        s.params.n_qubits != n_data + n_ancilla ||
        s.params.size() != HeaParams::count(n_data + n_ancilla, layers)) {
      throw std::invalid_argument("DenoiseModel: steps disagree on register or depth");
    }
    if (!s.params.theta.allFinite()) throw std::invalid_argument("DenoiseModel: non-finite angle");
  }
}

std::string to_string(DenoiseMode mode) { return mode == DenoiseMode::Branched ? "branched" : "sampled"; }

DenoiseMode denoise_mode_from_string(const std::string& name) {
  if (name == "branched") return DenoiseMode::Branched;
  if (name == "sampled") return DenoiseMode::Sampled;
  throw std::invalid_argument("unknown mode '" + name + "' (expected branched or sampled)");
}

namespace {

StateVector run_step_unitary(const DenoiseStep& step, const StateVector& state) {
  if (state.n_qubits() != step.n_data) {
    throw std::invalid_argument("denoise step expects " + std::to_string(step.n_data) +
                                " data qubits, state has " + std::to_string(state.n_qubits()));
  }
  StateVector full = append_ancillas(state, step.n_ancilla);
  apply_hea(full, step.params);
  return full;
}

}  // namespace

StateVector apply_step_sampled(const DenoiseStep& step, const StateVector& state, RandomStream& rng) {
  const StateVector full = run_step_unitary(step, state);
  return measure_qubits(full, step.ancilla_qubits(), rng).post_state;
}

Ensemble apply_step_branched(const DenoiseStep& step, const Ensemble& ens) {
  ens.validate();
  std::vector<std::vector<MeasurementBranch>> branches(ens.size());
  parallel_for(ens.size(), [&](std::size_t i) {
    branches[i] = enumerate_branches(run_step_unitary(step, ens.states[i]), step.ancilla_qubits());
  });
  std::vector<StateVector> states;
  std::vector<double> weights;
  for (std::size_t i = 0; i < ens.size(); ++i) {
    for (auto& b : branches[i]) {
      states.push_back(std::move(b.post_state));
      weights.push_back(ens.weights(static_cast<Eigen::Index>(i)) * b.probability);
    }
  }
  Eigen::VectorXd w = Eigen::Map<Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  w /= w.sum();  // absorbs the mass of pruned branches
  return Ensemble(std::move(states), std::move(w));
}

Ensemble spectral_ensemble(const ComplexMatrix& rho, double cutoff) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(rho);
  if (eig.info() != Eigen::Success) throw std::runtime_error("spectral_ensemble: eigensolver failed");
  std::vector<StateVector> states;
  std::vector<double> weights;
  for (Eigen::Index j = rho.rows() - 1; j >= 0; --j) {
    const double lambda = eig.eigenvalues()(j);
    if (lambda <= cutoff) continue;
    states.push_back(StateVector::from_amplitudes(eig.eigenvectors().col(j)));
    weights.push_back(lambda);
  }
  if (states.empty()) throw std::invalid_argument("spectral_ensemble: density has no support");
  Eigen::VectorXd w = Eigen::Map<Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  w /= w.sum();
  return Ensemble(std::move(states), std::move(w));
}

ComplexMatrix apply_step_channel(const DenoiseStep& step, const ComplexMatrix& rho) {
  const Ensemble spectral = spectral_ensemble(rho);
  const Eigen::Index d = Eigen::Index{1} << step.n_data;
  const Eigen::Index anc = Eigen::Index{1} << step.n_ancilla;
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (std::size_t j = 0; j < spectral.size(); ++j) {
    const StateVector full = run_step_unitary(step, spectral.states[j]);
    Eigen::Map<const ComplexMatrix> m(full.amplitudes().data(), anc, d);
    out.noalias() += spectral.weights(static_cast<Eigen::Index>(j)) * (m.transpose() * m.conjugate());
  }
  return out * (rho.trace().real());
}

Ensemble run_backward(const DenoiseModel& model, const Ensemble& noise, int k, DenoiseMode mode,
                      const RandomStream& rng) {
  const int T = model.T();
  if (k < 0 || k > T) throw std::out_of_range("run_backward: k must lie in [0, T]");
  if (k == T) return noise;
  if (mode == DenoiseMode::Branched) {
    if (k != T - 1) {
      throw std::invalid_argument("run_backward: branched mode covers a single step; use sampled mode");
    }
    return apply_step_branched(model.step(T), noise);
  }
  Ensemble current = noise;
  for (int t = T; t > k; --t) current = run_backward_step(model, current, t, rng);
  return current;
}

Ensemble run_backward_step(const DenoiseModel& model, const Ensemble& ens, int t,
                           const RandomStream& rng) {
  ens.validate();
  const DenoiseStep& step = model.step(t);
  const RandomStream base = rng.substream("backward");
  std::vector<StateVector> states(ens.size());
  parallel_for(ens.size(), [&](std::size_t i) {
    RandomStream step_rng = base.substream("sample", i).substream("step", static_cast<std::uint64_t>(t));
    states[i] = apply_step_sampled(step, ens.states[i], step_rng);
  });
  return Ensemble(std::move(states), ens.weights);
}

ComplexMatrix backward_channel(const DenoiseModel& model, const ComplexMatrix& rho, int k) {
  if (k < 0 || k > model.T()) throw std::out_of_range("backward_channel: k must lie in [0, T]");
  ComplexMatrix out = rho;
  for (int t = model.T(); t > k; --t) out = apply_step_channel(model.step(t), out);
  return out;
}

nlohmann::json model_to_json(const DenoiseModel& model) {
  nlohmann::json steps = nlohmann::json::array();
  for (int t = 1; t <= model.T(); ++t) {
    const auto& th = model.step(t).params.theta;
    steps.push_back({{"t", t}, {"theta", std::vector<double>(th.data(), th.data() + th.size())}});
  }
  return {{"format", "quddpm-model"},
          {"version", kModelFormatVersion},
          {"n_data", model.n_data},
          {"n_ancilla", model.n_ancilla},
          {"layers", model.layers},
          {"T", model.T()},
          {"steps", steps}};
}

DenoiseModel model_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "quddpm-model") throw std::invalid_argument("model json: wrong format tag");
  if (j.at("version").get<int>() != kModelFormatVersion) {
    throw std::invalid_argument("model json: unsupported version " + j.at("version").dump());
  }
  DenoiseModel m(j.at("n_data").get<int>(), j.at("n_ancilla").get<int>(), j.at("layers").get<int>(),
                 j.at("T").get<int>());
  const auto& steps = j.at("steps");
  if (static_cast<int>(steps.size()) != m.T()) throw std::invalid_argument("model json: step count mismatch");
  for (const auto& s : steps) {
    const auto theta = s.at("theta").get<std::vector<double>>();
    auto& step = m.step(s.at("t").get<int>());
    if (static_cast<Eigen::Index>(theta.size()) != step.params.size()) {
      throw std::invalid_argument("model json: wrong angle count at step " + s.at("t").dump());
    }
    step.params.theta = Eigen::Map<const Eigen::VectorXd>(theta.data(), static_cast<Eigen::Index>(theta.size()));
  }
  m.validate();
  return m;
}

void save_model(const std::filesystem::path& path, const DenoiseModel& model, const nlohmann::json& metadata) {
  nlohmann::json j = model_to_json(model);
  if (!metadata.empty()) j["training"] = metadata;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_model: cannot open " + path.string());
  os << j.dump(2) << '\n';
}

DenoiseModel load_model(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_model: cannot open " + path.string());
  return model_from_json(nlohmann::json::parse(is));
}

}  // namespace quddpm
