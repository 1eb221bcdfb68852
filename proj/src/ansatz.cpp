#include "quddpm/ansatz.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace quddpm {

double DiffusionSchedule::angle_range(int t) const {
  if (kind == Kind::Constant) return angle_max;
  return angle_max * static_cast<double>(t) / static_cast<double>(T);
}

double DiffusionSchedule::g_range(int t) const {
  if (kind == Kind::Constant) return g_max;
  return g_max * static_cast<double>(t) / static_cast<double>(T);
}

void DiffusionSchedule::validate() const {
  if (T < 0) throw std::invalid_argument("DiffusionSchedule: T must be non-negative");
  if (!(angle_max >= 0.0) || !(g_max >= 0.0) || !std::isfinite(angle_max) ||
      !std::isfinite(g_max)) {
    throw std::invalid_argument("DiffusionSchedule: ranges must be finite and non-negative");
  }
}

void apply_scrambling_step(StateVector& state, const ScramblingStepParams& p) {
  const int n = state.n_qubits();
  if (p.phi.size() != 3LL * n) {
    throw std::invalid_argument("apply_scrambling_step: expected " + std::to_string(3 * n) +
                                " angles, got " + std::to_string(p.phi.size()));
  }
  for (int k = 0; k < n; ++k) {
    apply_rotation(state, k, Axis::Z, p.phi(3 * k));
    apply_rotation(state, k, Axis::Y, p.phi(3 * k + 1));
    apply_rotation(state, k, Axis::Z, p.phi(3 * k + 2));
  }
  const double zz_angle = p.g / std::sqrt(static_cast<double>(n));
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) apply_zz(state, a, b, zz_angle);
  }
}

ScramblingStepParams sample_step_params(int n, int t, const DiffusionSchedule& sched,
                                        RandomStream& rng) {
  if (t < 1 || t > sched.T) {
    throw std::out_of_range("sample_step_params: step " + std::to_string(t) + " outside [1, " +
                            std::to_string(sched.T) + "]");
  }
  const double a = sched.angle_range(t);
  ScramblingStepParams p{Eigen::VectorXd(3 * n), 0.0};
  for (Eigen::Index i = 0; i < p.phi.size(); ++i) p.phi(i) = rng.uniform(-a, a);
  const double g = sched.g_range(t);
  p.g = rng.uniform(-g, g);
  return p;
}

HeaParams::HeaParams(int n, int l) : HeaParams(n, l, Eigen::VectorXd::Zero(count(n, l))) {}

HeaParams::HeaParams(int n, int l, Eigen::VectorXd t)
    : n_qubits(n), layers(l), theta(std::move(t)) {
  if (n < 1 || l < 1) throw std::invalid_argument("HeaParams: need n_qubits >= 1 and layers >= 1");
  if (theta.size() != count(n, l)) {
    throw std::invalid_argument("HeaParams: expected " + std::to_string(count(n, l)) +
                                " angles, got " + std::to_string(theta.size()));
  }
}

std::vector<std::pair<int, int>> hea_cz_pairs(int n) {
  std::vector<std::pair<int, int>> pairs;
  for (int k = 0; k + 1 < n; k += 2) pairs.emplace_back(k, k + 1);
  for (int k = 1; k + 1 < n; k += 2) pairs.emplace_back(k, k + 1);
  return pairs;
}

void apply_hea(StateVector& state, const HeaParams& p) {
  if (state.n_qubits() != p.n_qubits) {
    throw std::invalid_argument("apply_hea: circuit is for " + std::to_string(p.n_qubits) +
                                " qubits, state has " + std::to_string(state.n_qubits()));
  }
  const int n = p.n_qubits;
  const auto pairs = hea_cz_pairs(n);
  auto& a = state.mutable_amplitudes();
  for (int l = 0; l < p.layers; ++l) {
    for (int k = 0; k < n; ++k) {
      kernels::rotation(a, n, k, Axis::X, p.theta(HeaParams::index(n, l, k, Axis::X)));
      kernels::rotation(a, n, k, Axis::Y, p.theta(HeaParams::index(n, l, k, Axis::Y)));
    }
    for (auto [q1, q2] : pairs) kernels::cz(a, n, q1, q2);
  }
}

double parameter_shift_gradient(const std::function<double(const HeaParams&)>& loss_at,
                                const HeaParams& p, Eigen::Index index) {
  if (index < 0 || index >= p.size()) {
    throw std::out_of_range("parameter_shift_gradient: index out of range");
  }
  HeaParams plus = p;
  HeaParams minus = p;
  plus.theta(index) += std::numbers::pi / 2;
  minus.theta(index) -= std::numbers::pi / 2;
  return (loss_at(plus) - loss_at(minus)) / 2.0;
}

Observable data_register_observable(Eigen::MatrixXcd g, int n_ancilla) {
  const Eigen::Index anc = Eigen::Index{1} << n_ancilla;
  return [g = std::move(g), anc](const StateVector::Vector& in, StateVector::Vector& out) {
    const Eigen::Index d = g.rows();
    // Index = data * anc + ancilla, so a column-major (anc x d) view has data along columns.
    Eigen::Map<const Eigen::MatrixXcd> x(in.data(), anc, d);
    out.resize(in.size());
    Eigen::Map<Eigen::MatrixXcd> y(out.data(), anc, d);
    y.noalias() = x * g.transpose();
  };
}

void hea_adjoint_accumulate(const HeaParams& p, StateVector::Vector phi,
                            StateVector::Vector lambda, double weight, Eigen::VectorXd& grad) {
  const int n = p.n_qubits;
  const auto pairs = hea_cz_pairs(n);
  StateVector::Vector scratch;
  for (int l = p.layers - 1; l >= 0; --l) {
    for (auto it = pairs.rbegin(); it != pairs.rend(); ++it) {
      kernels::cz(phi, n, it->first, it->second);
      kernels::cz(lambda, n, it->first, it->second);
    }
    for (int k = n - 1; k >= 0; --k) {
      for (Axis axis : {Axis::Y, Axis::X}) {
        const Eigen::Index idx = HeaParams::index(n, l, k, axis);
        // d<O>/dtheta = Im <lambda| P |phi> at the point just after the gate.
        scratch = phi;
        kernels::pauli(scratch, n, k, axis);
        grad(idx) += weight * lambda.dot(scratch).imag();
        kernels::rotation(phi, n, k, axis, -p.theta(idx));
        kernels::rotation(lambda, n, k, axis, -p.theta(idx));
      }
    }
  }
}

ExpectationGradient hea_expectation_gradient(const HeaParams& p,
                                             const std::vector<StateVector>& inputs,
                                             const Eigen::VectorXd& weights,
                                             const Observable& observable) {
  if (static_cast<std::size_t>(weights.size()) != inputs.size()) {
    throw std::invalid_argument("hea_expectation_gradient: weight count mismatch");
  }
  ExpectationGradient out{0.0, Eigen::VectorXd::Zero(p.size())};
  StateVector::Vector lambda;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    StateVector s = inputs[i];
    apply_hea(s, p);
    observable(s.amplitudes(), lambda);
    const double w = weights(static_cast<Eigen::Index>(i));
    out.value += w * s.amplitudes().dot(lambda).real();
    hea_adjoint_accumulate(p, s.amplitudes(), std::move(lambda), w, out.gradient);
  }
  return out;
}

}  // namespace quddpm
