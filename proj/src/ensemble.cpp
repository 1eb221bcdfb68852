#include "quddpm/ensemble.hpp"

#include <cmath>
#include <stdexcept>

namespace quddpm {

Ensemble::Ensemble(std::vector<StateVector> s, Eigen::VectorXd w)
    : states(std::move(s)), weights(std::move(w)) {
  validate();
}

Ensemble Ensemble::uniform(std::vector<StateVector> states) {
  if (states.empty()) throw std::invalid_argument("Ensemble::uniform: no states");
  const auto n = static_cast<Eigen::Index>(states.size());
  return Ensemble(std::move(states), Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
}

int Ensemble::n_qubits() const {
  if (states.empty()) throw std::logic_error("Ensemble: empty");
  return states.front().n_qubits();
}

Eigen::Index Ensemble::dim() const { return Eigen::Index{1} << n_qubits(); }

void Ensemble::validate() const {
  if (states.empty()) throw std::invalid_argument("Ensemble: no states");
  if (static_cast<std::size_t>(weights.size()) != states.size()) {
    throw std::invalid_argument("Ensemble: weight count differs from state count");
  }
  const int n = states.front().n_qubits();
  for (const auto& s : states) {
    if (s.n_qubits() != n) throw std::invalid_argument("Ensemble: mixed register sizes");
  }
  if ((weights.array() < 0.0).any() || !weights.allFinite()) {
    throw std::invalid_argument("Ensemble: weights must be finite and non-negative");
  }
  if (std::abs(weights.sum() - 1.0) > 1e-10) {
    throw std::invalid_argument("Ensemble: weights must sum to 1");
  }
}

ComplexMatrix stacked_amplitudes(const Ensemble& e) {
  ComplexMatrix m(e.dim(), static_cast<Eigen::Index>(e.size()));
  for (std::size_t i = 0; i < e.size(); ++i) {
    m.col(static_cast<Eigen::Index>(i)) = e.states[i].amplitudes();
  }
  return m;
}

ComplexMatrix mean_density(const Ensemble& e) {
  const ComplexMatrix x = stacked_amplitudes(e);
  return x * e.weights.cast<Complex>().asDiagonal() * x.adjoint();
}

}  // namespace quddpm
