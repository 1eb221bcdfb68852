#pragma once

#include <Eigen/Core>

#include <vector>

#include "quddpm/statevector.hpp"

namespace quddpm {

using ComplexMatrix = Eigen::MatrixXcd;

/// Weighted collection of pure states on a common register.
struct Ensemble {
  std::vector<StateVector> states;
  Eigen::VectorXd weights;

  Ensemble() = default;
  Ensemble(std::vector<StateVector> states, Eigen::VectorXd weights);

  /// Equal weights 1/N.
  static Ensemble uniform(std::vector<StateVector> states);

  [[nodiscard]] std::size_t size() const { return states.size(); }
  [[nodiscard]] bool empty() const { return states.empty(); }
  [[nodiscard]] int n_qubits() const;
  [[nodiscard]] Eigen::Index dim() const;

  /// Throws std::invalid_argument if any structural invariant is broken.
  void validate() const;
};

/// Columns are the state amplitude vectors (dim x N).
ComplexMatrix stacked_amplitudes(const Ensemble& e);

/// Sum_i w_i |psi_i><psi_i|.
ComplexMatrix mean_density(const Ensemble& e);

}  // namespace quddpm
