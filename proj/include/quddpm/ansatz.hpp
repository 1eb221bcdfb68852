#pragma once

#include <Eigen/Core>

#include <functional>
#include <numbers>
#include <vector>

#include "quddpm/random.hpp"
#include "quddpm/statevector.hpp"

namespace quddpm {

/// Angles of one forward scrambling step on n qubits.
///
/// `phi` holds three angles per qubit, (phi[3k], phi[3k+1], phi[3k+2]),
/// applied as RZ(phi[3k]) then RY(phi[3k+1]) then RZ(phi[3k+2]). `g` drives the
/// all-to-all ZZ layer exp(-i g/(2 sqrt n) sum_{a<b} Z_a Z_b) that follows.
struct ScramblingStepParams {
  Eigen::VectorXd phi;
  double g = 0.0;

  [[nodiscard]] int n_qubits() const { return static_cast<int>(phi.size() / 3); }
};

/// Half-widths of the uniform angle distributions of the forward diffusion.
struct DiffusionSchedule {
  enum class Kind { Ramp, Constant };

  int T = 20;
  Kind kind = Kind::Ramp;
  double angle_max = std::numbers::pi;  ///< phi half-width (at t = T for a ramp)
  double g_max = std::numbers::pi;      ///< g half-width (at t = T for a ramp)

  [[nodiscard]] double angle_range(int t) const;
  [[nodiscard]] double g_range(int t) const;
  void validate() const;
};

void apply_scrambling_step(StateVector& state, const ScramblingStepParams& p);

ScramblingStepParams sample_step_params(int n, int t, const DiffusionSchedule& sched,
                                        RandomStream& rng);

/// Hardware-efficient ansatz parameters: per layer, an RX then RY angle per qubit.
struct HeaParams {
  int n_qubits = 1;
  int layers = 1;
  Eigen::VectorXd theta;

  HeaParams() = default;
  HeaParams(int n_qubits, int layers);
  HeaParams(int n_qubits, int layers, Eigen::VectorXd theta);

  static Eigen::Index count(int n_qubits, int layers) { return 2LL * n_qubits * layers; }
  [[nodiscard]] Eigen::Index size() const { return theta.size(); }

  /// Position of the RX (axis X) or RY (axis Y) angle of `qubit` in `layer`.
  [[nodiscard]] static Eigen::Index index(int n_qubits, int layer, int qubit, Axis axis) {
    return 2LL * (static_cast<Eigen::Index>(layer) * n_qubits + qubit) + (axis == Axis::Y ? 1 : 0);
  }
};

/// Nearest-neighbour CZ pairs of one HEA layer: (0,1),(2,3),... then (1,2),(3,4),...
std::vector<std::pair<int, int>> hea_cz_pairs(int n_qubits);

void apply_hea(StateVector& state, const HeaParams& p);

/// Two-point shift rule [f(p + pi/2 e_i) - f(p - pi/2 e_i)] / 2.
///
/// Exact when `loss_at` is linear in the circuit's output density matrix.
double parameter_shift_gradient(const std::function<double(const HeaParams&)>& loss_at,
                                const HeaParams& p, Eigen::Index index);

/// out = O * in for a Hermitian observable O on the full register.
using Observable = std::function<void(const StateVector::Vector& in, StateVector::Vector& out)>;

/// Applies G (x) I on a register whose trailing `n_ancilla` qubits are ancillas.
Observable data_register_observable(Eigen::MatrixXcd g, int n_ancilla);

/// Reverse-mode derivative of <out| O |out> through the HEA that produced `out`.
///
/// `output` is the circuit output U|in>, `costate` is O U|in>. The gradient with
/// respect to every angle is added to `grad`, scaled by `weight`.
void hea_adjoint_accumulate(const HeaParams& p, StateVector::Vector output,
                            StateVector::Vector costate, double weight, Eigen::VectorXd& grad);

struct ExpectationGradient {
  double value = 0.0;
  Eigen::VectorXd gradient;
};

/// Value and gradient of sum_i w_i <in_i| U^dag O U |in_i>.
ExpectationGradient hea_expectation_gradient(const HeaParams& p,
                                             const std::vector<StateVector>& inputs,
                                             const Eigen::VectorXd& weights,
                                             const Observable& observable);

}  // namespace quddpm
