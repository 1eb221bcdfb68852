#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "quddpm/ansatz.hpp"
#include "quddpm/ensemble.hpp"
#include "quddpm/random.hpp"

namespace quddpm {

/// One backward step: HEA on data + trailing ancillas, then ancilla readout.
struct DenoiseStep {
  int n_data = 1;
  int n_ancilla = 1;
  HeaParams params;

  DenoiseStep() = default;
  DenoiseStep(int n_data, int n_ancilla, int layers);
  DenoiseStep(int n_data, int n_ancilla, HeaParams params);

  [[nodiscard]] int n_total() const { return n_data + n_ancilla; }
  [[nodiscard]] std::vector<int> ancilla_qubits() const;
};

/// Steps 1..T; `step(t)` is the circuit that maps S~_t to S~_{t-1}.
struct DenoiseModel {
  int n_data = 1;
  int n_ancilla = 1;
  int layers = 1;
  std::vector<DenoiseStep> steps;

  DenoiseModel() = default;
  DenoiseModel(int n_data, int n_ancilla, int layers, int T);

  [[nodiscard]] int T() const { return static_cast<int>(steps.size()); }
  DenoiseStep& step(int t);
  [[nodiscard]] const DenoiseStep& step(int t) const;
  [[nodiscard]] Eigen::Index parameter_count() const;
  void validate() const;
};

enum class DenoiseMode { Branched, Sampled };

std::string to_string(DenoiseMode mode);
DenoiseMode denoise_mode_from_string(const std::string& name);

/// Unitary step on |state>|0...0>, Born-sampled ancilla outcome, renormalized data state.
StateVector apply_step_sampled(const DenoiseStep& step, const StateVector& state, RandomStream& rng);

/// Every outcome with probability above the branch cutoff, weighted w_i * p.
Ensemble apply_step_branched(const DenoiseStep& step, const Ensemble& ens);

/// Tr_A[U (rho x |0><0|) U^dag]: the outcome-averaged output density of a step.
ComplexMatrix apply_step_channel(const DenoiseStep& step, const ComplexMatrix& rho);

/// Spectral ensemble {lambda_j, |e_j>} of rho, dropping eigenvalues below `cutoff`.
Ensemble spectral_ensemble(const ComplexMatrix& rho, double cutoff = 1e-14);

/// Applies steps T, ..., k+1. Sample i at step t uses substream ("backward", i) / ("step", t).
/// Branched mode covers a single step only (k = T - 1).
Ensemble run_backward(const DenoiseModel& model, const Ensemble& noise, int k, DenoiseMode mode,
                      const RandomStream& rng);

/// Sampled application of step t alone, drawing from the same substreams as run_backward.
Ensemble run_backward_step(const DenoiseModel& model, const Ensemble& ens, int t,
                           const RandomStream& rng);

/// Mean density of run_backward averaged over all measurement records.
ComplexMatrix backward_channel(const DenoiseModel& model, const ComplexMatrix& rho, int k);

nlohmann::json model_to_json(const DenoiseModel& model);
DenoiseModel model_from_json(const nlohmann::json& j);

/// Versioned JSON with optional metadata under "training".
void save_model(const std::filesystem::path& path, const DenoiseModel& model,
                const nlohmann::json& metadata = nlohmann::json::object());
DenoiseModel load_model(const std::filesystem::path& path);

}  // namespace quddpm
