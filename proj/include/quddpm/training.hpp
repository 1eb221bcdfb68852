#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "quddpm/denoise.hpp"
#include "quddpm/diffusion.hpp"
#include "quddpm/distance.hpp"
#include "quddpm/optim.hpp"

namespace quddpm {

/// A loss or gradient stopped being finite.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NoiseSource { Haar, Scrambling };

std::string to_string(NoiseSource s);
NoiseSource noise_source_from_string(const std::string& name);

struct TrainConfig {
  int n = 1;
  int n_ancilla = 1;
  int layers = 4;
  int T = 20;
  int N = 100;
  int N_test = 100;
  Metric metric = Metric::Mmd;
  AdamConfig adam;
  int iters_per_cycle = 200;
  int plateau_window = 20;
  double plateau_tolerance = 1e-5;
  double init_range = std::numbers::pi;  ///< step angles start from U[-r, r]
  ShotBudget shots;
  DenoiseMode mode = DenoiseMode::Branched;
  SpsaConfig spsa;
  DiffusionSchedule schedule;  ///< its T is overridden by `T`
  NoiseSource noise = NoiseSource::Haar;

  void validate() const;
  /// True when the optimizer can use exact gradients (branched MMD).
  [[nodiscard]] bool uses_gradients() const { return mode == DenoiseMode::Branched; }
};

struct TrainRecord {
  int cycle = 0;  ///< 1 ... T
  int step = 0;   ///< trained step t = T - cycle + 1, maps S~_t to S~_{t-1}
  std::vector<double> losses;   ///< per iteration, evaluated before the update
  std::vector<double> seconds;  ///< elapsed cycle time at each loss
  double initial_loss = 0.0;
  double final_loss = 0.0;          ///< loss of the kept parameters
  double distance_to_step = 0.0;    ///< D(S~_{t-1}, S_{t-1}) after sampled regeneration
  double distance_to_target = 0.0;  ///< D(S~_{t-1}, S_0)
  std::uint64_t seed = 0;           ///< key of the cycle's init stream
  double wall_seconds = 0.0;
  std::string label;  ///< metric column override, e.g. "gan_d"
};

/// Loss of one backward step as a function of its angles.
///
/// Branched MMD is ||Tr_A[U rho_in U^dag] - rho_target||_F^2 evaluated on the
/// spectral decomposition of the input density, which has the same value as the
/// branch-expanded ensemble. Other combinations evaluate the ensembles directly;
/// sampled mode draws outcomes from the stream handed to `value`.
class StepObjective {
 public:
  StepObjective(const DenoiseStep& shape, Ensemble input, Ensemble target, const TrainConfig& cfg);

  [[nodiscard]] double value(const HeaParams& p, const RandomStream& outcomes) const;
  /// Exact value and gradient; branched mode only. For the Wasserstein metric
  /// this is the gradient at the current optimal plan and duals.
  [[nodiscard]] ExpectationGradient value_gradient(const HeaParams& p) const;
  [[nodiscard]] bool has_gradient() const { return gradient_ready_; }
  [[nodiscard]] const DenoiseStep& shape() const { return shape_; }

 private:
  DenoiseStep shape_;
  Ensemble input_;
  Ensemble target_;
  Metric metric_;
  DenoiseMode mode_;
  bool gradient_ready_ = false;
  [[nodiscard]] ExpectationGradient mmd_gradient(const HeaParams& p) const;
  [[nodiscard]] ExpectationGradient wasserstein_gradient(const HeaParams& p) const;

  std::vector<StateVector> spectral_inputs_;  // data x |0...0> ancillas
  std::vector<StateVector> padded_inputs_;    // every input state x |0...0>
  Eigen::VectorXd spectral_weights_;
  ComplexMatrix target_density_;
};

struct StepTrainingResult {
  std::vector<double> losses;
  std::vector<double> seconds;
  double initial_loss = 0.0;
  double final_loss = 0.0;
};

/// Adam on one step with plateau stopping; the best parameters seen are kept,
/// so final_loss <= initial_loss. Without exact gradients SPSA is used.
StepTrainingResult train_step(DenoiseStep& step, const StepObjective& objective, const TrainConfig& cfg,
                              int max_iters, const RandomStream& rng);

/// D(branched or sampled step k+1 applied to S~_{k+1}, S_k).
double cycle_loss(const DenoiseModel& model, int k, const Ensemble& s_k, const Ensemble& input,
                  const TrainConfig& cfg, const RandomStream& rng);

/// Shift-rule derivative of the branched MMD loss:
/// F(S+, S0) - F(S-, S0) - [F(S+, S_k) - F(S-, S_k)].
double mmd_shift_gradient(const DenoiseStep& step, const Ensemble& input, const Ensemble& s_k,
                          Eigen::Index index);

struct TrainResult {
  DenoiseModel model;
  std::vector<TrainRecord> records;
  DiffusionTrajectory trajectory;
  Ensemble noise;      ///< frozen S~_T
  Ensemble generated;  ///< S~_0 from the sampled backward run
};

/// T training cycles from step T down to step 1.
///
/// Streams: forward diffusion under rng; noise ("noise/train"); cycle c init
/// ("init/cycle", c) and optimizer ("optim/cycle", c); regeneration of S~_k
/// ("train/backward"), matching run_backward with that stream.
TrainResult train(const TrainConfig& cfg, const Ensemble& target, const RandomStream& rng,
                  const std::function<void(const TrainRecord&)>& on_cycle = {});

/// Haar noise ("noise/test") through the model in sampled mode ("backward/test").
Ensemble test_generate(const DenoiseModel& model, int n_samples, const RandomStream& rng);

struct MeasurementError {
  double one_minus_f = 0.0;  ///< (1/(Na Nb)) sqrt(sum (1 - F)/m)
  double bernoulli = 0.0;  ///< same with the SWAP-test variance (1 - F^2)/m
};

MeasurementError measurement_error_estimate(const FidelityMatrix& f, int shots);

/// Full-pipeline loss on test data minus the same loss on training data. Both
/// sides run the sampled backward pass with the measurement records train()
/// drew, so `rng` must be the stream given to train(): the training side then
/// reproduces TrainResult::generated exactly.
double generalization_error(const DenoiseModel& model, const Ensemble& target_train,
                            const Ensemble& target_test, const Ensemble& noise_train,
                            const Ensemble& noise_test, const TrainConfig& cfg,
                            const RandomStream& rng);

/// Writes `cycle,iter,loss,metric,seconds,seed` rows (plus `model` when non-empty).
void write_records_csv(const std::filesystem::path& path, const std::vector<TrainRecord>& records,
                       Metric metric, const std::string& model = "");

}  // namespace quddpm
