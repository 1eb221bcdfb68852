#pragma once

#include <string>
#include <vector>

#include "quddpm/denoise.hpp"
#include "quddpm/training.hpp"

namespace quddpm {

/// Direct transport: one deep step from noise to data.
struct QuDTModel {
  DenoiseStep generator;
};

/// Generator with the denoising-step structure, plus a discriminator HEA on the
/// same data + ancilla register width whose qubit 0 reads out P(real) as P(0).
struct QuGANModel {
  DenoiseStep generator;
  HeaParams discriminator;
};

struct BaselineResult {
  std::vector<TrainRecord> records;
  Ensemble noise;      ///< training noise, drawn like the QuDDPM run's
  Ensemble generated;  ///< sampled generator output on `noise`
};

/// Generator depth L*T; T * iters_per_cycle optimizer updates on the MMD to the target.
std::pair<QuDTModel, BaselineResult> train_qudt(const TrainConfig& cfg, const Ensemble& target,
                                                const RandomStream& rng);

/// P(real) for a data-register density: probability that qubit 0 reads 0 after
/// the discriminator acts on rho x |0...0><0...0|.
double discriminator_real_probability(const HeaParams& discriminator, const ComplexMatrix& rho);

/// P(real|fake) - P(real|real) and its gradient in the discriminator angles.
ExpectationGradient discriminator_loss(const HeaParams& discriminator, const ComplexMatrix& fake,
                                       const ComplexMatrix& real);

struct GanSettings {
  int discriminator_layers = 16;
  int cycles = 5;
};

/// Alternating discriminator / generator phases of T * iters_per_cycle / (2 cycles)
/// updates each. Records carry metric labels "gan_d" and "gan_g".
std::pair<QuGANModel, BaselineResult> train_qugan(const TrainConfig& cfg, const Ensemble& target,
                                                  const RandomStream& rng, GanSettings gan = {});

struct BenchmarkEntry {
  std::string model;
  Eigen::Index parameters = 0;
  double distance = 0.0;       ///< D(S~_0, S_0) on the training noise
  double fidelity_train = 0.0;  ///< mean fidelity of S~_0 to |0...0>
  double fidelity_test = 0.0;   ///< same on N_test fresh noise states
  double seconds = 0.0;
  std::vector<TrainRecord> records;
};

/// QuDDPM, QuDT and QuGAN with matched generator parameters and budgets.
std::vector<BenchmarkEntry> benchmark_compare(const Ensemble& target, const TrainConfig& cfg,
                                              const RandomStream& rng, GanSettings gan = {});

}  // namespace quddpm
