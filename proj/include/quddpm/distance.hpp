#pragma once

#include <Eigen/Core>

#include <string>

#include "quddpm/ensemble.hpp"
#include "quddpm/random.hpp"

namespace quddpm {

/// Shots per SWAP test, or exact overlaps when `shots == 0`.
struct ShotBudget {
  int shots = 0;

  [[nodiscard]] bool exact() const { return shots == 0; }
  static ShotBudget exact_overlaps() { return {}; }
  static ShotBudget per_pair(int m);
  /// "exact" or a positive integer.
  static ShotBudget parse(const std::string& text);
  [[nodiscard]] std::string str() const;
};

struct FidelityMatrix {
  Eigen::MatrixXd values;  ///< rows index the first ensemble, columns the second
};

/// Simulated SWAP test: m Bernoulli(1/2 + f/2) draws, F = clamp(2 zeros/m - 1, 0, 1).
double swap_test_estimate(double fidelity, int m, RandomStream& rng);

/// |<a_i|b_j>|^2, exactly or through per-pair SWAP-test estimates.
/// Row i of a shot-mode matrix draws from substream ("swap", i) so the fill is
/// independent of thread count.
FidelityMatrix fidelity_matrix(const Ensemble& a, const Ensemble& b,
                               ShotBudget shots = {}, RandomStream* rng = nullptr);

/// Weighted average sum_ij w_i v_j F_ij.
double mean_fidelity(const FidelityMatrix& f, const Eigen::VectorXd& wa, const Eigen::VectorXd& wb);

/// Exact mean fidelity, tr(rho_a rho_b).
double mean_fidelity(const Ensemble& a, const Ensemble& b);
double mean_fidelity(const Ensemble& a, const Ensemble& b, ShotBudget shots, RandomStream& rng);

/// Exact MMD with fidelity kernel (self-pairs included), ||rho_a - rho_b||_F^2.
double mmd(const Ensemble& a, const Ensemble& b);
double mmd(const Ensemble& a, const Ensemble& b, ShotBudget shots, RandomStream& rng);

/// Same as the exact mmd, evaluated on the pairwise kernel instead of densities.
double mmd_pairwise(const Ensemble& a, const Ensemble& b);

/// Optimal transport distance with pair cost D^p, D = sqrt(1 - F); returns OPT^(1/p).
double wasserstein(const Ensemble& a, const Ensemble& b, int p = 1);
double wasserstein(const Ensemble& a, const Ensemble& b, int p, ShotBudget shots, RandomStream& rng);
/// Pair costs D^p with D = sqrt(1 - F).
Eigen::MatrixXd transport_cost(const Eigen::MatrixXd& fidelity, int p);

double wasserstein(const FidelityMatrix& f, const Eigen::VectorXd& wa, const Eigen::VectorXd& wb,
                   int p);

enum class Metric { Mmd, Wasserstein };

std::string to_string(Metric m);
Metric metric_from_string(const std::string& name);

/// MMD, or the p = 1 Wasserstein distance.
double ensemble_distance(Metric metric, const Ensemble& a, const Ensemble& b);

}  // namespace quddpm
