#pragma once

#include <Eigen/Core>

#include <deque>
#include <functional>
#include <vector>

#include "quddpm/random.hpp"

namespace quddpm {

struct AdamConfig {
  double step_size = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam(AdamConfig cfg, Eigen::Index dim);

  /// x <- x - lr * mhat / (sqrt(vhat) + eps).
  void step(Eigen::VectorXd& x, const Eigen::VectorXd& grad);
  [[nodiscard]] long iterations() const { return t_; }

 private:
  AdamConfig cfg_;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  long t_ = 0;
};

struct SpsaConfig {
  int probes = 4;
  double perturbation = 0.01;
};

/// Two-sided simultaneous-perturbation gradient averaged over `probes` Rademacher
/// directions. `f(x, probe)` receives the probe index so callers can share
/// random numbers between the + and - evaluations.
Eigen::VectorXd spsa_gradient(const std::function<double(const Eigen::VectorXd&, int)>& f,
                              const Eigen::VectorXd& x, const SpsaConfig& cfg, RandomStream& rng);

/// Stops once the best loss improved by less than `tolerance` (relative) over `window` updates.
class PlateauDetector {
 public:
  PlateauDetector(int window = 20, double tolerance = 1e-5) : window_(window), tolerance_(tolerance) {}

  /// Feeds one loss; true when training should stop.
  bool update(double loss);

 private:
  int window_;
  double tolerance_;
  double best_ = 0.0;
  std::deque<double> history_;  // best-so-far after each update
};

struct MinimizeResult {
  std::vector<double> losses;   ///< per evaluation, the last one at the returned point's successor
  std::vector<double> seconds;  ///< elapsed time at each loss
  double initial_loss = 0.0;
  double best_loss = 0.0;
};

/// Objective returning f(x) and, when `grad` is non-null, filling the gradient.
using GradientObjective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

/// Adam for at most `max_iters` updates with plateau stopping. `x` ends at the
/// best point evaluated, so best_loss <= initial_loss. Throws std::domain_error
/// on a non-finite loss or gradient.
MinimizeResult minimize_adam(Eigen::VectorXd& x, const GradientObjective& f, const AdamConfig& cfg,
                             int max_iters, int plateau_window = 20, double plateau_tolerance = 1e-5);

}  // namespace quddpm
