#include "quddpm/optim.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <stdexcept>

namespace quddpm {

Adam::Adam(AdamConfig cfg, Eigen::Index dim)
    : cfg_(cfg), m_(Eigen::VectorXd::Zero(dim)), v_(Eigen::VectorXd::Zero(dim)) {
  if (!(cfg.step_size > 0.0) || cfg.beta1 < 0.0 || cfg.beta1 >= 1.0 || cfg.beta2 < 0.0 ||
      cfg.beta2 >= 1.0 || !(cfg.epsilon > 0.0)) {
    throw std::invalid_argument("Adam: invalid hyperparameters");
  }
}

void Adam::step(Eigen::VectorXd& x, const Eigen::VectorXd& grad) {
  if (grad.size() != m_.size() || x.size() != m_.size()) throw std::invalid_argument("Adam: dimension mismatch");
  ++t_;
  m_ = cfg_.beta1 * m_ + (1.0 - cfg_.beta1) * grad;
  v_ = cfg_.beta2 * v_ + (1.0 - cfg_.beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  x.array() -= cfg_.step_size * (m_.array() / c1) / ((v_.array() / c2).sqrt() + cfg_.epsilon);
}

Eigen::VectorXd spsa_gradient(const std::function<double(const Eigen::VectorXd&, int)>& f,
                              const Eigen::VectorXd& x, const SpsaConfig& cfg, RandomStream& rng) {
  if (cfg.probes < 1 || !(cfg.perturbation > 0.0)) throw std::invalid_argument("spsa_gradient: bad config");
  Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
  Eigen::VectorXd delta(x.size());
  for (int probe = 0; probe < cfg.probes; ++probe) {
    for (Eigen::Index i = 0; i < x.size(); ++i) delta(i) = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const double up = f(x + cfg.perturbation * delta, probe);
    const double down = f(x - cfg.perturbation * delta, probe);
    // Rademacher entries are their own inverses.
    g += (up - down) / (2.0 * cfg.perturbation) * delta;
  }
  return g / cfg.probes;
}

bool PlateauDetector::update(double loss) {
  best_ = history_.empty() ? loss : std::min(best_, loss);
  history_.push_back(best_);
  if (static_cast<int>(history_.size()) <= window_) return false;
  const double before = history_.front();
  history_.pop_front();
  const double scale = std::max(std::abs(before), 1e-300);
  return (before - best_) / scale < tolerance_;
}

MinimizeResult minimize_adam(Eigen::VectorXd& x, const GradientObjective& f, const AdamConfig& cfg,
                             int max_iters, int plateau_window, double plateau_tolerance) {
  const auto t0 = std::chrono::steady_clock::now();
  Adam adam(cfg, x.size());
  PlateauDetector plateau(plateau_window, plateau_tolerance);
  MinimizeResult out;
  Eigen::VectorXd best = x;
  double best_loss = std::numeric_limits<double>::infinity();
  Eigen::VectorXd grad(x.size());

  auto record = [&](double loss) {
    if (!std::isfinite(loss)) throw std::domain_error("minimize_adam: non-finite loss");
    out.losses.push_back(loss);
    out.seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    if (loss < best_loss) {
      best_loss = loss;
      best = x;
    }
  };

  for (int it = 0; it < max_iters; ++it) {
    record(f(x, &grad));
    if (!grad.allFinite()) throw std::domain_error("minimize_adam: non-finite gradient");
    if (plateau.update(out.losses.back())) break;
    adam.step(x, grad);
  }
  record(f(x, nullptr));
  x = best;
  out.initial_loss = out.losses.front();
  out.best_loss = best_loss;
  return out;
}

}  // namespace quddpm
