#include "quddpm/distance.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "quddpm/parallel.hpp"
#include "quddpm/transport.hpp"

namespace quddpm {

ShotBudget ShotBudget::per_pair(int m) {
  if (m < 1) throw std::invalid_argument("ShotBudget: shots per pair must be >= 1");
  return ShotBudget{m};
}

ShotBudget ShotBudget::parse(const std::string& text) {
  if (text == "exact") return {};
  std::size_t used = 0;
  int m = 0;
  try {
    m = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || m < 1) {
    throw std::invalid_argument("shots must be 'exact' or a positive integer, got '" + text + "'");
  }
  return per_pair(m);
}

std::string ShotBudget::str() const { return exact() ? "exact" : std::to_string(shots); }

double swap_test_estimate(double fidelity, int m, RandomStream& rng) {
  if (m < 1) throw std::invalid_argument("swap_test_estimate: need at least one shot");
  const double p0 = std::clamp(0.5 + 0.5 * fidelity, 0.0, 1.0);
  std::binomial_distribution<int> draw(m, p0);
  const int zeros = draw(rng.engine());
  return std::clamp(2.0 * zeros / m - 1.0, 0.0, 1.0);
}

namespace {

void check_compatible(const Ensemble& a, const Ensemble& b, const char* who) {
  if (a.empty() || b.empty()) throw std::invalid_argument(std::string(who) + ": empty ensemble");
  if (a.n_qubits() != b.n_qubits()) {
    throw std::invalid_argument(std::string(who) + ": ensembles on " + std::to_string(a.n_qubits()) +
                                " and " + std::to_string(b.n_qubits()) + " qubits");
  }
}

}  // namespace

FidelityMatrix fidelity_matrix(const Ensemble& a, const Ensemble& b, ShotBudget shots,
                               RandomStream* rng) {
  check_compatible(a, b, "fidelity_matrix");
  const ComplexMatrix xa = stacked_amplitudes(a);
  const ComplexMatrix xb = stacked_amplitudes(b);
  FidelityMatrix f{(xa.adjoint() * xb).cwiseAbs2()};
  f.values = f.values.cwiseMin(1.0);
  if (shots.exact()) return f;
  if (rng == nullptr) throw std::invalid_argument("fidelity_matrix: shot mode needs a random stream");
  const RandomStream base = rng->substream("swap");
  parallel_for(static_cast<std::size_t>(f.values.rows()), [&](std::size_t i) {
    RandomStream row = base.substream("row", i);
    const auto r = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = 0; j < f.values.cols(); ++j) {
      f.values(r, j) = swap_test_estimate(f.values(r, j), shots.shots, row);
    }
  });
  // Advance the caller's stream so consecutive calls draw fresh shots.
  rng->engine().discard(1);
  return f;
}

double mean_fidelity(const FidelityMatrix& f, const Eigen::VectorXd& wa, const Eigen::VectorXd& wb) {
  return wa.dot(f.values * wb);
}

double mean_fidelity(const Ensemble& a, const Ensemble& b) {
  check_compatible(a, b, "mean_fidelity");
  const ComplexMatrix ra = mean_density(a);
  const ComplexMatrix rb = mean_density(b);
  return (ra.array() * rb.conjugate().array()).sum().real();
}

double mean_fidelity(const Ensemble& a, const Ensemble& b, ShotBudget shots, RandomStream& rng) {
  if (shots.exact()) return mean_fidelity(a, b);
  return mean_fidelity(fidelity_matrix(a, b, shots, &rng), a.weights, b.weights);
}

double mmd(const Ensemble& a, const Ensemble& b) {
  check_compatible(a, b, "mmd");
  return (mean_density(a) - mean_density(b)).squaredNorm();
}

double mmd(const Ensemble& a, const Ensemble& b, ShotBudget shots, RandomStream& rng) {
  if (shots.exact()) return mmd(a, b);
  return mean_fidelity(a, a, shots, rng) + mean_fidelity(b, b, shots, rng) -
         2.0 * mean_fidelity(a, b, shots, rng);
}

double mmd_pairwise(const Ensemble& a, const Ensemble& b) {
  check_compatible(a, b, "mmd_pairwise");
  return mean_fidelity(fidelity_matrix(a, a), a.weights, a.weights) +
         mean_fidelity(fidelity_matrix(b, b), b.weights, b.weights) -
         2.0 * mean_fidelity(fidelity_matrix(a, b), a.weights, b.weights);
}

Eigen::MatrixXd transport_cost(const Eigen::MatrixXd& fidelity, int p) {
  if (p != 1 && p != 2) throw std::invalid_argument("wasserstein: p must be 1 or 2");
  // Infidelities at round-off level are zero; sqrt would lift them to 1e-8.
  Eigen::MatrixXd infidelity = (1.0 - fidelity.array()).matrix();
  infidelity = (infidelity.array() < 1e-14).select(0.0, infidelity);
  return p == 2 ? infidelity : infidelity.cwiseSqrt().eval();
}

double wasserstein(const FidelityMatrix& f, const Eigen::VectorXd& wa, const Eigen::VectorXd& wb,
                   int p) {
  const Eigen::MatrixXd cost = transport_cost(f.values, p);
  const double opt = std::max(solve_transport(wa, wb, cost).cost, 0.0);
  return p == 2 ? std::sqrt(opt) : opt;
}

double wasserstein(const Ensemble& a, const Ensemble& b, int p) {
  check_compatible(a, b, "wasserstein");
  return wasserstein(fidelity_matrix(a, b), a.weights, b.weights, p);
}

double wasserstein(const Ensemble& a, const Ensemble& b, int p, ShotBudget shots, RandomStream& rng) {
  check_compatible(a, b, "wasserstein");
  return wasserstein(fidelity_matrix(a, b, shots, &rng), a.weights, b.weights, p);
}

std::string to_string(Metric m) { return m == Metric::Mmd ? "mmd" : "wasserstein"; }

Metric metric_from_string(const std::string& name) {
  if (name == "mmd" || name == "MMD") return Metric::Mmd;
  if (name == "wasserstein" || name == "W1" || name == "w1") return Metric::Wasserstein;
  throw std::invalid_argument("unknown metric '" + name + "'");
}

double ensemble_distance(Metric metric, const Ensemble& a, const Ensemble& b) {
  return metric == Metric::Mmd ? mmd(a, b) : wasserstein(a, b, 1);
}

}  // namespace quddpm
