#include "quddpm/metrics.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "quddpm/datasets.hpp"

namespace quddpm {

std::string to_string(TaskKind t) {
  switch (t) {
    case TaskKind::Cluster: return "cluster";
    case TaskKind::CorrelatedNoise: return "correlated_noise";
    case TaskKind::Tfim: return "tfim";
    case TaskKind::Circle: return "circle";
  }
  return "unknown";
}

TaskKind task_kind_from_string(const std::string& name) {
  if (name == "cluster") return TaskKind::Cluster;
  if (name == "correlated_noise") return TaskKind::CorrelatedNoise;
  if (name == "tfim") return TaskKind::Tfim;
  if (name == "circle") return TaskKind::Circle;
  throw std::invalid_argument("unknown task '" + name + "'");
}

nlohmann::json MetricReport::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : values) j[k] = v;
  for (const auto& [k, v] : arrays) j[k] = v;
  return j;
}

std::pair<double, double> magnetization_moments(const StateVector& s) {
  const int n = s.n_qubits();
  double m1 = 0.0;
  double m2 = 0.0;
  for (Eigen::Index z = 0; z < s.dim(); ++z) {
    const double m = static_cast<double>(n - 2 * std::popcount(static_cast<std::uint64_t>(z))) / n;
    const double p = std::norm(s[z]);
    m1 += p * m;
    m2 += p * m * m;
  }
  return {m1, m2};
}

namespace {

void add_mean_std(MetricReport& r, const std::string& key, const Eigen::VectorXd& x, const Eigen::VectorXd& w) {
  const double mean = w.dot(x);
  const double var = w.dot((x.array() - mean).square().matrix());
  r.values[key] = mean;
  r.values[key + "_std"] = std::sqrt(std::max(var, 0.0));
}

}  // namespace

MetricReport compute_metrics(const Ensemble& generated, TaskKind task, const MetricOptions& opts) {
  generated.validate();
  const auto count = static_cast<Eigen::Index>(generated.size());
  const Eigen::VectorXd& w = generated.weights;
  MetricReport r;
  r.values["count"] = static_cast<double>(count);
  Eigen::VectorXd x(count);
  switch (task) {
    case TaskKind::Cluster:
      for (Eigen::Index i = 0; i < count; ++i) x(i) = std::norm(generated.states[static_cast<std::size_t>(i)][0]);
      add_mean_std(r, "fidelity_center", x, w);
      break;
    case TaskKind::CorrelatedNoise: {
      if (generated.n_qubits() != 2) throw std::invalid_argument("compute_metrics: correlated noise is a 2-qubit task");
      for (Eigen::Index i = 0; i < count; ++i) x(i) = std::norm(generated.states[static_cast<std::size_t>(i)][2]);
      add_mean_std(r, "f10", x, w);
      r.values["p_estimate"] = r.values["f10"] / (opts.c1_abs2 * mean_sin_squared(opts.delta0));
      break;
    }
    case TaskKind::Tfim: {
      Eigen::VectorXd rms(count);
      std::vector<double> hist(static_cast<std::size_t>(opts.histogram_bins), 0.0);
      double ferro = 0.0;
      for (Eigen::Index i = 0; i < count; ++i) {
        const auto [m1, m2] = magnetization_moments(generated.states[static_cast<std::size_t>(i)]);
        x(i) = m1;
        rms(i) = std::sqrt(std::max(m2, 0.0));
        if (rms(i) > opts.ferro_threshold) ferro += w(i);
        auto bin = static_cast<int>(std::floor((m1 + 1.0) / 2.0 * opts.histogram_bins));
        bin = std::clamp(bin, 0, opts.histogram_bins - 1);
        hist[static_cast<std::size_t>(bin)] += w(i);
      }
      add_mean_std(r, "magnetization", x, w);
      add_mean_std(r, "magnetization_rms", rms, w);
      r.values["ferro_fraction"] = ferro;
      r.arrays["magnetization_histogram"] = hist;
      break;
    }
    case TaskKind::Circle: {
      if (generated.n_qubits() != 1) throw std::invalid_argument("compute_metrics: circle is a 1-qubit task");
      const PauliString y("Y");
      for (Eigen::Index i = 0; i < count; ++i) {
        const double e = pauli_expectation(generated.states[static_cast<std::size_t>(i)], y);
        x(i) = e * e;
      }
      add_mean_std(r, "y2", x, w);
      break;
    }
  }
  return r;
}

}  // namespace quddpm
