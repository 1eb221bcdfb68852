#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "quddpm/ensemble.hpp"

namespace quddpm {

enum class TaskKind { Cluster, CorrelatedNoise, Tfim, Circle };

std::string to_string(TaskKind t);
TaskKind task_kind_from_string(const std::string& name);

struct MetricOptions {
  double c1_abs2 = 1.0 / 3.0;            ///< |c1|^2 of the normalized correlated-noise target
  double delta0 = 1.0471975511965976;    ///< pi / 3
  double ferro_threshold = 0.8;          ///< on sqrt(<M^2>)
  int histogram_bins = 20;
};

struct MetricReport {
  std::map<std::string, double> values;
  std::map<std::string, std::vector<double>> arrays;

  [[nodiscard]] double at(const std::string& key) const { return values.at(key); }
  [[nodiscard]] nlohmann::json to_json() const;
};

/// Cluster: fidelity_center (mean, std) to |0...0>.
/// Correlated noise: f10 = mean |<10|psi>|^2 and p_estimate = f10 / (|c1|^2 E[sin^2 delta]).
/// TFIM: magnetization <M> and rms sqrt(<M^2>) per state (mean values, histogram
/// of <M> over [-1, 1]) and ferro_fraction, the share with rms above threshold.
/// Circle: y2 = mean <Y>^2 (and std).
MetricReport compute_metrics(const Ensemble& generated, TaskKind task, const MetricOptions& opts = {});

/// <M> and <M^2> for M = sum_i Z_i / n.
std::pair<double, double> magnetization_moments(const StateVector& s);

}  // namespace quddpm
