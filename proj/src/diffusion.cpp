#include "quddpm/diffusion.hpp"

#include <stdexcept>

#include "quddpm/parallel.hpp"

namespace quddpm {

namespace {

std::vector<ScramblingStepParams> draw_sequence(int n, const DiffusionSchedule& sched,
                                                const RandomStream& sample_stream) {
  std::vector<ScramblingStepParams> seq;
  seq.reserve(static_cast<std::size_t>(sched.T));
  for (int t = 1; t <= sched.T; ++t) {
    RandomStream step = sample_stream.substream("step", static_cast<std::uint64_t>(t));
    seq.push_back(sample_step_params(n, t, sched, step));
  }
  return seq;
}

}  // namespace

DiffusionTrajectory run_forward(const Ensemble& e0, const DiffusionSchedule& sched,
                                const RandomStream& rng) {
  if (e0.empty()) throw std::invalid_argument("run_forward: empty input ensemble");
  e0.validate();
  sched.validate();
  const RandomStream base = rng.substream("diffusion");
  DiffusionTrajectory traj;
  traj.schedule = sched;
  traj.seed = base.key();
  traj.params.resize(e0.size());
  const int n = e0.n_qubits();
  parallel_for(e0.size(), [&](std::size_t i) {
    traj.params[i] = draw_sequence(n, sched, base.substream("sample", i));
  });
  traj.snapshots = replay(e0, traj);
  return traj;
}

std::vector<Ensemble> replay(const Ensemble& e0, const DiffusionTrajectory& traj) {
  if (traj.params.size() != e0.size()) {
    throw std::invalid_argument("replay: trajectory was recorded for a different ensemble size");
  }
  const int T = traj.schedule.T;
  std::vector<std::vector<StateVector>> per_step(static_cast<std::size_t>(T) + 1,
                                                 std::vector<StateVector>(e0.size()));
  parallel_for(e0.size(), [&](std::size_t i) {
    StateVector s = e0.states[i];
    per_step[0][i] = s;
    for (int t = 1; t <= T; ++t) {
      apply_scrambling_step(s, traj.params[i][static_cast<std::size_t>(t) - 1]);
      per_step[static_cast<std::size_t>(t)][i] = s;
    }
  });
  std::vector<Ensemble> snapshots;
  snapshots.reserve(per_step.size());
  for (auto& states : per_step) snapshots.emplace_back(std::move(states), e0.weights);
  return snapshots;
}

Ensemble noise_sampler(const DiffusionTrajectory& traj, int n_samples, const RandomStream& rng) {
  if (n_samples < 1) throw std::invalid_argument("noise_sampler: need at least one sample");
  if (traj.snapshots.empty()) throw std::invalid_argument("noise_sampler: empty trajectory");
  const int n = traj.snapshots.front().n_qubits();
  const RandomStream base = rng.substream("noise_sampler");
  std::vector<StateVector> states(static_cast<std::size_t>(n_samples));
  parallel_for(states.size(), [&](std::size_t i) {
    StateVector s(n);
    for (const auto& p : draw_sequence(n, traj.schedule, base.substream("sample", i))) {
      apply_scrambling_step(s, p);
    }
    states[i] = std::move(s);
  });
  return Ensemble::uniform(std::move(states));
}

Eigen::VectorXd diffusion_distance_curve(const DiffusionTrajectory& traj, const Ensemble& target,
                                         Metric metric) {
  Eigen::VectorXd curve(static_cast<Eigen::Index>(traj.snapshots.size()));
  parallel_for(traj.snapshots.size(), [&](std::size_t t) {
    curve(static_cast<Eigen::Index>(t)) = ensemble_distance(metric, traj.snapshots[t], target);
  });
  return curve;
}

}  // namespace quddpm
