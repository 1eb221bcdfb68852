#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "quddpm/ansatz.hpp"
#include "quddpm/distance.hpp"
#include "quddpm/ensemble.hpp"
#include "quddpm/random.hpp"

namespace quddpm {

/// Forward diffusion S_0 ... S_T with the scrambling angles used for every sample.
struct DiffusionTrajectory {
  DiffusionSchedule schedule;
  std::vector<Ensemble> snapshots;                         ///< T + 1 entries
  std::vector<std::vector<ScramblingStepParams>> params;   ///< [sample][t - 1]
  std::uint64_t seed = 0;                                  ///< key of the stream that drew params

  [[nodiscard]] int steps() const { return schedule.T; }
  [[nodiscard]] const Ensemble& at(int t) const { return snapshots.at(static_cast<std::size_t>(t)); }
};

/// Scrambles each sample independently. Sample i draws step t from the
/// substream ("diffusion") / ("sample", i) / ("step", t).
DiffusionTrajectory run_forward(const Ensemble& e0, const DiffusionSchedule& sched,
                                const RandomStream& rng);

/// Recomputes the snapshots from e0 and the recorded angles.
std::vector<Ensemble> replay(const Ensemble& e0, const DiffusionTrajectory& traj);

/// Fresh scrambling sequences under the trajectory's schedule applied to |0...0>.
Ensemble noise_sampler(const DiffusionTrajectory& traj, int n_samples, const RandomStream& rng);

/// D(S_t, target) for t = 0 ... T.
Eigen::VectorXd diffusion_distance_curve(const DiffusionTrajectory& traj, const Ensemble& target,
                                         Metric metric);

}  // namespace quddpm
