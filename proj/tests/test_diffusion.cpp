#include <doctest.h>

#include "oracles.hpp"
#include "quddpm/datasets.hpp"
#include "quddpm/diffusion.hpp"
#include "quddpm/parallel.hpp"

using namespace quddpm;

TEST_SUITE("diffusion") {

TEST_CASE("trajectory shape and the starting snapshot") {
  RandomStream data(1);
  const auto e0 = gen_cluster(2, 0.06, 30, data);
  DiffusionSchedule sched;
  sched.T = 12;
  const auto traj = run_forward(e0, sched, RandomStream(5));
  CHECK(traj.steps() == 12);
  CHECK(traj.snapshots.size() == 13);
  CHECK(traj.params.size() == 30);
  CHECK(traj.params[3].size() == 12);
  for (std::size_t i = 0; i < e0.size(); ++i) CHECK(traj.at(0).states[i].amplitudes() == e0.states[i].amplitudes());
  for (int t = 0; t <= 12; ++t)
    for (const auto& s : traj.at(t).states) CHECK(std::abs(s.norm_squared() - 1.0) < 1e-10);
}

TEST_CASE("step parameters come from the named substreams") {
  RandomStream data(2);
  const auto e0 = gen_cluster(1, 0.08, 4, data);
  DiffusionSchedule sched;
  sched.T = 5;
  const RandomStream rng(77);
  const auto traj = run_forward(e0, sched, rng);
  RandomStream step = rng.substream("diffusion").substream("sample", 2).substream("step", 4);
  const auto expect = sample_step_params(1, 4, sched, step);
  CHECK(traj.params[2][3].phi == expect.phi);
  CHECK(traj.params[2][3].g == expect.g);
  // snapshot t is the product of the first t recorded steps
  StateVector s = e0.states[2];
  for (int t = 1; t <= 5; ++t) apply_scrambling_step(s, traj.params[2][static_cast<std::size_t>(t - 1)]);
  CHECK(s.amplitudes() == traj.at(5).states[2].amplitudes());
}

TEST_CASE("replay is bit-exact and independent of thread count") {
  RandomStream data(3);
  const auto e0 = gen_cluster(3, 0.06, 40, data);
  DiffusionSchedule sched;
  sched.T = 8;
  set_thread_count(1);
  const auto one = run_forward(e0, sched, RandomStream(9));
  set_thread_count(4);
  const auto four = run_forward(e0, sched, RandomStream(9));
  set_thread_count(0);
  const auto again = replay(e0, one);
  for (int t = 0; t <= 8; ++t) {
    for (std::size_t i = 0; i < e0.size(); ++i) {
      CHECK(one.at(t).states[i].amplitudes() == four.at(t).states[i].amplitudes());
      CHECK(again[static_cast<std::size_t>(t)].states[i].amplitudes() == one.at(t).states[i].amplitudes());
    }
  }
  const auto other = run_forward(e0, sched, RandomStream(10));
  CHECK(other.at(8).states[0].amplitudes() != one.at(8).states[0].amplitudes());
  CHECK_THROWS(replay(gen_cluster(3, 0.06, 5, data), one));
}

TEST_CASE("scrambling drives a cluster towards Haar") {
  RandomStream data(4);
  const auto e0 = gen_cluster(2, 0.06, 500, data);
  DiffusionSchedule sched;
  sched.T = 20;
  const auto traj = run_forward(e0, sched, RandomStream(11));
  RandomStream hr(12);
  const auto haar = gen_haar(2, 500, hr);
  const auto curve = diffusion_distance_curve(traj, haar, Metric::Mmd);
  CHECK(curve.size() == 21);
  CHECK(curve(0) > 0.5);
  // two finite Haar-like samples of 500 states: E ||rho_a - rho_b||^2 ~ 2 (1 - 1/d) / (d N)
  CHECK(curve(20) < 10 * 2 * (0.75) / (4 * 500));
  const auto to_self = diffusion_distance_curve(traj, e0, Metric::Mmd);
  CHECK(to_self(0) == doctest::Approx(0.0).epsilon(1e-14));
  // <Z> on qubit 0 relaxes to zero on average
  double z = 0.0;
  for (const auto& s : traj.at(20).states) z += pauli_expectation(s, PauliString("ZI"));
  CHECK(std::abs(z / 500) < 4 * std::sqrt(1.0 / 3.0 / 500));
}

TEST_CASE("noise sampler") {
  RandomStream data(5);
  const auto e0 = gen_cluster(1, 0.08, 10, data);
  DiffusionSchedule sched;
  sched.T = 20;
  const auto traj = run_forward(e0, sched, RandomStream(13));
  const auto a = noise_sampler(traj, 300, RandomStream(14));
  const auto b = noise_sampler(traj, 300, RandomStream(14));
  CHECK(a.size() == 300);
  CHECK(a.n_qubits() == 1);
  CHECK(a.states[17].amplitudes() == b.states[17].amplitudes());
  // scrambled |0>: Bloch vector averages to zero
  const ComplexMatrix rho = mean_density(a);
  CHECK(std::abs(rho(0, 0).real() - 0.5) < 4 * std::sqrt(1.0 / 12 / 300));
  CHECK_THROWS(noise_sampler(traj, 0, RandomStream(1)));
}

}
