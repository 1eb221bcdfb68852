#include <doctest.h>

#include "oracles.hpp"
#include "quddpm/ansatz.hpp"
#include "quddpm/random.hpp"

using namespace quddpm;

namespace {

oracle::Mat scrambling_matrix(int n, const ScramblingStepParams& p) {
  const Eigen::Index d = Eigen::Index{1} << n;
  oracle::Mat u = oracle::Mat::Identity(d, d);
  for (int k = 0; k < n; ++k) {
    u = oracle::rotation(n, k, Axis::Z, p.phi(3 * k)) * u;
    u = oracle::rotation(n, k, Axis::Y, p.phi(3 * k + 1)) * u;
    u = oracle::rotation(n, k, Axis::Z, p.phi(3 * k + 2)) * u;
  }
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) u = oracle::zz(n, a, b, p.g / std::sqrt(double(n))) * u;
  return u;
}

HeaParams random_hea(int n, int layers, RandomStream& rng) {
  HeaParams p(n, layers);
  for (auto& t : p.theta) t = rng.uniform(-3.2, 3.2);
  return p;
}

}  // namespace

TEST_SUITE("ansatz") {

TEST_CASE("scrambling step matches the dense circuit") {
  RandomStream rng(1);
  DiffusionSchedule sched;
  for (int n = 1; n <= 3; ++n) {
    const auto p = sample_step_params(n, 13, sched, rng);
    auto s = oracle::random_state(n, 40 + n);
    const Eigen::VectorXcd expect = scrambling_matrix(n, p) * s.amplitudes();
    apply_scrambling_step(s, p);
    CHECK((s.amplitudes() - expect).norm() < 1e-10);
  }
  StateVector s(2);
  CHECK_THROWS_AS(apply_scrambling_step(s, ScramblingStepParams{Eigen::VectorXd::Zero(3), 0.0}), std::invalid_argument);
}

TEST_CASE("schedule ranges") {
  DiffusionSchedule ramp{20, DiffusionSchedule::Kind::Ramp, std::numbers::pi, std::numbers::pi};
  CHECK(ramp.angle_range(20) == doctest::Approx(std::numbers::pi));
  CHECK(ramp.angle_range(5) == doctest::Approx(std::numbers::pi / 4));
  CHECK(ramp.g_range(10) == doctest::Approx(std::numbers::pi / 2));
  DiffusionSchedule flat{20, DiffusionSchedule::Kind::Constant, 0.4, 0.2};
  CHECK(flat.angle_range(1) == 0.4);
  CHECK(flat.g_range(17) == 0.2);

  RandomStream rng(2);
  for (int t = 1; t <= 20; ++t) {
    const auto p = sample_step_params(3, t, ramp, rng);
    CHECK(p.phi.size() == 9);
    CHECK(p.phi.cwiseAbs().maxCoeff() <= ramp.angle_range(t));
    CHECK(std::abs(p.g) <= ramp.g_range(t));
  }
  CHECK_THROWS_AS(sample_step_params(1, 0, ramp, rng), std::out_of_range);
  CHECK_THROWS_AS(sample_step_params(1, 21, ramp, rng), std::out_of_range);
  DiffusionSchedule bad{20, DiffusionSchedule::Kind::Ramp, -1.0, 0.0};
  CHECK_THROWS(bad.validate());
}

TEST_CASE("HEA layout") {
  CHECK(HeaParams::count(3, 4) == 24);
  CHECK(HeaParams::index(3, 1, 2, Axis::X) == 10);
  CHECK(HeaParams::index(3, 1, 2, Axis::Y) == 11);
  const auto pairs = hea_cz_pairs(5);
  const std::vector<std::pair<int, int>> expect{{0, 1}, {2, 3}, {1, 2}, {3, 4}};
  CHECK(pairs == expect);
  CHECK(hea_cz_pairs(1).empty());
  CHECK_THROWS_AS(HeaParams(2, 1, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("HEA matches the dense circuit") {
  RandomStream rng(3);
  for (int n = 1; n <= 3; ++n) {
    const auto p = random_hea(n, 3, rng);
    auto s = oracle::random_state(n, 50 + n);
    const Eigen::VectorXcd expect = oracle::hea_matrix(p) * s.amplitudes();
    apply_hea(s, p);
    CHECK((s.amplitudes() - expect).norm() < 1e-10);
  }
  StateVector s(2);
  CHECK_THROWS_AS(apply_hea(s, HeaParams(3, 1)), std::invalid_argument);
}

TEST_CASE("register observable is G on the data qubits") {
  const int nd = 2, na = 1;
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Random(4, 4);
  g = (g + g.adjoint()).eval();
  const auto obs = data_register_observable(g, na);
  const auto s = oracle::random_state(nd + na, 8);
  StateVector::Vector out;
  obs(s.amplitudes(), out);
  const Eigen::VectorXcd expect = oracle::kron(g, oracle::Mat::Identity(2, 2)) * s.amplitudes();
  CHECK((out - expect).norm() < 1e-12);
}

TEST_CASE("shift rule, adjoint and finite differences agree") {
  RandomStream rng(4);
  const int n = 3;
  const auto p = random_hea(n, 2, rng);
  std::vector<StateVector> inputs{oracle::random_state(n, 1), oracle::random_state(n, 2)};
  Eigen::VectorXd weights(2);
  weights << 0.3, 0.7;
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Random(4, 4);
  g = (g + g.adjoint()).eval();
  const auto obs = data_register_observable(g, 1);

  const auto loss = [&](const HeaParams& q) {
    double v = 0.0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      StateVector s = inputs[i];
      apply_hea(s, q);
      StateVector::Vector o;
      obs(s.amplitudes(), o);
      v += weights(static_cast<Eigen::Index>(i)) * s.amplitudes().dot(o).real();
    }
    return v;
  };
  const auto adj = hea_expectation_gradient(p, inputs, weights, obs);
  CHECK(adj.value == doctest::Approx(loss(p)).epsilon(1e-12));
  const double h = 1e-5;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    HeaParams a = p, b = p;
    a.theta(k) += h;
    b.theta(k) -= h;
    const double fd = (loss(a) - loss(b)) / (2 * h);
    const double shift = parameter_shift_gradient(loss, p, k);
    CHECK(std::abs(shift - fd) < 1e-6);
    CHECK(std::abs(adj.gradient(k) - shift) < 1e-10);
  }
  CHECK_THROWS_AS(parameter_shift_gradient(loss, p, p.size()), std::out_of_range);
}

}
