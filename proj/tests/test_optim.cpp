#include <doctest.h>

#include <atomic>

#include "quddpm/optim.hpp"
#include "quddpm/parallel.hpp"
#include "quddpm/random.hpp"

using namespace quddpm;

TEST_SUITE("optim") {

TEST_CASE("first Adam step moves every coordinate by the step size") {
  Adam adam(AdamConfig{}, 3);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd g(3);
  g << 2.0, -0.5, 1e-3;
  adam.step(x, g);
  // m_hat = g, v_hat = g^2: update = lr * g / (|g| + eps)
  CHECK(x(0) == doctest::Approx(-0.05).epsilon(1e-6));
  CHECK(x(1) == doctest::Approx(0.05).epsilon(1e-6));
  CHECK(x(2) == doctest::Approx(-0.05 * 1e-3 / (1e-3 + 1e-8)).epsilon(1e-9));
  CHECK(adam.iterations() == 1);
  CHECK_THROWS(Adam(AdamConfig{-1.0}, 2));
}

TEST_CASE("Adam minimizes a quadratic") {
  Eigen::VectorXd x(2);
  x << 3.0, -2.0;
  const GradientObjective f = [](const Eigen::VectorXd& y, Eigen::VectorXd* g) {
    if (g) *g = 2.0 * Eigen::Vector2d(y(0) - 1.0, 4.0 * (y(1) + 0.5));
    return std::pow(y(0) - 1.0, 2) + 4.0 * std::pow(y(1) + 0.5, 2);
  };
  const auto r = minimize_adam(x, f, AdamConfig{}, 2000, 50, 1e-9);
  CHECK(x(0) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(x(1) == doctest::Approx(-0.5).epsilon(1e-3));
  CHECK(r.best_loss <= r.initial_loss);
  CHECK(r.losses.size() == r.seconds.size());
}

TEST_CASE("plateau detector") {
  PlateauDetector p(3, 1e-3);
  CHECK_FALSE(p.update(1.0));
  CHECK_FALSE(p.update(0.5));
  CHECK_FALSE(p.update(0.4));
  CHECK_FALSE(p.update(0.3));  // 1.0 -> 0.3 over the window
  CHECK_FALSE(p.update(0.3));
  CHECK_FALSE(p.update(0.3));
  CHECK(p.update(0.3));  // best unchanged for a full window
}

TEST_CASE("minimize keeps the best point and rejects NaN") {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
  int calls = 0;
  const GradientObjective bumpy = [&](const Eigen::VectorXd& y, Eigen::VectorXd* g) {
    ++calls;
    if (g) (*g)(0) = -1.0;  // always pushes upward
    return y(0) < 0.12 ? 1.0 - y(0) : 10.0;
  };
  const auto r = minimize_adam(x, bumpy, AdamConfig{}, 5, 100, 0.0);
  CHECK(r.best_loss == doctest::Approx(1.0 - x(0)));
  CHECK(x(0) < 0.12);
  CHECK(calls == 6);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(1);
  const GradientObjective nan = [](const Eigen::VectorXd&, Eigen::VectorXd* g) {
    if (g) g->setZero();
    return std::numeric_limits<double>::quiet_NaN();
  };
  CHECK_THROWS_AS(minimize_adam(y, nan, AdamConfig{}, 5), std::domain_error);
}

TEST_CASE("SPSA is unbiased for a linear function") {
  RandomStream rng(1);
  Eigen::VectorXd c(4);
  c << 1.0, -2.0, 0.5, 3.0;
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
  SpsaConfig cfg{8, 0.01};
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(4);
  const int reps = 2000;
  for (int r = 0; r < reps; ++r) mean += spsa_gradient([&](const Eigen::VectorXd& y, int) { return c.dot(y); }, x, cfg, rng);
  mean /= reps;
  // per-coordinate sd: sqrt(sum_{j != i} c_j^2 / (probes * reps)) < 0.03
  CHECK((mean - c).cwiseAbs().maxCoeff() < 0.12);
}

TEST_CASE("random streams") {
  const RandomStream a(42);
  RandomStream s1 = a.substream("x", 3), s2 = a.substream("x", 3), s3 = a.substream("x", 4), s4 = a.substream("y", 3);
  CHECK(s1.key() == s2.key());
  CHECK(s1.key() != s3.key());
  CHECK(s1.key() != s4.key());
  CHECK(s1.uniform() == s2.uniform());
  CHECK(RandomStream(1).substream("a").substream("b").key() != RandomStream(1).substream("b").substream("a").key());
  RandomStream u(5);
  for (int k = 0; k < 1000; ++k) {
    const double v = u.uniform(-2.0, 3.0);
    CHECK(v >= -2.0);
    CHECK(v < 3.0);
    CHECK(u.below(7) < 7);
  }
}

TEST_CASE("parallel_for covers every index and rethrows") {
  for (int threads : {1, 3, 8}) {
    set_thread_count(threads);
    std::vector<int> hit(1000, 0);
    parallel_for(hit.size(), [&](std::size_t i) { hit[i] += 1; });
    CHECK(std::all_of(hit.begin(), hit.end(), [](int h) { return h == 1; }));
    CHECK_THROWS_AS(parallel_for(100, [](std::size_t i) { if (i == 57) throw std::runtime_error("boom"); }), std::runtime_error);
  }
  set_thread_count(0);
  CHECK(thread_count() >= 1);
  parallel_for(0, [](std::size_t) { FAIL("no work expected"); });
}

}
