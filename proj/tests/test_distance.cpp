#include <doctest.h>

#include "oracles.hpp"
#include "quddpm/datasets.hpp"
#include "quddpm/distance.hpp"
#include "quddpm/random.hpp"

using namespace quddpm;

namespace {

Ensemble weighted_haar(int n, int count, RandomStream& rng) {
  Ensemble e = gen_haar(n, count, rng);
  for (auto& w : e.weights) w = rng.uniform(0.1, 1.0);
  e.weights /= e.weights.sum();
  return e;
}

}  // namespace

TEST_SUITE("distance") {

TEST_CASE("shot budget parsing") {
  CHECK(ShotBudget::parse("exact").exact());
  CHECK(ShotBudget::parse("250").shots == 250);
  CHECK(ShotBudget::parse("250").str() == "250");
  CHECK(ShotBudget::exact_overlaps().str() == "exact");
  CHECK_THROWS(ShotBudget::parse("-3"));
  CHECK_THROWS(ShotBudget::parse("many"));
  CHECK_THROWS(ShotBudget::per_pair(0));
}

TEST_CASE("mean fidelity against the pairwise double sum") {
  RandomStream rng(1);
  const auto a = weighted_haar(2, 9, rng);
  const auto b = weighted_haar(2, 13, rng);
  double expect = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      expect += a.weights(Eigen::Index(i)) * b.weights(Eigen::Index(j)) * fidelity(a.states[i], b.states[j]);
  CHECK(mean_fidelity(a, b) == doctest::Approx(expect).epsilon(1e-12));
  const auto f = fidelity_matrix(a, b);
  CHECK(f.values.rows() == 9);
  CHECK(f.values.cols() == 13);
  CHECK(mean_fidelity(f, a.weights, b.weights) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("MMD identities") {
  RandomStream rng(2);
  const auto a = weighted_haar(2, 11, rng);
  const auto b = gen_cluster(2, 0.1, 7, rng);
  CHECK(mmd(a, a) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(std::abs(mmd_pairwise(a, a)) < 1e-12);
  CHECK(mmd(a, b) == doctest::Approx(mmd_pairwise(a, b)).epsilon(1e-12));
  CHECK(mmd(a, b) == doctest::Approx(mmd(b, a)).epsilon(1e-14));
  CHECK(mmd(a, b) > 0.0);
  // a permuted copy is the same ensemble
  Ensemble p = a;
  std::reverse(p.states.begin(), p.states.end());
  p.weights.reverseInPlace();
  CHECK(std::abs(mmd(a, p)) < 1e-14);
  CHECK_THROWS(mmd(a, gen_haar(1, 3, rng)));
}

TEST_CASE("SWAP-test estimator follows the binomial model") {
  RandomStream rng(3);
  const int m = 400, reps = 4000;
  for (double f : {0.3, 0.6, 0.95}) {
    double sum = 0.0, sum2 = 0.0;
    for (int r = 0; r < reps; ++r) {
      const double est = swap_test_estimate(f, m, rng);
      CHECK(est >= 0.0);
      CHECK(est <= 1.0);
      sum += est;
      sum2 += est * est;
    }
    const double mean = sum / reps;
    const double var = sum2 / reps - mean * mean;
    const double p = 0.5 + 0.5 * f;
    const double model_var = 4 * p * (1 - p) / m;
    CHECK(std::abs(mean - f) < 3 * std::sqrt(model_var / reps));
    // sample variance of a near-normal variable has relative sd sqrt(2 / reps)
    CHECK(std::abs(var / model_var - 1.0) < 3 * std::sqrt(2.0 / reps));
  }
  CHECK_THROWS(swap_test_estimate(0.5, 0, rng));
}

TEST_CASE("shot-mode fidelity matrices are reproducible") {
  RandomStream rng(4);
  const auto a = gen_haar(1, 5, rng);
  const auto b = gen_haar(1, 6, rng);
  RandomStream r1(9), r2(9);
  const auto f1 = fidelity_matrix(a, b, ShotBudget::per_pair(100), &r1);
  const auto f2 = fidelity_matrix(a, b, ShotBudget::per_pair(100), &r2);
  CHECK(f1.values == f2.values);
  CHECK(r1.uniform() == r2.uniform());
  CHECK((f1.values - fidelity_matrix(a, b).values).cwiseAbs().maxCoeff() < 0.5);
  CHECK_THROWS(fidelity_matrix(a, b, ShotBudget::per_pair(100), nullptr));
}

TEST_CASE("Wasserstein metric axioms") {
  RandomStream rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    const auto a = weighted_haar(1, 5, rng);
    const auto b = weighted_haar(1, 7, rng);
    const auto c = weighted_haar(1, 4, rng);
    const double ab = wasserstein(a, b), ba = wasserstein(b, a);
    CHECK(std::abs(wasserstein(a, a)) < 1e-8);
    CHECK(ab > 0.0);
    CHECK(std::abs(ab - ba) < 1e-8);
    CHECK(ab <= wasserstein(a, c) + wasserstein(c, b) + 1e-8);
  }
}

TEST_CASE("Wasserstein against hand-computed couplings") {
  // Two point masses: W1 is the pair distance sqrt(1 - F).
  StateVector zero(1);
  StateVector plus(1);
  apply_rotation(plus, 0, Axis::Y, std::numbers::pi / 2);
  const auto a = Ensemble::uniform({zero});
  const auto b = Ensemble::uniform({plus});
  CHECK(wasserstein(a, b, 1) == doctest::Approx(std::sqrt(0.5)));
  CHECK(wasserstein(a, b, 2) == doctest::Approx(std::sqrt(0.5)));
  // Equal-weight pairs matched in the cheaper order.
  const auto one = StateVector::basis(1, 1);
  const auto c = Ensemble::uniform({zero, one});
  const auto d = Ensemble::uniform({one, zero});
  CHECK(wasserstein(c, d) == doctest::Approx(0.0).epsilon(1e-12));
  const auto e = Ensemble::uniform({plus, one});
  // match zero-plus (sqrt .5) and one-one (0): mean sqrt(.5)/2, cheaper than zero-one + one-plus
  CHECK(wasserstein(c, e) == doctest::Approx(std::sqrt(0.5) / 2));
  CHECK_THROWS(wasserstein(c, e, 3));
}

TEST_CASE("metric names") {
  CHECK(metric_from_string("mmd") == Metric::Mmd);
  CHECK(metric_from_string("wasserstein") == Metric::Wasserstein);
  CHECK(metric_from_string(to_string(Metric::Wasserstein)) == Metric::Wasserstein);
  CHECK_THROWS(metric_from_string("kl"));
}

}
