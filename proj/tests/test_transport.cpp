#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "quddpm/random.hpp"
#include "quddpm/transport.hpp"

using namespace quddpm;

namespace {

Eigen::VectorXd random_simplex(Eigen::Index n, RandomStream& rng) {
  Eigen::VectorXd v(n);
  for (auto& x : v) x = rng.uniform(0.05, 1.0);
  return v / v.sum();
}

Eigen::MatrixXd random_cost(Eigen::Index m, Eigen::Index n, RandomStream& rng) {
  Eigen::MatrixXd c(m, n);
  for (auto& x : c.reshaped()) x = rng.uniform(0.0, 1.0);
  return c;
}

}  // namespace

TEST_SUITE("transport") {

TEST_CASE("uniform square problems match the best permutation") {
  RandomStream rng(1);
  for (int n = 1; n <= 6; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      const Eigen::MatrixXd c = random_cost(n, n, rng);
      std::vector<int> perm(static_cast<std::size_t>(n));
      std::iota(perm.begin(), perm.end(), 0);
      double best = 1e300;
      do {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += c(i, perm[static_cast<std::size_t>(i)]);
        best = std::min(best, s / n);
      } while (std::next_permutation(perm.begin(), perm.end()));
      const Eigen::VectorXd u = Eigen::VectorXd::Constant(n, 1.0 / n);
      CHECK(solve_transport(u, u, c).cost == doctest::Approx(best).epsilon(1e-10));
    }
  }
}

TEST_CASE("plan is feasible and the duals certify optimality") {
  RandomStream rng(2);
  for (auto [m, n] : {std::pair{3, 5}, std::pair{7, 4}, std::pair{20, 30}, std::pair{60, 45}}) {
    const Eigen::VectorXd a = random_simplex(m, rng);
    const Eigen::VectorXd b = random_simplex(n, rng);
    const Eigen::MatrixXd c = random_cost(m, n, rng);
    const auto r = solve_transport(a, b, c, true);
    Eigen::MatrixXd plan = Eigen::MatrixXd::Zero(m, n);
    for (const auto& f : r.plan) {
      CHECK(f.mass > 0.0);
      plan(f.source, f.sink) += f.mass;
    }
    CHECK((plan.rowwise().sum() - a).cwiseAbs().maxCoeff() < 1e-11);
    CHECK((plan.colwise().sum().transpose() - b).cwiseAbs().maxCoeff() < 1e-11);
    CHECK((plan.array() * c.array()).sum() == doctest::Approx(r.cost).epsilon(1e-12));
    const double dual = a.dot(r.source_potential) + b.dot(r.sink_potential);
    CHECK(dual == doctest::Approx(r.cost).epsilon(1e-9));
    double violation = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) violation = std::max(violation, r.source_potential(i) + r.sink_potential(j) - c(i, j));
    CHECK(violation < 1e-9);
  }
}

TEST_CASE("degenerate and trivial instances") {
  // zero cost everywhere
  const Eigen::VectorXd a = Eigen::VectorXd::Constant(4, 0.25);
  const Eigen::VectorXd b = Eigen::VectorXd::Constant(2, 0.5);
  CHECK(solve_transport(a, b, Eigen::MatrixXd::Zero(4, 2)).cost == 0.0);
  // single source: the cost is the b-weighted row
  Eigen::VectorXd one(1);
  one << 1.0;
  Eigen::MatrixXd row(1, 2);
  row << 0.3, 0.9;
  CHECK(solve_transport(one, b, row).cost == doctest::Approx(0.6));
  // zero-mass entries are allowed
  Eigen::VectorXd z(3);
  z << 0.5, 0.0, 0.5;
  Eigen::MatrixXd c(3, 3);
  c << 0, 1, 1, 1, 0, 1, 1, 1, 0;
  CHECK(solve_transport(z, z, c).cost == doctest::Approx(0.0));
  // unnormalized totals scale the cost
  CHECK(solve_transport(2 * z, 2 * z, c + Eigen::MatrixXd::Ones(3, 3)).cost == doctest::Approx(2.0));
}

TEST_CASE("input validation") {
  const Eigen::VectorXd a = Eigen::VectorXd::Constant(2, 0.5);
  const Eigen::MatrixXd c = Eigen::MatrixXd::Ones(2, 2);
  CHECK_THROWS_AS(solve_transport(a, a, Eigen::MatrixXd::Ones(2, 3)), std::invalid_argument);
  CHECK_THROWS_AS(solve_transport(a, Eigen::VectorXd::Constant(2, 0.6), c), std::invalid_argument);
  Eigen::VectorXd neg(2);
  neg << 1.5, -0.5;
  CHECK_THROWS_AS(solve_transport(neg, a, c), std::invalid_argument);
  Eigen::MatrixXd bad = c;
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(solve_transport(a, a, bad), std::invalid_argument);
  CHECK_THROWS_AS(solve_transport(Eigen::VectorXd(), a, c), std::invalid_argument);
}

}
