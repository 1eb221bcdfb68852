#include <doctest.h>

#include "oracles.hpp"
#include "quddpm/baselines.hpp"
#include "quddpm/datasets.hpp"

using namespace quddpm;

namespace {

TrainConfig tiny() {
  TrainConfig cfg;
  cfg.n = 1;
  cfg.n_ancilla = 1;
  cfg.layers = 2;
  cfg.T = 2;
  cfg.N = 10;
  cfg.N_test = 10;
  cfg.iters_per_cycle = 10;
  cfg.schedule.T = 2;
  return cfg;
}

HeaParams random_hea(int n, int layers, RandomStream& rng) {
  HeaParams p(n, layers);
  for (auto& t : p.theta) t = rng.uniform(-3.2, 3.2);
  return p;
}

// P(qubit 0 reads 0) after U_D on rho x |0><0|.
double real_probability_oracle(const HeaParams& d, const oracle::Mat& rho) {
  const Eigen::Index anc = (Eigen::Index{1} << d.n_qubits) / rho.rows();
  oracle::Mat zero = oracle::Mat::Zero(anc, anc);
  zero(0, 0) = 1;
  const oracle::Mat u = oracle::hea_matrix(d);
  const oracle::Mat out = u * oracle::kron(rho, zero) * u.adjoint();
  double p = 0.0;
  for (Eigen::Index i = 0; i < out.rows() / 2; ++i) p += out(i, i).real();
  return p;
}

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("discriminator probability matches the dense circuit") {
  RandomStream rng(1);
  const auto d = random_hea(3, 4, rng);
  const ComplexMatrix rho = mean_density(gen_haar(2, 3, rng));
  CHECK(discriminator_real_probability(d, rho) == doctest::Approx(real_probability_oracle(d, rho)).epsilon(1e-12));
}

TEST_CASE("discriminator loss value and gradient") {
  RandomStream rng(2);
  const auto d = random_hea(3, 3, rng);
  const ComplexMatrix fake = mean_density(gen_haar(2, 4, rng));
  const ComplexMatrix real = mean_density(gen_cluster(2, 0.1, 4, rng));
  const auto vg = discriminator_loss(d, fake, real);
  CHECK(vg.value == doctest::Approx(discriminator_real_probability(d, fake) - discriminator_real_probability(d, real)).epsilon(1e-12));
  const double h = 1e-5;
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    HeaParams a = d, b = d;
    a.theta(k) += h;
    b.theta(k) -= h;
    const double fd = (discriminator_loss(a, fake, real).value - discriminator_loss(b, fake, real).value) / (2 * h);
    CHECK(std::abs(vg.gradient(k) - fd) < 1e-6);
  }
}

TEST_CASE("QuDT and QuGAN generators match the QuDDPM parameter count") {
  RandomStream data(3);
  const auto target = gen_cluster(1, 0.08, 10, data);
  const auto cfg = tiny();
  const auto [qudt, qudt_res] = train_qudt(cfg, target, RandomStream(4));
  CHECK(qudt.generator.params.size() == DenoiseModel(1, 1, 2, 2).parameter_count());
  CHECK(qudt_res.generated.size() == 10);
  CHECK_FALSE(qudt_res.records.empty());
  GanSettings gan;
  gan.cycles = 2;
  gan.discriminator_layers = 3;
  const auto [qugan, gan_res] = train_qugan(cfg, target, RandomStream(4), gan);
  CHECK(qugan.generator.params.size() == qudt.generator.params.size());
  CHECK(qugan.discriminator.n_qubits == 2);
  CHECK(qugan.discriminator.size() == 12);
  CHECK(gan_res.records.size() == 4);
  CHECK(gan_res.records[0].label == "gan_d");
  CHECK(gan_res.records[1].label == "gan_g");
  // deterministic
  const auto again = train_qudt(cfg, target, RandomStream(4));
  CHECK(again.first.generator.params.theta == qudt.generator.params.theta);
  gan.cycles = 0;
  CHECK_THROWS(train_qugan(cfg, target, RandomStream(4), gan));
}

TEST_CASE("benchmark comparison reports all three models") {
  RandomStream data(5);
  const auto target = gen_cluster(1, 0.08, 10, data);
  GanSettings gan;
  gan.cycles = 1;
  gan.discriminator_layers = 2;
  const auto report = benchmark_compare(target, tiny(), RandomStream(6), gan);
  REQUIRE(report.size() == 3);
  CHECK(report[0].model == "quddpm");
  CHECK(report[1].model == "qudt");
  CHECK(report[2].model == "qugan");
  for (const auto& e : report) {
    CHECK(e.parameters == report[0].parameters);
    CHECK(e.distance >= 0.0);
    CHECK(e.fidelity_test >= 0.0);
    CHECK(e.fidelity_test <= 1.0);
  }
}

}
