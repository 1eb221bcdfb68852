#include "quddpm/datasets.hpp"

#include <Eigen/Eigenvalues>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace quddpm {

Ensemble gen_cluster(int n, double epsilon, int count, RandomStream& rng) {
  if (epsilon < 0.0) throw std::invalid_argument("gen_cluster: epsilon must be >= 0");
  if (count < 1) throw std::invalid_argument("gen_cluster: count must be >= 1");
  const Eigen::Index dim = Eigen::Index{1} << n;
  std::vector<StateVector> states;
  states.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    StateVector::Vector a = StateVector::Vector::Zero(dim);
    a(0) = 1.0;
    for (Eigen::Index z = 1; z < dim; ++z) {
      const double re = rng.normal();
      const double im = rng.normal();
      a(z) = epsilon * Complex(re, im);
    }
    states.push_back(StateVector::from_amplitudes(std::move(a)));
  }
  return Ensemble::uniform(std::move(states));
}

double mean_sin_squared(double delta0) {
  if (delta0 == 0.0) return 0.0;
  return 0.5 * (1.0 - std::sin(2.0 * delta0) / (2.0 * delta0));
}

Ensemble gen_correlated_noise(Complex c0, Complex c1, Complex c3, double p, double delta0,
                              int count, RandomStream& rng) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("gen_correlated_noise: p outside [0, 1]");
  if (count < 1) throw std::invalid_argument("gen_correlated_noise: count must be >= 1");
  StateVector::Vector a(4);
  a << c0, c1, Complex(0), c3;
  const StateVector target = StateVector::from_amplitudes(a);
  std::vector<StateVector> states;
  states.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const bool xx = rng.uniform() < p;
    const double delta = rng.uniform(-delta0, delta0);
    const Axis axis = xx ? Axis::X : Axis::Z;
    StateVector flipped = target;
    apply_pauli(flipped, 0, axis);
    apply_pauli(flipped, 1, axis);
    // exp(-i delta P) = cos(delta) I - i sin(delta) P for an involutory P.
    StateVector::Vector out = std::cos(delta) * target.amplitudes() +
                              Complex(0, -std::sin(delta)) * flipped.amplitudes();
    states.push_back(StateVector::from_amplitudes(std::move(out)));
  }
  return Ensemble::uniform(std::move(states));
}

Eigen::MatrixXd tfim_hamiltonian(int n, double g) {
  if (n < 1 || n > 12) throw std::invalid_argument("tfim_hamiltonian: n must be in [1, 12]");
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index z = 0; z < dim; ++z) {
    double diag = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
      const bool a = (z >> (n - 1 - i)) & 1;
      const bool b = (z >> (n - 2 - i)) & 1;
      diag -= (a == b) ? 1.0 : -1.0;
    }
    h(z, z) = diag;
    for (int i = 0; i < n; ++i) h(z ^ (Eigen::Index{1} << (n - 1 - i)), z) -= g;
  }
  return h;
}

namespace {

Eigen::VectorXd magnetization_diagonal(int n) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::VectorXd m(dim);
  for (Eigen::Index z = 0; z < dim; ++z) {
    const int ones = std::popcount(static_cast<std::uint64_t>(z));
    m(z) = static_cast<double>(n - 2 * ones) / n;
  }
  return m;
}

}  // namespace

GroundState tfim_ground_state(int n, double g, RandomStream& rng) {
  const Eigen::MatrixXd h = tfim_hamiltonian(n, g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("tfim_ground_state: eigensolver did not converge (n=" +
                             std::to_string(n) + ", g=" + std::to_string(g) + ")");
  }
  const auto& evals = solver.eigenvalues();
  int degeneracy = 1;
  while (degeneracy < evals.size() && evals(degeneracy) - evals(0) < 1e-10) ++degeneracy;
  Eigen::VectorXd v = solver.eigenvectors().col(0);
  if (degeneracy > 1) {
    const Eigen::MatrixXd basis = solver.eigenvectors().leftCols(degeneracy);
    const Eigen::MatrixXd projected =
        basis.transpose() * magnetization_diagonal(n).asDiagonal() * basis;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> inner(projected);
    const bool negative = rng.uniform() < 0.5;
    const Eigen::Index pick = negative ? 0 : degeneracy - 1;
    v = basis * inner.eigenvectors().col(pick);
  }
  return GroundState{StateVector::from_amplitudes(v.cast<Complex>()), evals(0), degeneracy};
}

Ensemble gen_tfim_ground(int n, double g_min, double g_max, int count, RandomStream& rng) {
  if (g_min < 0.0 || g_max < g_min) throw std::invalid_argument("gen_tfim_ground: bad g range");
  if (count < 1) throw std::invalid_argument("gen_tfim_ground: count must be >= 1");
  std::vector<StateVector> states;
  states.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double g = rng.uniform(g_min, g_max);
    states.push_back(tfim_ground_state(n, g, rng).state);
  }
  return Ensemble::uniform(std::move(states));
}

Ensemble gen_circle(int count, RandomStream& rng) {
  if (count < 1) throw std::invalid_argument("gen_circle: count must be >= 1");
  std::vector<StateVector> states;
  states.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double x = rng.uniform(0.0, 2.0 * std::numbers::pi);
    StateVector s(1);
    apply_rotation(s, 0, Axis::Y, 2.0 * x);
    states.push_back(std::move(s));
  }
  return Ensemble::uniform(std::move(states));
}

Ensemble gen_haar(int n, int count, RandomStream& rng) {
  if (count < 1) throw std::invalid_argument("gen_haar: count must be >= 1");
  const Eigen::Index dim = Eigen::Index{1} << n;
  std::vector<StateVector> states;
  states.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    StateVector::Vector a(dim);
    for (Eigen::Index z = 0; z < dim; ++z) {
      const double re = rng.normal();
      const double im = rng.normal();
      a(z) = Complex(re, im);
    }
    states.push_back(StateVector::from_amplitudes(std::move(a)));
  }
  return Ensemble::uniform(std::move(states));
}

Ensemble generate(const EnsembleSpec& spec, RandomStream& rng) {
  switch (spec.kind) {
    case EnsembleSpec::Kind::Cluster:
      return gen_cluster(spec.n, spec.epsilon, spec.count, rng);
    case EnsembleSpec::Kind::CorrelatedNoise:
      return gen_correlated_noise(spec.coefficients[0], spec.coefficients[1],
                                  spec.coefficients[2], spec.p, spec.delta0, spec.count, rng);
    case EnsembleSpec::Kind::Tfim:
      return gen_tfim_ground(spec.n, spec.g_min, spec.g_max, spec.count, rng);
    case EnsembleSpec::Kind::Circle:
      return gen_circle(spec.count, rng);
    case EnsembleSpec::Kind::Haar:
      return gen_haar(spec.n, spec.count, rng);
  }
  throw std::logic_error("generate: unknown ensemble kind");
}

std::string to_string(EnsembleSpec::Kind kind) {
  switch (kind) {
    case EnsembleSpec::Kind::Cluster: return "cluster";
    case EnsembleSpec::Kind::CorrelatedNoise: return "correlated_noise";
    case EnsembleSpec::Kind::Tfim: return "tfim";
    case EnsembleSpec::Kind::Circle: return "circle";
    case EnsembleSpec::Kind::Haar: return "haar";
  }
  return "unknown";
}

EnsembleSpec::Kind ensemble_kind_from_string(const std::string& name) {
  if (name == "cluster") return EnsembleSpec::Kind::Cluster;
  if (name == "correlated_noise") return EnsembleSpec::Kind::CorrelatedNoise;
  if (name == "tfim") return EnsembleSpec::Kind::Tfim;
  if (name == "circle") return EnsembleSpec::Kind::Circle;
  if (name == "haar") return EnsembleSpec::Kind::Haar;
  throw std::invalid_argument("unknown ensemble kind '" + name + "'");
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "ensemble dump format is little-endian; add byte swapping for this target");

template <typename T>
void put(std::ostream& os, T value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T value{};
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!is) throw std::runtime_error("read_ensemble: truncated file");
  return value;
}

}  // namespace

void write_ensemble(const std::filesystem::path& path, const Ensemble& e) {
  e.validate();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_ensemble: cannot open " + path.string());
  os.write("QENS", 4);
  put<std::uint32_t>(os, 1);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(e.n_qubits()));
  put<std::uint64_t>(os, e.size());
  for (Eigen::Index i = 0; i < e.weights.size(); ++i) put<double>(os, e.weights(i));
  for (const auto& s : e.states) {
    for (Eigen::Index z = 0; z < s.dim(); ++z) {
      put<double>(os, s[z].real());
      put<double>(os, s[z].imag());
    }
  }
}

Ensemble read_ensemble(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_ensemble: cannot open " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "QENS", 4) != 0) {
    throw std::runtime_error("read_ensemble: bad magic in " + path.string());
  }
  if (get<std::uint32_t>(is) != 1) throw std::runtime_error("read_ensemble: unsupported version");
  const auto n = get<std::uint32_t>(is);
  const auto count = get<std::uint64_t>(is);
  if (n < 1 || n > 30) throw std::runtime_error("read_ensemble: bad qubit count");
  Eigen::VectorXd w(static_cast<Eigen::Index>(count));
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = get<double>(is);
  const Eigen::Index dim = Eigen::Index{1} << n;
  std::vector<StateVector> states;
  states.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    StateVector::Vector a(dim);
    for (Eigen::Index z = 0; z < dim; ++z) {
      const double re = get<double>(is);
      const double im = get<double>(is);
      a(z) = Complex(re, im);
    }
    if (std::abs(a.squaredNorm() - 1.0) > 1e-10) throw std::runtime_error("read_ensemble: state is not normalized");
    StateVector s(static_cast<int>(n));
    s.mutable_amplitudes() = std::move(a);
    states.push_back(std::move(s));
  }
  return Ensemble(std::move(states), std::move(w));
}

}  // namespace quddpm
