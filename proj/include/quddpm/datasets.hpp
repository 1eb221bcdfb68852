#pragma once

#include <Eigen/Core>

#include <array>
#include <filesystem>
#include <string>

#include "quddpm/ensemble.hpp"
#include "quddpm/random.hpp"

namespace quddpm {

/// |0...0> + epsilon * sum_{z != 0} c_z |z>, normalized, with Re c_z, Im c_z ~ N(0, 1).
Ensemble gen_cluster(int n, double epsilon, int count, RandomStream& rng);

/// Target c0|00> + c1|01> + c3|11> hit by exp(-i delta X1X2) with probability p,
/// otherwise by exp(-i delta Z1Z2); delta ~ U[-delta0, delta0].
Ensemble gen_correlated_noise(Complex c0, Complex c1, Complex c3, double p, double delta0,
                              int count, RandomStream& rng);

/// E[sin^2 delta] for delta ~ U[-delta0, delta0].
double mean_sin_squared(double delta0);

/// Open-chain -sum Z_i Z_{i+1} - g sum X_i as a dense real symmetric matrix.
Eigen::MatrixXd tfim_hamiltonian(int n, double g);

struct GroundState {
  StateVector state;
  double energy = 0.0;
  int degeneracy = 1;
};

/// Lowest eigenvector of the TFIM chain. Within a ground space degenerate to
/// 1e-10 the vector maximizing |<M>| is returned, with the sign drawn from rng.
GroundState tfim_ground_state(int n, double g, RandomStream& rng);

/// Ground states for g ~ U[g_min, g_max).
Ensemble gen_tfim_ground(int n, double g_min, double g_max, int count, RandomStream& rng);

/// exp(-i x Y)|0> with x ~ U[0, 2 pi).
Ensemble gen_circle(int count, RandomStream& rng);

/// Haar-random pure states from normalized complex Gaussian vectors.
Ensemble gen_haar(int n, int count, RandomStream& rng);

struct EnsembleSpec {
  enum class Kind { Cluster, CorrelatedNoise, Tfim, Circle, Haar };

  Kind kind = Kind::Cluster;
  int n = 1;
  int count = 100;
  double epsilon = 0.08;
  std::array<Complex, 3> coefficients{Complex(1), Complex(1), Complex(1)};  // c0, c1, c3
  double p = 0.3;
  double delta0 = 1.0471975511965976;  // pi / 3
  double g_min = 0.2;
  double g_max = 0.4;
};

Ensemble generate(const EnsembleSpec& spec, RandomStream& rng);

std::string to_string(EnsembleSpec::Kind kind);
EnsembleSpec::Kind ensemble_kind_from_string(const std::string& name);

/// Binary dump, little-endian:
///   "QENS" | u32 version (1) | u32 n_qubits | u64 count | count x f64 weights |
///   count * 2^n x (f64 re, f64 im), state-major.
void write_ensemble(const std::filesystem::path& path, const Ensemble& e);
Ensemble read_ensemble(const std::filesystem::path& path);

}  // namespace quddpm
