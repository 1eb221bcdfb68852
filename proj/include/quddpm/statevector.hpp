#pragma once

// Dense pure-state simulation.
//
// Basis convention: qubit 0 is the most significant bit of the basis index.
// For an n-qubit register, qubit q toggles index bit (n - 1 - q), so
// |q0 q1 ... q_{n-1}> has index q0 * 2^{n-1} + ... + q_{n-1}.

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "quddpm/random.hpp"

namespace quddpm {

enum class Axis { X, Y, Z };

/// Numerically-zero measurement branches are dropped below this probability.
inline constexpr double kBranchEpsilon = 1e-12;

template <typename Real>
class BasicStateVector {
 public:
  using RealScalar = Real;
  using Scalar = std::complex<Real>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  /// |0...0> on `n_qubits` qubits.
  explicit BasicStateVector(int n_qubits = 1) : n_(n_qubits) {
    if (n_qubits < 1 || n_qubits > 30) {
      throw std::invalid_argument("StateVector: n_qubits must be in [1, 30], got " +
                                  std::to_string(n_qubits));
    }
    amp_ = Vector::Zero(Eigen::Index{1} << n_qubits);
    amp_(0) = Scalar(1);
  }

  static BasicStateVector basis(int n_qubits, std::uint64_t index) {
    BasicStateVector s(n_qubits);
    if (index >= static_cast<std::uint64_t>(s.dim())) {
      throw std::out_of_range("StateVector::basis: index out of range");
    }
    s.amp_(0) = Scalar(0);
    s.amp_(static_cast<Eigen::Index>(index)) = Scalar(1);
    return s;
  }

  /// Wraps an amplitude vector; the vector is normalized.
  static BasicStateVector from_amplitudes(Vector amplitudes) {
    const auto dim = amplitudes.size();
    if (dim < 2 || (dim & (dim - 1)) != 0) {
      throw std::invalid_argument("StateVector: amplitude length must be a power of two >= 2");
    }
    const Real norm = amplitudes.norm();
    if (!(norm > Real(0)) || !std::isfinite(static_cast<double>(norm))) {
      throw std::invalid_argument("StateVector: amplitudes have zero or non-finite norm");
    }
    BasicStateVector s;
    s.n_ = 0;
    while ((Eigen::Index{1} << s.n_) < dim) ++s.n_;
    s.amp_ = std::move(amplitudes) / norm;
    return s;
  }

  [[nodiscard]] int n_qubits() const { return n_; }
  [[nodiscard]] Eigen::Index dim() const { return amp_.size(); }
  [[nodiscard]] const Vector& amplitudes() const { return amp_; }
  [[nodiscard]] Scalar operator[](Eigen::Index i) const { return amp_(i); }
  [[nodiscard]] Real norm_squared() const { return amp_.squaredNorm(); }

  /// Raw access for gate kernels. Callers keep the state normalized.
  Vector& mutable_amplitudes() { return amp_; }

  void renormalize() { amp_ /= amp_.norm(); }

 private:
  int n_;
  Vector amp_;
};

using StateVector = BasicStateVector<double>;
using Complex = std::complex<double>;

namespace detail {

template <typename Real>
void check_qubit(const BasicStateVector<Real>& s, int q) {
  if (q < 0 || q >= s.n_qubits()) {
    throw std::out_of_range("qubit index " + std::to_string(q) + " out of range for " +
                            std::to_string(s.n_qubits()) + "-qubit register");
  }
}

template <typename Real>
void check_pair(const BasicStateVector<Real>& s, int q1, int q2) {
  check_qubit(s, q1);
  check_qubit(s, q2);
  if (q1 == q2) throw std::invalid_argument("two-qubit gate on identical qubits");
}

inline Eigen::Index stride_of(int n, int q) { return Eigen::Index{1} << (n - 1 - q); }

}  // namespace detail

namespace kernels {

// Raw kernels over an amplitude vector of an n-qubit register. They do not
// check or preserve normalization, so they also serve adjoint (costate) vectors.

template <typename Real>
using AmpVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
void matrix_1q(AmpVector<Real>& a, int n, int qubit, std::complex<Real> m00,
               std::complex<Real> m01, std::complex<Real> m10, std::complex<Real> m11) {
  const Eigen::Index stride = detail::stride_of(n, qubit);
  const Eigen::Index dim = a.size();
  for (Eigen::Index base = 0; base < dim; base += 2 * stride) {
    for (Eigen::Index i = base; i < base + stride; ++i) {
      const auto a0 = a(i);
      const auto a1 = a(i + stride);
      a(i) = m00 * a0 + m01 * a1;
      a(i + stride) = m10 * a0 + m11 * a1;
    }
  }
}

template <typename Real>
void rotation(AmpVector<Real>& a, int n, int qubit, Axis axis, Real angle) {
  using C = std::complex<Real>;
  const Real c = std::cos(angle / 2);
  const Real sn = std::sin(angle / 2);
  switch (axis) {
    case Axis::X: matrix_1q(a, n, qubit, C(c, 0), C(0, -sn), C(0, -sn), C(c, 0)); break;
    case Axis::Y: matrix_1q(a, n, qubit, C(c, 0), C(-sn, 0), C(sn, 0), C(c, 0)); break;
    case Axis::Z: matrix_1q(a, n, qubit, C(c, -sn), C(0), C(0), C(c, sn)); break;
  }
}

template <typename Real>
void pauli(AmpVector<Real>& a, int n, int qubit, Axis axis) {
  using C = std::complex<Real>;
  switch (axis) {
    case Axis::X: matrix_1q(a, n, qubit, C(0), C(1), C(1), C(0)); break;
    case Axis::Y: matrix_1q(a, n, qubit, C(0), C(0, -1), C(0, 1), C(0)); break;
    case Axis::Z: matrix_1q(a, n, qubit, C(1), C(0), C(0), C(-1)); break;
  }
}

template <typename Real>
void zz(AmpVector<Real>& a, int n, int q1, int q2, Real angle) {
  const Eigen::Index m1 = detail::stride_of(n, q1);
  const Eigen::Index m2 = detail::stride_of(n, q2);
  const std::complex<Real> even = std::polar(Real(1), -angle / 2);
  const std::complex<Real> odd = std::polar(Real(1), angle / 2);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const bool parity = ((i & m1) != 0) != ((i & m2) != 0);
    a(i) *= parity ? odd : even;
  }
}

template <typename Real>
void cz(AmpVector<Real>& a, int n, int q1, int q2) {
  const Eigen::Index mask = detail::stride_of(n, q1) | detail::stride_of(n, q2);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if ((i & mask) == mask) a(i) = -a(i);
  }
}

}  // namespace kernels

/// Applies the 2x2 matrix [[m00, m01], [m10, m11]] to `qubit`.
template <typename Real>
void apply_matrix_1q(BasicStateVector<Real>& s, int qubit, std::complex<Real> m00,
                     std::complex<Real> m01, std::complex<Real> m10, std::complex<Real> m11) {
  detail::check_qubit(s, qubit);
  kernels::matrix_1q(s.mutable_amplitudes(), s.n_qubits(), qubit, m00, m01, m10, m11);
}

/// exp(-i angle P / 2) on `qubit`, P in {X, Y, Z}.
template <typename Real>
void apply_rotation(BasicStateVector<Real>& s, int qubit, Axis axis, Real angle) {
  detail::check_qubit(s, qubit);
  kernels::rotation(s.mutable_amplitudes(), s.n_qubits(), qubit, axis, angle);
}

/// Applies the bare Pauli `axis` to `qubit` (not a rotation).
template <typename Real>
void apply_pauli(BasicStateVector<Real>& s, int qubit, Axis axis) {
  detail::check_qubit(s, qubit);
  kernels::pauli(s.mutable_amplitudes(), s.n_qubits(), qubit, axis);
}

/// exp(-i angle Z_{q1} Z_{q2} / 2).
template <typename Real>
void apply_zz(BasicStateVector<Real>& s, int q1, int q2, Real angle) {
  detail::check_pair(s, q1, q2);
  kernels::zz(s.mutable_amplitudes(), s.n_qubits(), q1, q2, angle);
}

/// Controlled-Z: phase -1 on components with both qubits set.
template <typename Real>
void apply_cz(BasicStateVector<Real>& s, int q1, int q2) {
  detail::check_pair(s, q1, q2);
  kernels::cz(s.mutable_amplitudes(), s.n_qubits(), q1, q2);
}

/// <a|b>.
template <typename Real>
std::complex<Real> overlap(const BasicStateVector<Real>& a, const BasicStateVector<Real>& b) {
  if (a.n_qubits() != b.n_qubits()) {
    throw std::invalid_argument("overlap: register sizes differ");
  }
  return a.amplitudes().dot(b.amplitudes());  // Eigen conjugates the left operand
}

template <typename Real>
Real fidelity(const BasicStateVector<Real>& a, const BasicStateVector<Real>& b) {
  return std::norm(overlap(a, b));
}

/// Per-qubit Pauli labels; label k acts on qubit k.
class PauliString {
 public:
  enum class Label : char { I = 'I', X = 'X', Y = 'Y', Z = 'Z' };

  PauliString() = default;
  explicit PauliString(std::string_view labels);

  [[nodiscard]] int size() const { return static_cast<int>(labels_.size()); }
  [[nodiscard]] Label operator[](int k) const { return labels_[static_cast<std::size_t>(k)]; }
  [[nodiscard]] std::string str() const;

  /// Single non-identity label on `qubit` of an `n`-qubit register.
  static PauliString single(int n, int qubit, Axis axis);

 private:
  std::vector<Label> labels_;
};

double pauli_expectation(const StateVector& s, const PauliString& p);

/// |psi> (x) |0>^{n_ancilla}; ancillas take the trailing (least significant) indices.
StateVector append_ancillas(const StateVector& s, int n_ancilla);

struct MeasurementBranch {
  std::vector<int> outcome;  ///< one bit per measured qubit, in request order
  StateVector post_state;    ///< measured qubits removed
  double probability = 0.0;
};

/// Born-rule projective measurement in the computational basis on `qubits`.
MeasurementBranch measure_qubits(const StateVector& s, const std::vector<int>& qubits,
                                 RandomStream& rng);

/// Every outcome with probability above kBranchEpsilon, ordered by outcome value.
std::vector<MeasurementBranch> enumerate_branches(const StateVector& s,
                                                  const std::vector<int>& qubits);

/// Born probabilities of all 2^k outcomes on `qubits`; outcome bits are read
/// with the first listed qubit as most significant.
std::vector<double> outcome_probabilities(const StateVector& s, const std::vector<int>& qubits);

}  // namespace quddpm
