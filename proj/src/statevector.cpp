#include "quddpm/statevector.hpp"

#include <algorithm>

namespace quddpm {

PauliString::PauliString(std::string_view labels) {
  labels_.reserve(labels.size());
  for (char c : labels) {
    switch (c) {
      case 'I': case 'X': case 'Y': case 'Z':
        labels_.push_back(static_cast<Label>(c));
        break;
      default:
        throw std::invalid_argument(std::string("PauliString: bad label '") + c + "'");
    }
  }
}

std::string PauliString::str() const {
  std::string out;
  for (auto l : labels_) out.push_back(static_cast<char>(l));
  return out;
}

PauliString PauliString::single(int n, int qubit, Axis axis) {
  std::string labels(static_cast<std::size_t>(n), 'I');
  labels.at(static_cast<std::size_t>(qubit)) = axis == Axis::X ? 'X' : axis == Axis::Y ? 'Y' : 'Z';
  return PauliString(labels);
}

double pauli_expectation(const StateVector& s, const PauliString& p) {
  if (p.size() != s.n_qubits()) {
    throw std::invalid_argument("pauli_expectation: string length " + std::to_string(p.size()) +
                                " does not match " + std::to_string(s.n_qubits()) + " qubits");
  }
  StateVector applied = s;
  for (int k = 0; k < p.size(); ++k) {
    switch (p[k]) {
      case PauliString::Label::I: break;
      case PauliString::Label::X: apply_pauli(applied, k, Axis::X); break;
      case PauliString::Label::Y: apply_pauli(applied, k, Axis::Y); break;
      case PauliString::Label::Z: apply_pauli(applied, k, Axis::Z); break;
    }
  }
  return overlap(s, applied).real();
}

StateVector append_ancillas(const StateVector& s, int n_ancilla) {
  if (n_ancilla < 0) throw std::invalid_argument("append_ancillas: negative ancilla count");
  if (n_ancilla == 0) return s;
  const Eigen::Index factor = Eigen::Index{1} << n_ancilla;
  StateVector::Vector out = StateVector::Vector::Zero(s.dim() * factor);
  for (Eigen::Index i = 0; i < s.dim(); ++i) out(i * factor) = s[i];
  return StateVector::from_amplitudes(std::move(out));
}

namespace {

struct MeasureLayout {
  std::vector<Eigen::Index> measured_masks;  // request order
  std::vector<Eigen::Index> kept_masks;      // most significant first
};

MeasureLayout layout_for(const StateVector& s, const std::vector<int>& qubits) {
  const int n = s.n_qubits();
  if (qubits.empty()) throw std::invalid_argument("measure: no qubits given");
  if (static_cast<int>(qubits.size()) >= n) {
    throw std::invalid_argument("measure: measuring every qubit would leave an empty register");
  }
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  MeasureLayout layout;
  for (int q : qubits) {
    detail::check_qubit(s, q);
    if (seen[static_cast<std::size_t>(q)]) throw std::invalid_argument("measure: duplicate qubit");
    seen[static_cast<std::size_t>(q)] = true;
    layout.measured_masks.push_back(detail::stride_of(n, q));
  }
  for (int q = 0; q < n; ++q) {
    if (!seen[static_cast<std::size_t>(q)]) layout.kept_masks.push_back(detail::stride_of(n, q));
  }
  return layout;
}

std::size_t outcome_of(Eigen::Index i, const MeasureLayout& layout) {
  std::size_t z = 0;
  for (auto m : layout.measured_masks) z = (z << 1) | ((i & m) ? 1U : 0U);
  return z;
}

Eigen::Index kept_index(Eigen::Index i, const MeasureLayout& layout) {
  Eigen::Index r = 0;
  for (auto m : layout.kept_masks) r = (r << 1) | ((i & m) ? 1 : 0);
  return r;
}

std::vector<double> probabilities(const StateVector& s, const MeasureLayout& layout) {
  std::vector<double> probs(std::size_t{1} << layout.measured_masks.size(), 0.0);
  const auto& a = s.amplitudes();
  for (Eigen::Index i = 0; i < s.dim(); ++i) probs[outcome_of(i, layout)] += std::norm(a(i));
  return probs;
}

MeasurementBranch project(const StateVector& s, const MeasureLayout& layout, std::size_t z,
                          double probability) {
  const auto k = layout.measured_masks.size();
  StateVector::Vector post = StateVector::Vector::Zero(Eigen::Index{1} << layout.kept_masks.size());
  const auto& a = s.amplitudes();
  for (Eigen::Index i = 0; i < s.dim(); ++i) {
    if (outcome_of(i, layout) == z) post(kept_index(i, layout)) = a(i);
  }
  MeasurementBranch b{std::vector<int>(k), StateVector::from_amplitudes(std::move(post)),
                      probability};
  for (std::size_t j = 0; j < k; ++j) b.outcome[j] = static_cast<int>((z >> (k - 1 - j)) & 1U);
  return b;
}

}  // namespace

std::vector<double> outcome_probabilities(const StateVector& s, const std::vector<int>& qubits) {
  return probabilities(s, layout_for(s, qubits));
}

MeasurementBranch measure_qubits(const StateVector& s, const std::vector<int>& qubits,
                                 RandomStream& rng) {
  const auto layout = layout_for(s, qubits);
  const auto probs = probabilities(s, layout);
  double total = 0.0;
  for (double p : probs) total += p;
  const double u = rng.uniform() * total;
  double acc = 0.0;
  std::size_t chosen = probs.size();
  for (std::size_t z = 0; z < probs.size(); ++z) {
    if (probs[z] <= kBranchEpsilon) continue;
    chosen = z;  // last admissible outcome absorbs round-off at the top end
    acc += probs[z];
    if (u < acc) break;
  }
  if (chosen == probs.size()) throw std::logic_error("measure_qubits: all branches vanish");
  return project(s, layout, chosen, probs[chosen] / total);
}

std::vector<MeasurementBranch> enumerate_branches(const StateVector& s,
                                                  const std::vector<int>& qubits) {
  const auto layout = layout_for(s, qubits);
  const auto probs = probabilities(s, layout);
  std::vector<MeasurementBranch> out;
  for (std::size_t z = 0; z < probs.size(); ++z) {
    if (probs[z] > kBranchEpsilon) out.push_back(project(s, layout, z, probs[z]));
  }
  return out;
}

}  // namespace quddpm
