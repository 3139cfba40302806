#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qmanopt/linalg.hpp"

namespace qmanopt {

using Complex = std::complex<double>;

/// One Pauli string in symplectic form: the realized matrix is
/// coeff · W(x,z) with W = i^{|x∧z|} · X^x · Z^z, so per qubit the bit pair
/// (x,z) encodes I, X, Z or Y = iXZ. W is Hermitian and squares to I.
/// Qubit q corresponds to bit q of a basis index; in text form the leftmost
/// character is the highest qubit.
struct PauliString {
  int qubits = 0;
  std::uint64_t x_mask = 0;
  std::uint64_t z_mask = 0;
  Complex coeff{1.0, 0.0};

  std::string label() const;
};

/// W(x1,z1)·W(x2,z2) reduced to a single string with the product phase.
PauliString operator*(const PauliString& a, const PauliString& b);

/// Weighted sum of Pauli strings with merged duplicates; terms are kept
/// sorted on (z,x) so iteration order (and any sampling driven by it) is
/// deterministic.
class PauliSum {
 public:
  PauliSum() = default;
  explicit PauliSum(int qubits) : qubits_(qubits) {}
  static PauliSum identity(int qubits, Complex coeff = {1.0, 0.0});

  int qubits() const { return qubits_; }
  std::size_t size() const { return terms_.size(); }
  const std::vector<PauliString>& terms() const { return terms_; }

  void add(std::uint64_t x, std::uint64_t z, Complex coeff);
  void add(const PauliString& term);
  void prune(double tol = 1e-14);

  PauliSum& operator+=(const PauliSum& o);
  PauliSum operator+(const PauliSum& o) const;
  PauliSum operator*(const PauliSum& o) const;
  PauliSum operator*(Complex s) const;

  /// Largest |imaginary part| over coefficients; zero for Hermitian sums.
  double max_imag() const;

  /// Text form: one `<coefficient> <IXYZ string>` per line.
  std::string to_text() const;
  static PauliSum from_text(std::istream& in);
  static PauliSum from_text(const std::string& text);

 private:
  int qubits_ = 0;
  std::vector<PauliString> terms_;
};

/// a_P = Tr(W·M)/2^q over all 4^q strings; Σ a_P·W reconstructs M.
/// Hermitian (symmetric real) input gives real coefficients; real skew input
/// gives purely imaginary coefficients on odd-Y strings.
PauliSum pauli_decompose(const Matrix& m, double prune_tol = 1e-14);

/// Realize a sum as a dense real matrix (throws if the realization has a
/// non-negligible imaginary part). `max_qubits` caps memory.
Matrix pauli_to_matrix(const PauliSum& ps, int max_qubits = 12);

/// Tensor product placing `high` on the more significant qubits.
PauliSum pauli_kron(const PauliSum& high, const PauliSum& low);

/// ⟨v|W|v⟩ and W·v helpers on raw (real) statevectors of length 2^q.
double pauli_expectation(const PauliString& term, const Vector& v);

}  // namespace qmanopt
