#pragma once

#include <cstdint>

#include "qmanopt/manifold.hpp"
#include "qmanopt/pauli.hpp"

namespace qmanopt {

bool is_power_of_two(Index v);
Index next_power_of_two(Index v);

/// Maximally entangled frame state: the unit vector p^{-1/2}·vec(X) on an
/// ancilla⊗system register. Amplitudes are real and stored with the system
/// index fast (amplitude of |k⟩|i⟩ at k·n + i); ancilla branches k ≥ p are
/// exactly zero.
class EntangledState {
 public:
  static constexpr double kNormTol = 1e-12;
  EntangledState(Index n, Index p, Vector amplitudes);

  Index n() const { return n_; }
  Index p() const { return p_; }
  Index anc_dim() const { return anc_dim_; }
  int system_qubits() const;
  int ancilla_qubits() const;
  const Vector& amplitudes() const { return amps_; }

  /// View of the amplitudes as an n × anc_dim matrix (branch per column).
  Eigen::Map<const Matrix> branches() const;

 private:
  Index n_ = 0, p_ = 0, anc_dim_ = 0;
  Vector amps_;
};

EntangledState prepare_state(const StiefelPoint& x);

/// Recover the frame from the populated branches: X = √p · branches[0..p).
StiefelPoint state_to_frame(const EntangledState& state);

/// ⟨Ψ|(K ⊗ B)|Ψ⟩. K acts on the ancilla register (given as a p×p matrix,
/// padded with zeros, or an ancilla-register Pauli sum); B on the system.
double expectation(const EntangledState& state, const Matrix& sys_op);
double expectation(const EntangledState& state, const Matrix& anc_op_p, const Matrix& sys_op);
double expectation(const EntangledState& state, const PauliSum& anc_op, const PauliSum& sys_op);

/// X M Xᵀ from the state: p · branches · M̃ · branchesᵀ. M omitted means XXᵀ
/// (p times the reduced density matrix of the system register).
Matrix system_density(const EntangledState& state);
Matrix system_density(const EntangledState& state, const Matrix& m);

/// Xᵀ B X from the state: p · branchesᵀ · B · branches on populated branches.
Matrix subspace_matrix(const EntangledState& state, const Matrix& b);
Matrix subspace_matrix(const EntangledState& state, const PauliSum& b);

/// Unitary retraction (e^{tA} ⊗ e^{tL})|Ψ⟩, the vectorized form of
/// e^{tL} X e^{−tA}; the ancilla exponential is embedded as e^{tA} ⊕ I on
/// padded branches. Supports the alpha family like the classical retraction.
EntangledState apply_retraction_exact(const EntangledState& state, const TangentAction& act,
                                      double t, double alpha = 0.0);

/// Second-order (symmetric) Trotterization of both exponentials from the
/// Pauli decompositions of the generators. Error vs the exact retraction
/// scales as O(1/steps²). Padding branches are projected back to zero after
/// the product, inside the approximation order. `max_terms` (0 = unlimited)
/// guards the decomposition budget.
EntangledState apply_retraction_trotter(const EntangledState& state, const TangentAction& act,
                                        double t, int steps, std::size_t max_terms = 0);

/// Grassmannian degrees-of-freedom removal: measures A' = XᵀOX and applies
/// (e^{A'} ⊗ e^{O}); first-order equal to retracting along P^Gr_X(OX).
EntangledState grassmann_dof_retract(const EntangledState& state, const SkewMatrix& o);

struct SampleEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Per-term finite-shot estimate of ⟨Ψ|obs|Ψ⟩ for a Hermitian Pauli sum on
/// the full (ancilla+system) register. Each string is sampled from its exact
/// outcome distribution; identity terms contribute exactly. The reported
/// standard error uses the exact per-string variances, so a fixed seed gives
/// bit-identical output.
SampleEstimate sample_expectation(const EntangledState& state, const PauliSum& obs,
                                  long long shots, std::uint64_t seed);

}  // namespace qmanopt
