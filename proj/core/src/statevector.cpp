#include "qmanopt/statevector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <string>

#include "qmanopt/errors.hpp"

namespace qmanopt {

namespace {

Matrix skew_of(const Matrix& m) { return m - m.transpose(); }

int log2_exact(Index v) {
  int q = 0;
  while ((Index(1) << q) < v) ++q;
  return q;
}

Matrix pad_ancilla(const Matrix& m, Index p, Index anc_dim, bool identity_pad) {
  if (m.rows() != p || m.cols() != p) {
    throw std::invalid_argument("ancilla operator must be pxp");
  }
  Matrix out = identity_pad ? Matrix(Matrix::Identity(anc_dim, anc_dim))
                            : Matrix(Matrix::Zero(anc_dim, anc_dim));
  out.topLeftCorner(p, p) = m;
  return out;
}

// In-place rotation e^{θ·i·W(x,z)} on a real statevector, valid for odd-Y
// strings (where the whole rotation is real orthogonal). `stride` and
// `blocks` place the register inside a larger product space: the register
// index r addresses amplitudes b·span + r·stride + o for o < stride.
void apply_real_pauli_rotation(Vector& v, std::uint64_t x, std::uint64_t z, int reg_qubits,
                               double theta, Index stride, Index outer_blocks) {
  if (std::popcount(x & z) % 2 != 1 || x == 0) {
    throw NumericalError("pauli rotation: generator term is not an odd-Y string");
  }
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  // W|j⟩ = i·σ_j |j⊕x⟩ with σ_j = i^{|x∧z|−1}(−1)^{|j∧z|} = ±1
  const double base = (((std::popcount(x & z) - 1) / 2) % 2 == 0) ? 1.0 : -1.0;
  const auto reg_dim = std::uint64_t(1) << reg_qubits;
  const Index span = stride * static_cast<Index>(reg_dim);
  for (Index blk = 0; blk < outer_blocks; ++blk) {
    for (std::uint64_t j = 0; j < reg_dim; ++j) {
      const std::uint64_t jx = j ^ x;
      if (jx < j) continue;  // each pair once
      const double sigma = base * ((std::popcount(j & z) % 2 == 0) ? 1.0 : -1.0);
      double* a = v.data() + blk * span + static_cast<Index>(j) * stride;
      double* b = v.data() + blk * span + static_cast<Index>(jx) * stride;
      for (Index o = 0; o < stride; ++o) {
        const double aj = a[o];
        const double bj = b[o];
        a[o] = c * aj + s * sigma * bj;
        b[o] = c * bj - s * sigma * aj;
      }
    }
  }
}

struct TrotterTerm {
  std::uint64_t x, z;
  double theta_unit;  // rotation angle per unit time
};

std::vector<TrotterTerm> skew_generator_terms(const Matrix& generator, std::size_t max_terms,
                                              const char* reg) {
  const PauliSum ps = pauli_decompose(generator);
  if (max_terms != 0 && ps.size() > max_terms) {
    throw std::invalid_argument(std::string("apply_retraction_trotter: ") + reg +
                                " generator needs " + std::to_string(ps.size()) +
                                " Pauli terms, budget is " + std::to_string(max_terms));
  }
  std::vector<TrotterTerm> terms;
  terms.reserve(ps.size());
  for (const auto& t : ps.terms()) {
    if (std::abs(t.coeff.real()) > 1e-10) {
      throw NumericalError("apply_retraction_trotter: generator is not skew (real Pauli weight)");
    }
    terms.push_back({t.x_mask, t.z_mask, t.coeff.imag()});
  }
  return terms;
}

}  // namespace

bool is_power_of_two(Index v) { return v > 0 && (v & (v - 1)) == 0; }

Index next_power_of_two(Index v) {
  Index r = 1;
  while (r < v) r <<= 1;
  return r;
}

EntangledState::EntangledState(Index n, Index p, Vector amplitudes)
    : n_(n), p_(p), anc_dim_(next_power_of_two(p)), amps_(std::move(amplitudes)) {
  if (!is_power_of_two(n_)) {
    throw std::invalid_argument("EntangledState: system dimension " + std::to_string(n_) +
                                " is not a power of two");
  }
  if (p_ < 1 || p_ > n_) throw std::invalid_argument("EntangledState: need 1 <= p <= n");
  if (amps_.size() != anc_dim_ * n_) {
    throw std::invalid_argument("EntangledState: expected " + std::to_string(anc_dim_ * n_) +
                                " amplitudes, got " + std::to_string(amps_.size()));
  }
  const double norm = amps_.norm();
  if (std::abs(norm - 1.0) > kNormTol) {
    throw ConstraintError("EntangledState: norm " + std::to_string(norm) + " is not 1");
  }
  for (Index k = p_; k < anc_dim_; ++k) {
    if ((amps_.segment(k * n_, n_).array() != 0.0).any()) {
      throw ConstraintError("EntangledState: padding branch " + std::to_string(k) +
                            " is populated");
    }
  }
}

int EntangledState::system_qubits() const { return log2_exact(n_); }
int EntangledState::ancilla_qubits() const { return log2_exact(anc_dim_); }

Eigen::Map<const Matrix> EntangledState::branches() const {
  return {amps_.data(), n_, anc_dim_};
}

EntangledState prepare_state(const StiefelPoint& x) {
  if (!is_power_of_two(x.n())) {
    throw std::invalid_argument("prepare_state: frame dimension " + std::to_string(x.n()) +
                                " is not a power of two (classical backend handles general n)");
  }
  const Index anc = next_power_of_two(x.p());
  Vector amps = Vector::Zero(anc * x.n());
  const double scale = 1.0 / std::sqrt(static_cast<double>(x.p()));
  for (Index k = 0; k < x.p(); ++k) {
    amps.segment(k * x.n(), x.n()) = scale * x.mat().col(k);
  }
  amps /= amps.norm();
  return {x.n(), x.p(), std::move(amps)};
}

StiefelPoint state_to_frame(const EntangledState& state) {
  const double scale = std::sqrt(static_cast<double>(state.p()));
  Matrix x = scale * state.branches().leftCols(state.p());
  return StiefelPoint(std::move(x));
}

double expectation(const EntangledState& state, const Matrix& sys_op) {
  if (sys_op.rows() != state.n() || sys_op.cols() != state.n()) {
    throw std::invalid_argument("expectation: system operator must be nxn");
  }
  const auto m = state.branches();
  return (m.transpose() * sys_op * m).trace();
}

double expectation(const EntangledState& state, const Matrix& anc_op_p, const Matrix& sys_op) {
  if (sys_op.rows() != state.n() || sys_op.cols() != state.n()) {
    throw std::invalid_argument("expectation: system operator must be nxn");
  }
  const Matrix anc = pad_ancilla(anc_op_p, state.p(), state.anc_dim(), false);
  const auto m = state.branches();
  // ⟨vec(M), (K⊗B) vec(M)⟩ = Tr(Mᵀ B M Kᵀ)
  return ((m.transpose() * sys_op * m) * anc.transpose()).trace();
}

double expectation(const EntangledState& state, const PauliSum& anc_op, const PauliSum& sys_op) {
  if (anc_op.qubits() != state.ancilla_qubits()) {
    throw std::invalid_argument("expectation: ancilla Pauli sum has wrong qubit count");
  }
  const Matrix anc_full = pauli_to_matrix(anc_op);
  const Matrix sys = pauli_to_matrix(sys_op, 12);
  if (sys.rows() != state.n()) {
    throw std::invalid_argument("expectation: system Pauli sum has wrong qubit count");
  }
  const auto m = state.branches();
  return ((m.transpose() * sys * m) * anc_full.transpose()).trace();
}

Matrix system_density(const EntangledState& state) {
  const auto m = state.branches();
  return static_cast<double>(state.p()) * (m * m.transpose());
}

Matrix system_density(const EntangledState& state, const Matrix& m_op) {
  const Matrix padded = pad_ancilla(m_op, state.p(), state.anc_dim(), false);
  const auto m = state.branches();
  return static_cast<double>(state.p()) * (m * padded * m.transpose());
}

Matrix subspace_matrix(const EntangledState& state, const Matrix& b) {
  if (b.rows() != state.n() || b.cols() != state.n()) {
    throw std::invalid_argument("subspace_matrix: operator must be nxn");
  }
  const auto m = state.branches();
  const Matrix full = static_cast<double>(state.p()) * (m.transpose() * b * m);
  return full.topLeftCorner(state.p(), state.p());
}

Matrix subspace_matrix(const EntangledState& state, const PauliSum& b) {
  return subspace_matrix(state, pauli_to_matrix(b, 12));
}

EntangledState apply_retraction_exact(const EntangledState& state, const TangentAction& act,
                                      double t, double alpha) {
  if (act.n() != state.n() || act.p() != state.p()) {
    throw std::invalid_argument("apply_retraction_exact: action dimensions mismatch");
  }
  if (alpha < 0.0 || alpha > 1.0) {
    throw std::invalid_argument("apply_retraction_exact: alpha must be in [0,1]");
  }
  Matrix l = act.left.mat();
  if (alpha != 0.0) {
    const Matrix xax = system_density(state, act.right.mat());  // X A Xᵀ, measured
    l -= alpha * skew_of(xax);
  }
  const Matrix q_sys = expm_skew(SkewMatrix(std::move(l)), t);
  // branches transform exactly like X: M' = e^{tL} M e^{(2α−1)tA}, the right
  // factor embedded as a direct sum with I on the padding branches
  const Matrix q_anc =
      pad_ancilla(expm_skew(act.right, (2.0 * alpha - 1.0) * t), state.p(), state.anc_dim(), true);
  Matrix m = q_sys * state.branches() * q_anc;
  Vector amps = Eigen::Map<const Vector>(m.data(), m.size());
  amps /= amps.norm();
  return {state.n(), state.p(), std::move(amps)};
}

EntangledState apply_retraction_trotter(const EntangledState& state, const TangentAction& act,
                                        double t, int steps, std::size_t max_terms) {
  if (act.n() != state.n() || act.p() != state.p()) {
    throw std::invalid_argument("apply_retraction_trotter: action dimensions mismatch");
  }
  if (steps < 1) throw std::invalid_argument("apply_retraction_trotter: steps must be >= 1");

  const auto sys_terms = skew_generator_terms(act.left.mat(), max_terms, "system");
  // Right-multiplying the branch matrix by e^{−tA} is the register operator
  // e^{+tA} on the ancilla side of the state.
  const Matrix a_padded = pad_ancilla(act.right.mat(), state.p(), state.anc_dim(), false);
  const auto anc_terms = skew_generator_terms(a_padded, max_terms, "ancilla");

  const int sys_q = state.system_qubits();
  const int anc_q = state.ancilla_qubits();
  const double tau = t / steps;

  // One symmetric step: half rotations in term order, then in reverse.
  // The ancilla and system factors commute exactly, so they are interleaved
  // into a single term list (system first).
  struct Placed {
    TrotterTerm term;
    bool on_system;
  };
  std::vector<Placed> order;
  order.reserve(sys_terms.size() + anc_terms.size());
  for (const auto& s : sys_terms) order.push_back({s, true});
  for (const auto& a : anc_terms) order.push_back({a, false});

  Vector v = state.amplitudes();
  for (int s = 0; s < steps; ++s) {
    for (auto it = order.begin(); it != order.end(); ++it) {
      const double theta = 0.5 * tau * it->term.theta_unit;
      if (it->on_system) {
        apply_real_pauli_rotation(v, it->term.x, it->term.z, sys_q, theta, 1, state.anc_dim());
      } else {
        apply_real_pauli_rotation(v, it->term.x, it->term.z, anc_q, theta, state.n(), 1);
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const double theta = 0.5 * tau * it->term.theta_unit;
      if (it->on_system) {
        apply_real_pauli_rotation(v, it->term.x, it->term.z, sys_q, theta, 1, state.anc_dim());
      } else {
        apply_real_pauli_rotation(v, it->term.x, it->term.z, anc_q, theta, state.n(), 1);
      }
    }
  }
  // Project Trotter leakage off the padding branches (within the step error).
  for (Index k = state.p(); k < state.anc_dim(); ++k) {
    v.segment(k * state.n(), state.n()).setZero();
  }
  v /= v.norm();
  return {state.n(), state.p(), std::move(v)};
}

EntangledState grassmann_dof_retract(const EntangledState& state, const SkewMatrix& o) {
  if (o.dim() != state.n()) {
    throw std::invalid_argument("grassmann_dof_retract: operator must be nxn");
  }
  const Matrix a_meas = 0.5 * skew_of(subspace_matrix(state, o.mat()));  // A' = XᵀOX
  const Matrix q_sys = expm_skew(o);
  const Matrix q_anc =
      pad_ancilla(expm_skew(SkewMatrix(a_meas), -1.0), state.p(), state.anc_dim(), true);
  Matrix m = q_sys * state.branches() * q_anc;
  Vector amps = Eigen::Map<const Vector>(m.data(), m.size());
  amps /= amps.norm();
  return {state.n(), state.p(), std::move(amps)};
}

SampleEstimate sample_expectation(const EntangledState& state, const PauliSum& obs,
                                  long long shots, std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("sample_expectation: shots must be >= 1");
  const int total_q = state.system_qubits() + state.ancilla_qubits();
  if (obs.qubits() != total_q) {
    throw std::invalid_argument("sample_expectation: observable must act on " +
                                std::to_string(total_q) + " qubits");
  }
  std::mt19937_64 rng(seed);
  double estimate = 0.0;
  double variance = 0.0;
  for (const auto& term : obs.terms()) {
    if (std::abs(term.coeff.imag()) > 1e-12) {
      throw std::invalid_argument("sample_expectation: observable must be Hermitian");
    }
    const double c = term.coeff.real();
    if (term.x_mask == 0 && term.z_mask == 0) {
      estimate += c;  // identity: no measurement noise
      continue;
    }
    const double mean = pauli_expectation(term, state.amplitudes());
    const double p_plus = std::clamp(0.5 * (1.0 + mean), 0.0, 1.0);
    std::binomial_distribution<long long> binom(shots, p_plus);
    const long long plus = binom(rng);
    const double sampled = 2.0 * static_cast<double>(plus) / static_cast<double>(shots) - 1.0;
    estimate += c * sampled;
    variance += c * c * (1.0 - mean * mean) / static_cast<double>(shots);
  }
  return {estimate, std::sqrt(variance)};
}

}  // namespace qmanopt
