#pragma once

#include <optional>

#include "qmanopt/optim.hpp"
#include "qmanopt/problems.hpp"
#include "qmanopt/statevector.hpp"

namespace qmanopt {

// The optimizers are generic over a Model with:
//   Point / Tangent typedefs,
//   cost, gradient, hess_vec, retract, inner, transport,
//   frame(Point) -> StiefelPoint,
//   restart_period_hint, exact_step (nullopt for a real line search).
// ClassicalModel evaluates the problem formulas on the frame directly;
// StatevectorModel carries the entangled state and assembles the same
// action-form quantities from measured operators (XXᵀ, XKXᵀ, XᵀBX).

template <class Problem>
class ClassicalModel {
 public:
  using Point = StiefelPoint;
  using Tangent = TangentAction;

  explicit ClassicalModel(Problem problem, double alpha = 0.0,
                          TransportOrder transport = TransportOrder::Identity)
      : problem_(std::move(problem)), alpha_(alpha), transport_(transport) {}

  const Problem& problem() const { return problem_; }

  double cost(const Point& x) const { return qmanopt::cost(problem_, x); }
  Tangent gradient(const Point& x) const { return qmanopt::gradient(problem_, x); }
  Tangent hess_vec(const Point& x, const Tangent& v) const {
    return qmanopt::hess_vec(problem_, x, v);
  }
  Point retract(const Point& x, const Tangent& v, double t) const {
    return qmanopt::retract(x, v, t, alpha_);
  }
  double inner(const Point&, const Tangent& u, const Tangent& v) const {
    return qmanopt::inner(u, v);
  }
  Tangent transport(const Point&, const Tangent& step, const Point&, const Tangent& v) const {
    return transport_action(step, v, transport_);
  }
  StiefelPoint frame(const Point& x) const { return x; }
  Index restart_period_hint(const Point& x) const { return x.n() * x.p(); }
  std::optional<double> exact_step(const Point&, const Tangent&) const { return std::nullopt; }

 private:
  Problem problem_;
  double alpha_;
  TransportOrder transport_;
};

struct StatevectorOptions {
  int trotter_steps = 0;  // 0 = exact Kronecker exponentials
  double alpha = 0.0;
  TransportOrder transport = TransportOrder::Identity;
};

template <class Problem>
class StatevectorModel {
 public:
  using Point = EntangledState;
  using Tangent = TangentAction;

  explicit StatevectorModel(Problem problem, StatevectorOptions opts = {})
      : problem_(std::move(problem)), opts_(opts) {}

  const Problem& problem() const { return problem_; }

  Point start(const StiefelPoint& x0) const { return prepare_state(x0); }

  double cost(const Point& state) const {
    const double raw = measured_cost(state);
    return 0.5 * static_cast<double>(state.p()) * raw;
  }

  Tangent gradient(const Point& state) const { return measured_gradient(state); }

  Tangent hess_vec(const Point& state, const Tangent& v) const {
    return measured_hess_vec(state, v);
  }

  Point retract(const Point& state, const Tangent& v, double t) const {
    if (opts_.trotter_steps > 0) {
      return apply_retraction_trotter(state, v, t, opts_.trotter_steps);
    }
    return apply_retraction_exact(state, v, t, opts_.alpha);
  }

  double inner(const Point&, const Tangent& u, const Tangent& v) const {
    return qmanopt::inner(u, v);
  }
  Tangent transport(const Point&, const Tangent& step, const Point&, const Tangent& v) const {
    return transport_action(step, v, opts_.transport);
  }
  StiefelPoint frame(const Point& state) const { return state_to_frame(state); }
  Index restart_period_hint(const Point& state) const { return state.n() * state.p(); }
  std::optional<double> exact_step(const Point&, const Tangent&) const { return std::nullopt; }

 private:
  double measured_cost(const EntangledState& state) const;
  Tangent measured_gradient(const EntangledState& state) const;
  Tangent measured_hess_vec(const EntangledState& state, const Tangent& v) const;

  Problem problem_;
  StatevectorOptions opts_;
};

// --- Grassmann measurements: f = (p/2)·⟨I⊗H⟩, L = [H, XXᵀ] ---

template <>
inline double StatevectorModel<GrassmannProblem>::measured_cost(
    const EntangledState& state) const {
  return expectation(state, problem_.hamiltonian().mat());
}

template <>
inline TangentAction StatevectorModel<GrassmannProblem>::measured_gradient(
    const EntangledState& state) const {
  const Matrix& h = problem_.hamiltonian().mat();
  const Matrix proj = system_density(state);
  Matrix l = h * proj;
  l -= l.transpose().eval();
  return {SkewMatrix(std::move(l)), SkewMatrix::zero(state.p())};
}

template <>
inline TangentAction StatevectorModel<GrassmannProblem>::measured_hess_vec(
    const EntangledState& state, const TangentAction& v) const {
  const Matrix& h = problem_.hamiltonian().mat();
  const Matrix proj = system_density(state);
  Matrix c = h * v.left.mat();
  c += c.transpose().eval();  // [H, L_V] is symmetric
  Matrix l = c * proj;
  l -= l.transpose().eval();
  return {SkewMatrix(std::move(l)), SkewMatrix::zero(state.p())};
}

// --- Stiefel measurements: f = (p/2)·⟨K⊗H⟩, L = [H, XKXᵀ], A = ½[E,K] ---

template <>
inline double StatevectorModel<StiefelProblem>::measured_cost(const EntangledState& state) const {
  return expectation(state, problem_.k_matrix(), problem_.hamiltonian().mat());
}

template <>
inline TangentAction StatevectorModel<StiefelProblem>::measured_gradient(
    const EntangledState& state) const {
  const Matrix& h = problem_.hamiltonian().mat();
  const Matrix xkx = system_density(state, problem_.k_matrix());
  const Matrix e = subspace_matrix(state, h);
  Matrix l = h * xkx;
  l -= l.transpose().eval();
  Matrix a = e * problem_.k_diag().asDiagonal();
  a = 0.5 * (a - a.transpose()).eval();
  return {SkewMatrix(std::move(l)), SkewMatrix(std::move(a))};
}

template <>
inline TangentAction StatevectorModel<StiefelProblem>::measured_hess_vec(
    const EntangledState& state, const TangentAction& v) const {
  const Matrix& h = problem_.hamiltonian().mat();
  const auto kd = problem_.k_diag().asDiagonal();
  const Matrix& lv = v.left.mat();
  const Matrix& av = v.right.mat();

  auto skew_of = [](const Matrix& m) -> Matrix { return m - m.transpose(); };
  auto sym_of = [](const Matrix& m) -> Matrix { return m + m.transpose(); };

  const Matrix proj = 0.5 * sym_of(system_density(state));
  const Matrix xkx = 0.5 * sym_of(system_density(state, problem_.k_matrix()));
  const Matrix e = 0.5 * sym_of(subspace_matrix(state, h));
  const Matrix g = skew_of(h * proj);
  const Matrix gk = skew_of(h * xkx);
  const Matrix ek_anti = sym_of(e * kd);

  const Matrix hl_sym = sym_of(h * lv);
  Matrix l = skew_of(hl_sym * xkx);
  l += 0.5 * skew_of(lv * gk);
  const Matrix xk_g = sym_of(xkx * g);
  l -= 0.5 * skew_of(lv * xk_g);
  const Matrix xavkx = system_density(state, Matrix(av * kd));  // X A_V K Xᵀ
  l -= skew_of(h * xavkx);
  const Matrix av_ek = skew_of(av * ek_anti);
  l += system_density(state, Matrix(0.5 * av_ek));  // ½ X{A_V,{E,K}}Xᵀ

  const Matrix m = subspace_matrix(state, Matrix(h * lv));  // XᵀH L_V X
  Matrix a = 0.5 * skew_of(m * kd);
  a -= 0.5 * skew_of(e * (av * kd));
  a -= 0.25 * av_ek;

  l = 0.5 * skew_of(l);
  a = 0.5 * skew_of(a);
  return {SkewMatrix(std::move(l)), SkewMatrix(std::move(a))};
}

}  // namespace qmanopt
