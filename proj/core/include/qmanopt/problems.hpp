#pragma once

#include <cstdint>
#include <vector>

#include "qmanopt/manifold.hpp"

namespace qmanopt {

/// Subspace problem f(X) = ½ Tr XᵀHX on Gr(n,p).
class GrassmannProblem {
 public:
  explicit GrassmannProblem(SymmetricMatrix h) : h_(std::move(h)) {}
  const SymmetricMatrix& hamiltonian() const { return h_; }
  Index dim() const { return h_.dim(); }

 private:
  SymmetricMatrix h_;
};

/// Ordered eigenvector problem f(X) = ½ Tr XᵀHXK on St(n,p) with diagonal K.
/// The primary constructor requires pairwise-distinct diagonals; the signed
/// ±1 variant used by iterative block diagonalization goes through
/// `with_degenerate_k`.
class StiefelProblem {
 public:
  StiefelProblem(SymmetricMatrix h, Vector k_diag);
  static StiefelProblem with_degenerate_k(SymmetricMatrix h, Vector k_diag);

  /// Default weights (p, p−1, …, 1).
  static Vector default_k(Index p);

  const SymmetricMatrix& hamiltonian() const { return h_; }
  const Vector& k_diag() const { return k_; }
  Matrix k_matrix() const { return Matrix(k_.asDiagonal()); }
  Index dim() const { return h_.dim(); }
  Index p() const { return k_.size(); }

 private:
  StiefelProblem(SymmetricMatrix h, Vector k_diag, bool require_distinct);
  SymmetricMatrix h_;
  Vector k_;
};

constexpr ManifoldKind kind_of(const GrassmannProblem&) { return ManifoldKind::Grassmann; }
constexpr ManifoldKind kind_of(const StiefelProblem&) { return ManifoldKind::Stiefel; }

double cost(const GrassmannProblem& prob, const StiefelPoint& x);
double cost(const StiefelProblem& prob, const StiefelPoint& x);

/// Riemannian gradients in action form:
///   Grassmann: L = [H, XXᵀ], A = 0
///   Stiefel:   L = [H, XKXᵀ], A = ½[XᵀHX, K]
TangentAction gradient(const GrassmannProblem& prob, const StiefelPoint& x);
TangentAction gradient(const StiefelProblem& prob, const StiefelPoint& x);

/// Riemannian Hessian-vector products in action form. The Grassmann form is
/// L = [[H, L_V], XXᵀ]; the Stiefel form assembles the projected differential
/// P_X(H V K − V sy(XᵀHXK)) as operator products of L_V, A_V with H, XKXᵀ,
/// the Grassmann gradient G and the subspace energy E.
TangentAction hess_vec(const GrassmannProblem& prob, const StiefelPoint& x,
                       const TangentAction& v);
TangentAction hess_vec(const StiefelProblem& prob, const StiefelPoint& x,
                       const TangentAction& v);

/// Log-log slope of the retraction-based Taylor remainder over
/// t ∈ {1e-1, 1e-2, 1e-3, 1e-4}: ≈2 for a correct gradient, ≈3 for a correct
/// gradient+Hessian pair. Degenerate draws are resampled (up to 5 tries).
double fd_check_gradient(const GrassmannProblem& prob, const StiefelPoint& x, std::uint64_t seed);
double fd_check_gradient(const StiefelProblem& prob, const StiefelPoint& x, std::uint64_t seed);
double fd_check_hessian(const GrassmannProblem& prob, const StiefelPoint& x, std::uint64_t seed);
double fd_check_hessian(const StiefelProblem& prob, const StiefelPoint& x, std::uint64_t seed);

namespace detail {

/// Shared slope machinery, also used by tests to probe deliberately broken
/// derivatives. `use_hessian` switches between the first- and second-order
/// Taylor models.
template <class CostFn, class GradFn, class HessFn>
double fd_model_slope(CostFn&& cost_fn, GradFn&& grad_fn, HessFn&& hess_fn,
                      const StiefelPoint& x, ManifoldKind kind, std::uint64_t seed,
                      bool use_hessian);

std::vector<double> fd_grid();
double fit_loglog_slope(const std::vector<double>& ts, const std::vector<double>& errs);

}  // namespace detail

}  // namespace qmanopt

#include "qmanopt/problems_fd.ipp"
