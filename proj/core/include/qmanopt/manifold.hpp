#pragma once

#include <random>

#include "qmanopt/linalg.hpp"

namespace qmanopt {

enum class ManifoldKind { Stiefel, Grassmann };

/// Point on St(n,p): an n×p matrix with orthonormal columns. Construction
/// validates ‖XᵀX − I‖_max against `tol` and reports the worst entry.
class StiefelPoint {
 public:
  static constexpr double kDefaultTol = 1e-10;
  explicit StiefelPoint(Matrix x, double tol = kDefaultTol);

  const Matrix& mat() const { return x_; }
  Index n() const { return x_.rows(); }
  Index p() const { return x_.cols(); }

 private:
  Matrix x_;
};

/// Tangent vector represented by its left/right Lie algebra actions:
/// Z = L·X − X·A with L ∈ sk(n), A ∈ sk(p). Grassmannian tangents carry
/// A = 0 exactly. The pairs form a vector space, which the optimizers use.
struct TangentAction {
  SkewMatrix left;
  SkewMatrix right;

  static TangentAction zero(Index n, Index p);
  Index n() const { return left.dim(); }
  Index p() const { return right.dim(); }

  /// Reconstruct the dense tangent L·X − X·A at its anchor point.
  Matrix dense(const StiefelPoint& x) const;

  TangentAction operator+(const TangentAction& o) const;
  TangentAction operator-(const TangentAction& o) const;
  TangentAction operator*(double s) const;
  TangentAction operator-() const { return *this * -1.0; }
};

inline TangentAction operator*(double s, const TangentAction& a) { return a * s; }

/// Tangent projections: P^St_X(V) = V − X·sy(XᵀV), P^Gr_X(V) = V − XXᵀV.
Matrix project_tangent(const StiefelPoint& x, const Matrix& v, ManifoldKind kind);

/// Dense-tangent membership: sy(XᵀZ) vanishes on St, XᵀZ vanishes on Gr.
bool is_tangent(const StiefelPoint& x, const Matrix& z, ManifoldKind kind, double tol = 1e-10);

/// Left action of a dense tangent, L_X(Z) = ZXᵀ − XZᵀ at alpha = 0; the
/// alpha family subtracts 2·alpha·X sk(XᵀZ) Xᵀ. alpha must lie in [0,1].
SkewMatrix left_action(const StiefelPoint& x, const Matrix& z, double alpha = 0.0);

/// Right action A_X(Z) = XᵀZ (skew for Stiefel tangents, zero on Grassmann).
SkewMatrix right_action(const StiefelPoint& x, const Matrix& z);

/// Action pair of a dense tangent at x.
TangentAction tangent_action(const StiefelPoint& x, const Matrix& z, ManifoldKind kind);

/// Action pair of the tangent projection P_X(B·X·K) built from operator-level
/// products of B with XKXᵀ, without forming the dense projected vector:
///   Stiefel:    L = [sy B, XKXᵀ] + {sk B, XKXᵀ},  A = sk(XᵀBXK)
///   Grassmann:  L as above minus (𝒳 B XKXᵀ − transpose), A = 0
TangentAction action_from_operator(const StiefelPoint& x, const Matrix& b, ManifoldKind kind);
TangentAction action_from_operator(const StiefelPoint& x, const Matrix& b, const Matrix& k,
                                   ManifoldKind kind);

/// J_X(B) = 𝒳_⊥ B − Bᵀ 𝒳_⊥ with 𝒳_⊥ = I − XXᵀ; factorizes Grassmann
/// tangents as Z = J_X(ZXᵀ)·X.
SkewMatrix j_action(const StiefelPoint& x, const Matrix& b);

/// Metric on action pairs: ⟨u,v⟩ = ½ Tr(L_uᵀL_v) − Tr(A_uᵀA_v), which equals
/// the trace product of the reconstructed dense tangents.
double inner(const TangentAction& u, const TangentAction& v);
double action_norm(const TangentAction& u);

/// Exponential retraction R^α_X(t·v) = e^{t·L^α} X e^{(2α−1)·t·A}; second
/// order for every alpha. Throws NumericalError if the result leaves the
/// manifold beyond 1e-10.
StiefelPoint retract(const StiefelPoint& x, const TangentAction& v, double t = 1.0,
                     double alpha = 0.0);

enum class TransportOrder { Identity = 0, Bch1 = 1, Bch2 = 2, Exact = 3 };

/// Transport the actions of eta along the retraction generated by step:
/// exact mode conjugates L and A by the step exponentials, the BCH orders
/// truncate the series L' = L_η + [L_s, L_η] + ½[L_s,[L_s,L_η]] + …
TangentAction transport_action(const TangentAction& step, const TangentAction& eta,
                               TransportOrder order);

/// Random draws used by the derivative checks and tests.
StiefelPoint random_point(Index n, Index p, std::mt19937_64& rng);
Matrix random_tangent(const StiefelPoint& x, ManifoldKind kind, std::mt19937_64& rng);
TangentAction random_action(const StiefelPoint& x, ManifoldKind kind, std::mt19937_64& rng);

}  // namespace qmanopt
