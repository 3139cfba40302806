#include "qmanopt/manifold.hpp"

#include <cmath>
#include <string>

namespace qmanopt {

namespace {

void require_shape(const StiefelPoint& x, const Matrix& v, const char* who) {
  if (v.rows() != x.n() || v.cols() != x.p()) {
    throw std::invalid_argument(std::string(who) + ": expected " + std::to_string(x.n()) + "x" +
                                std::to_string(x.p()) + ", got " + std::to_string(v.rows()) +
                                "x" + std::to_string(v.cols()));
  }
}

void require_operator(const StiefelPoint& x, const Matrix& b, const char* who) {
  if (b.rows() != x.n() || b.cols() != x.n()) {
    throw std::invalid_argument(std::string(who) + ": operator must be " + std::to_string(x.n()) +
                                "x" + std::to_string(x.n()));
  }
}

void reject_trivial_grassmann(const StiefelPoint& x, ManifoldKind kind, const char* who) {
  if (kind == ManifoldKind::Grassmann && x.p() == x.n()) {
    throw std::invalid_argument(std::string(who) + ": Gr(n,n) is trivial; use p < n");
  }
}

// M − Mᵀ is exactly skew regardless of rounding in M.
Matrix skew_of(const Matrix& m) { return m - m.transpose(); }
Matrix sym_of(const Matrix& m) { return m + m.transpose(); }

}  // namespace

StiefelPoint::StiefelPoint(Matrix x, double tol) {
  if (x.rows() < x.cols() || x.cols() < 1) {
    throw std::invalid_argument("StiefelPoint: need n >= p >= 1, got " + std::to_string(x.rows()) +
                                "x" + std::to_string(x.cols()));
  }
  if (!x.allFinite()) throw std::invalid_argument("StiefelPoint: non-finite entries");
  Matrix gram = x.transpose() * x - Matrix::Identity(x.cols(), x.cols());
  Index wi = 0, wj = 0;
  const double worst = gram.cwiseAbs().maxCoeff(&wi, &wj);
  if (worst > tol) {
    throw ConstraintError("StiefelPoint: columns not orthonormal, |XᵀX - I|(" +
                          std::to_string(wi) + "," + std::to_string(wj) + ") = " +
                          std::to_string(worst) + " > " + std::to_string(tol));
  }
  x_ = std::move(x);
}

TangentAction TangentAction::zero(Index n, Index p) {
  return {SkewMatrix::zero(n), SkewMatrix::zero(p)};
}

Matrix TangentAction::dense(const StiefelPoint& x) const {
  if (left.dim() != x.n() || right.dim() != x.p()) {
    throw std::invalid_argument("TangentAction::dense: action not anchored at this point");
  }
  return left.mat() * x.mat() - x.mat() * right.mat();
}

TangentAction TangentAction::operator+(const TangentAction& o) const {
  return {SkewMatrix(left.mat() + o.left.mat()), SkewMatrix(right.mat() + o.right.mat())};
}

TangentAction TangentAction::operator-(const TangentAction& o) const {
  return {SkewMatrix(left.mat() - o.left.mat()), SkewMatrix(right.mat() - o.right.mat())};
}

TangentAction TangentAction::operator*(double s) const {
  return {SkewMatrix(s * left.mat()), SkewMatrix(s * right.mat())};
}

Matrix project_tangent(const StiefelPoint& x, const Matrix& v, ManifoldKind kind) {
  require_shape(x, v, "project_tangent");
  reject_trivial_grassmann(x, kind, "project_tangent");
  const Matrix xtv = x.mat().transpose() * v;
  if (kind == ManifoldKind::Grassmann) return v - x.mat() * xtv;
  return v - x.mat() * (0.5 * sym_of(xtv));
}

bool is_tangent(const StiefelPoint& x, const Matrix& z, ManifoldKind kind, double tol) {
  require_shape(x, z, "is_tangent");
  const Matrix xtz = x.mat().transpose() * z;
  if (kind == ManifoldKind::Grassmann) return xtz.cwiseAbs().maxCoeff() <= tol;
  return (0.5 * sym_of(xtz)).cwiseAbs().maxCoeff() <= tol;
}

SkewMatrix left_action(const StiefelPoint& x, const Matrix& z, double alpha) {
  require_shape(x, z, "left_action");
  if (alpha < 0.0 || alpha > 1.0) {
    throw std::invalid_argument("left_action: alpha must be in [0,1], got " +
                                std::to_string(alpha));
  }
  Matrix l = skew_of(z * x.mat().transpose());
  if (alpha != 0.0) {
    const Matrix a = 0.5 * skew_of(x.mat().transpose() * z);
    // X·a·Xᵀ is skew for skew a; skew_of doubles it, so halve the prefactor.
    l -= alpha * skew_of(x.mat() * (a * x.mat().transpose()));
  }
  return SkewMatrix(std::move(l));
}

SkewMatrix right_action(const StiefelPoint& x, const Matrix& z) {
  require_shape(x, z, "right_action");
  return SkewMatrix(0.5 * skew_of(x.mat().transpose() * z));
}

TangentAction tangent_action(const StiefelPoint& x, const Matrix& z, ManifoldKind kind) {
  reject_trivial_grassmann(x, kind, "tangent_action");
  if (kind == ManifoldKind::Grassmann) {
    return {left_action(x, z), SkewMatrix::zero(x.p())};
  }
  return {left_action(x, z), right_action(x, z)};
}

TangentAction action_from_operator(const StiefelPoint& x, const Matrix& b, ManifoldKind kind) {
  return action_from_operator(x, b, Matrix::Identity(x.p(), x.p()), kind);
}

TangentAction action_from_operator(const StiefelPoint& x, const Matrix& b, const Matrix& k,
                                   ManifoldKind kind) {
  require_operator(x, b, "action_from_operator");
  if (k.rows() != x.p() || k.cols() != x.p()) {
    throw std::invalid_argument("action_from_operator: K must be pxp");
  }
  reject_trivial_grassmann(x, kind, "action_from_operator");

  const Matrix bsy = 0.5 * sym_of(b);
  const Matrix bsk = 0.5 * skew_of(b);
  const Matrix xkx = 0.5 * sym_of(x.mat() * (0.5 * sym_of(k)) * x.mat().transpose());

  // L_X(BXK) = [sy B, XKXᵀ] + {sk B, XKXᵀ}; both pieces reduce to M − Mᵀ.
  Matrix l = skew_of(bsy * xkx) + skew_of(bsk * xkx);

  if (kind == ManifoldKind::Grassmann) {
    // Grassmann projection removes the 𝒳 B XKXᵀ coupling.
    const Matrix mixed = x.mat() * (x.mat().transpose() * (b * xkx));
    l -= skew_of(mixed);
    return {SkewMatrix(std::move(l)), SkewMatrix::zero(x.p())};
  }
  const Matrix xbxk = (x.mat().transpose() * b * x.mat()) * (0.5 * sym_of(k));
  return {SkewMatrix(std::move(l)), SkewMatrix(0.5 * skew_of(xbxk))};
}

SkewMatrix j_action(const StiefelPoint& x, const Matrix& b) {
  require_operator(x, b, "j_action");
  const Matrix perp_b = b - x.mat() * (x.mat().transpose() * b);
  return SkewMatrix(skew_of(perp_b));
}

double inner(const TangentAction& u, const TangentAction& v) {
  if (u.n() != v.n() || u.p() != v.p()) {
    throw std::invalid_argument("inner: action dimensions differ");
  }
  return 0.5 * trace_inner(u.left.mat(), v.left.mat()) -
         trace_inner(u.right.mat(), v.right.mat());
}

double action_norm(const TangentAction& u) { return std::sqrt(inner(u, u)); }

StiefelPoint retract(const StiefelPoint& x, const TangentAction& v, double t, double alpha) {
  if (v.n() != x.n() || v.p() != x.p()) {
    throw std::invalid_argument("retract: action not anchored at this point");
  }
  if (alpha < 0.0 || alpha > 1.0) {
    throw std::invalid_argument("retract: alpha must be in [0,1]");
  }
  Matrix l = v.left.mat();
  if (alpha != 0.0) {
    l -= alpha * skew_of(x.mat() * (v.right.mat() * x.mat().transpose()));
  }
  const Matrix ql = expm_skew(SkewMatrix(std::move(l)), t);
  const Matrix qr = expm_skew(v.right, (2.0 * alpha - 1.0) * t);
  Matrix y = ql * x.mat() * qr;
  const double dev =
      (y.transpose() * y - Matrix::Identity(x.p(), x.p())).cwiseAbs().maxCoeff();
  if (dev > 1e-10) {
    throw NumericalError("retract: result off the manifold by " + std::to_string(dev));
  }
  return StiefelPoint(std::move(y));
}

TangentAction transport_action(const TangentAction& step, const TangentAction& eta,
                               TransportOrder order) {
  if (step.n() != eta.n() || step.p() != eta.p()) {
    throw std::invalid_argument("transport_action: dimension mismatch");
  }
  switch (order) {
    case TransportOrder::Identity:
      return eta;
    case TransportOrder::Bch1: {
      Matrix l = eta.left.mat() + skew_of(step.left.mat() * eta.left.mat());
      Matrix a = eta.right.mat() + skew_of(step.right.mat() * eta.right.mat());
      return {SkewMatrix(std::move(l)), SkewMatrix(std::move(a))};
    }
    case TransportOrder::Bch2: {
      const Matrix cl = skew_of(step.left.mat() * eta.left.mat());
      const Matrix ca = skew_of(step.right.mat() * eta.right.mat());
      Matrix l = eta.left.mat() + cl + 0.5 * skew_of(step.left.mat() * cl);
      Matrix a = eta.right.mat() + ca + 0.5 * skew_of(step.right.mat() * ca);
      return {SkewMatrix(std::move(l)), SkewMatrix(std::move(a))};
    }
    case TransportOrder::Exact: {
      const Matrix ql = expm_skew(step.left);
      const Matrix qr = expm_skew(step.right);
      Matrix l = ql * eta.left.mat() * ql.transpose();
      Matrix a = qr * eta.right.mat() * qr.transpose();
      return {SkewMatrix(0.5 * skew_of(l)), SkewMatrix(0.5 * skew_of(a))};
    }
  }
  throw std::invalid_argument("transport_action: unknown order");
}

StiefelPoint random_point(Index n, Index p, std::mt19937_64& rng) {
  Matrix g = gaussian_matrix(n, p, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, p);
  // fix column signs for a deterministic representative
  for (Index j = 0; j < p; ++j) {
    if (qr.matrixQR()(j, j) < 0) q.col(j) *= -1.0;
  }
  return StiefelPoint(std::move(q));
}

Matrix random_tangent(const StiefelPoint& x, ManifoldKind kind, std::mt19937_64& rng) {
  Matrix v = project_tangent(x, gaussian_matrix(x.n(), x.p(), rng), kind);
  const double nrm = v.norm();
  if (nrm > 1e-12) v /= nrm;
  return v;
}

TangentAction random_action(const StiefelPoint& x, ManifoldKind kind, std::mt19937_64& rng) {
  return tangent_action(x, random_tangent(x, kind, rng), kind);
}

}  // namespace qmanopt
