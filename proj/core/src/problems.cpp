#include "qmanopt/problems.hpp"

#include <cmath>
#include <string>

namespace qmanopt {

namespace {

Matrix skew_of(const Matrix& m) { return m - m.transpose(); }
Matrix sym_of(const Matrix& m) { return m + m.transpose(); }

void require_anchor(const StiefelPoint& x, const TangentAction& v, const char* who) {
  if (v.n() != x.n() || v.p() != x.p()) {
    throw std::invalid_argument(std::string(who) + ": action not anchored at this point");
  }
}

void require_dims(Index h_dim, const StiefelPoint& x, const char* who) {
  if (x.n() != h_dim) {
    throw std::invalid_argument(std::string(who) + ": Hamiltonian dim " + std::to_string(h_dim) +
                                " vs point dim " + std::to_string(x.n()));
  }
}

}  // namespace

StiefelProblem::StiefelProblem(SymmetricMatrix h, Vector k_diag)
    : StiefelProblem(std::move(h), std::move(k_diag), true) {}

StiefelProblem StiefelProblem::with_degenerate_k(SymmetricMatrix h, Vector k_diag) {
  return StiefelProblem(std::move(h), std::move(k_diag), false);
}

StiefelProblem::StiefelProblem(SymmetricMatrix h, Vector k_diag, bool require_distinct)
    : h_(std::move(h)), k_(std::move(k_diag)) {
  if (k_.size() < 1 || k_.size() > h_.dim()) {
    throw std::invalid_argument("StiefelProblem: need 1 <= p <= n");
  }
  if (require_distinct) {
    for (Index i = 0; i < k_.size(); ++i) {
      for (Index j = i + 1; j < k_.size(); ++j) {
        if (k_(i) == k_(j)) {
          throw std::invalid_argument("StiefelProblem: K diagonal entries must be distinct (" +
                                      std::to_string(i) + " and " + std::to_string(j) + ")");
        }
      }
    }
  }
}

Vector StiefelProblem::default_k(Index p) {
  Vector k(p);
  for (Index i = 0; i < p; ++i) k(i) = static_cast<double>(p - i);
  return k;
}

double cost(const GrassmannProblem& prob, const StiefelPoint& x) {
  require_dims(prob.dim(), x, "cost");
  return 0.5 * (x.mat().transpose() * prob.hamiltonian().mat() * x.mat()).trace();
}

double cost(const StiefelProblem& prob, const StiefelPoint& x) {
  require_dims(prob.dim(), x, "cost");
  if (x.p() != prob.p()) throw std::invalid_argument("cost: K size differs from frame width");
  const Matrix e = x.mat().transpose() * prob.hamiltonian().mat() * x.mat();
  return 0.5 * e.diagonal().dot(prob.k_diag());
}

TangentAction gradient(const GrassmannProblem& prob, const StiefelPoint& x) {
  require_dims(prob.dim(), x, "gradient");
  const Matrix proj = x.mat() * x.mat().transpose();
  return {SkewMatrix(skew_of(prob.hamiltonian().mat() * proj)), SkewMatrix::zero(x.p())};
}

TangentAction gradient(const StiefelProblem& prob, const StiefelPoint& x) {
  require_dims(prob.dim(), x, "gradient");
  if (x.p() != prob.p()) throw std::invalid_argument("gradient: K size differs from frame width");
  const Matrix& h = prob.hamiltonian().mat();
  const Matrix xk = x.mat() * prob.k_diag().asDiagonal() * x.mat().transpose();
  const Matrix e = x.mat().transpose() * h * x.mat();
  return {SkewMatrix(skew_of(h * (0.5 * sym_of(xk)))),
          SkewMatrix(0.5 * skew_of(e * prob.k_diag().asDiagonal()))};
}

TangentAction hess_vec(const GrassmannProblem& prob, const StiefelPoint& x,
                       const TangentAction& v) {
  require_dims(prob.dim(), x, "hess_vec");
  require_anchor(x, v, "hess_vec");
  const Matrix& h = prob.hamiltonian().mat();
  const Matrix proj = 0.5 * sym_of(x.mat() * x.mat().transpose());
  const Matrix hl_sym = sym_of(h * v.left.mat());  // [H, L] is symmetric
  return {SkewMatrix(skew_of(hl_sym * proj)), SkewMatrix::zero(x.p())};
}

// Projected differential P_X(HVK − V·sy(XᵀHXK)) assembled on the action pair
// (L_V, A_V):
//   L = [[H,L_V],𝒳_K] + ½[L_V,G_K] − ½{L_V,[𝒳_K,G]}
//       − (HX A_V K Xᵀ + XK A_V XᵀH) + ½ X{A_V,{E,K}}Xᵀ
//   A = sk(XᵀH L_V X K) − ½(E A_V K + K A_V E) − ¼{A_V,{E,K}}
// with 𝒳_K = XKXᵀ, G = [H,XXᵀ], G_K = [H,𝒳_K], E = XᵀHX.
TangentAction hess_vec(const StiefelProblem& prob, const StiefelPoint& x,
                       const TangentAction& v) {
  require_dims(prob.dim(), x, "hess_vec");
  require_anchor(x, v, "hess_vec");
  const Matrix& h = prob.hamiltonian().mat();
  const Matrix& xm = x.mat();
  const auto kd = prob.k_diag().asDiagonal();
  const Matrix& lv = v.left.mat();
  const Matrix& av = v.right.mat();

  const Matrix proj = 0.5 * sym_of(xm * xm.transpose());
  const Matrix xkx = 0.5 * sym_of(xm * kd * xm.transpose());
  const Matrix e = 0.5 * sym_of(xm.transpose() * h * xm);
  const Matrix g = skew_of(h * proj);
  const Matrix gk = skew_of(h * xkx);
  const Matrix ek_anti = sym_of(e * kd);  // {E,K}

  const Matrix hl_sym = sym_of(h * lv);
  Matrix l = skew_of(hl_sym * xkx);                 // [[H,L_V], 𝒳_K]
  l += 0.5 * skew_of(lv * gk);                      // ½[L_V, G_K]
  const Matrix xk_g = sym_of(xkx * g);              // [𝒳_K, G], a symmetric matrix
  l -= 0.5 * skew_of(lv * xk_g);                    // −½{L_V,[𝒳_K,G]}
  l -= skew_of(h * (xm * (av * (kd * xm.transpose()))));  // −(HXA_VKXᵀ + XKA_VXᵀH)
  const Matrix av_ek = skew_of(av * ek_anti);       // {A_V, {E,K}}
  l += 0.5 * skew_of(xm * (0.5 * av_ek) * xm.transpose());

  const Matrix m = xm.transpose() * (h * (lv * xm));  // XᵀH L_V X
  Matrix a = 0.5 * skew_of(m * kd);                   // sk(M K)
  a -= 0.5 * skew_of(e * (av * kd));                  // −½(EA_VK + KA_VE)
  a -= 0.25 * av_ek;                                  // −¼{A_V,{E,K}}

  return {SkewMatrix(std::move(l)), SkewMatrix(std::move(a))};
}

namespace detail {

std::vector<double> fd_grid() { return {1e-1, 1e-2, 1e-3, 1e-4}; }

double fit_loglog_slope(const std::vector<double>& ts, const std::vector<double>& errs) {
  const std::size_t n = ts.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log10(ts[i]);
    const double ly = std::log10(errs[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  return (n * sxy - sx * sy) / denom;
}

}  // namespace detail

namespace {

template <class Problem>
double fd_gradient_impl(const Problem& prob, const StiefelPoint& x, std::uint64_t seed) {
  return detail::fd_model_slope(
      [&](const StiefelPoint& p) { return cost(prob, p); },
      [&](const StiefelPoint& p) { return gradient(prob, p); },
      [&](const StiefelPoint& p, const TangentAction& v) { return hess_vec(prob, p, v); }, x,
      kind_of(prob), seed, false);
}

template <class Problem>
double fd_hessian_impl(const Problem& prob, const StiefelPoint& x, std::uint64_t seed) {
  return detail::fd_model_slope(
      [&](const StiefelPoint& p) { return cost(prob, p); },
      [&](const StiefelPoint& p) { return gradient(prob, p); },
      [&](const StiefelPoint& p, const TangentAction& v) { return hess_vec(prob, p, v); }, x,
      kind_of(prob), seed, true);
}

}  // namespace

double fd_check_gradient(const GrassmannProblem& prob, const StiefelPoint& x,
                         std::uint64_t seed) {
  return fd_gradient_impl(prob, x, seed);
}
double fd_check_gradient(const StiefelProblem& prob, const StiefelPoint& x, std::uint64_t seed) {
  return fd_gradient_impl(prob, x, seed);
}
double fd_check_hessian(const GrassmannProblem& prob, const StiefelPoint& x, std::uint64_t seed) {
  return fd_hessian_impl(prob, x, seed);
}
double fd_check_hessian(const StiefelProblem& prob, const StiefelPoint& x, std::uint64_t seed) {
  return fd_hessian_impl(prob, x, seed);
}

}  // namespace qmanopt
