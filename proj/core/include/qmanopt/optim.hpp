#pragma once

#include <chrono>
#include <cmath>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "qmanopt/errors.hpp"
#include "qmanopt/manifold.hpp"

namespace qmanopt {

struct TrustRegionConfig {
  double initial_radius = 0.25;
  double max_radius = 1.0;  // 4 × initial by default
  int max_inner_cg = 3;
  double grad_tol = 1e-3;
  int max_outer = 200;
  double accept_rho = 0.1;
  double expand_rho = 0.75;
  double shrink_factor = 0.25;
  double growth_factor = 2.0;
};

struct CGConfig {
  double grad_tol = 1e-6;
  int max_iter = 2000;
  double armijo_c1 = 1e-4;
  double backtrack_factor = 0.5;
  double initial_step = 1.0;
  int max_backtracks = 50;
  int restart_every = 0;  // 0 = every n·p iterations
};

struct IterationRecord {
  int iter = 0;
  double f = 0.0;
  double grad_norm = 0.0;
  double step_or_radius = 0.0;
  int inner_iters = 0;
  double wall_time = 0.0;
};

/// Accumulates the accepted retraction exponentials of a run, so the total
/// motion X_final = left · X_0 · right can conjugate operators afterwards
/// (the iterative block-diagonalization strategy needs this).
class RotationTracker {
 public:
  RotationTracker(Index n, Index p)
      : left_(Matrix::Identity(n, n)), right_(Matrix::Identity(p, p)) {}

  void absorb(const TangentAction& act, double t) {
    left_ = expm_skew(act.left, t) * left_;
    right_ = right_ * expm_skew(act.right, -t);
  }

  const Matrix& left() const { return left_; }
  const Matrix& right() const { return right_; }

 private:
  Matrix left_;
  Matrix right_;
};

/// RCG stall: more backtracking steps than the configured budget. Carries the
/// records collected so far so drivers can emit a partial report.
class StagnationError : public ConvergenceError {
 public:
  StagnationError(const std::string& what, std::vector<IterationRecord> records)
      : ConvergenceError(what), records_(std::move(records)) {}
  const std::vector<IterationRecord>& records() const { return records_; }

 private:
  std::vector<IterationRecord> records_;
};

template <class Point>
struct SolveResult {
  Point x;
  std::vector<IterationRecord> records;
  bool converged = false;
};

template <class Tangent>
struct TcgResult {
  Tangent step;
  int hess_applies = 0;
  double predicted_decrease = 0.0;
  bool hit_boundary = false;
  std::string stop_reason;
};

/// Steihaug–Toint truncated conjugate gradient on one tangent space. Stops on
/// residual reduction, trust-region boundary, negative curvature or the
/// Hessian-application budget; the returned step never leaves the region and
/// never increases the model.
template <class Tangent, class HessOp, class InnerFn>
TcgResult<Tangent> truncated_cg(const Tangent& grad, HessOp&& hess, double radius, int max_inner,
                                InnerFn&& inner_product) {
  if (!(radius > 0)) throw std::invalid_argument("truncated_cg: radius must be positive");
  if (max_inner < 1) throw std::invalid_argument("truncated_cg: max_inner must be >= 1");

  TcgResult<Tangent> out{grad * 0.0, 0, 0.0, false, "zero gradient"};
  Tangent eta = grad * 0.0;
  Tangent r = grad;
  double rr = inner_product(r, r);
  const double r0 = std::sqrt(rr);
  if (r0 == 0.0) return out;
  Tangent d = -r;
  double eta_eta = 0.0;
  double eta_d = 0.0;
  double model = 0.0;  // m(η) − f = ⟨g,η⟩ + ½⟨η,Hη⟩

  const double stop_tol = r0 * std::min(0.1, r0);

  auto to_boundary = [&](const Tangent& base, const Tangent& dir, double bb, double bd,
                         double dd) {
    // positive root of ‖base + τ·dir‖² = radius²
    const double disc = bd * bd - dd * (bb - radius * radius);
    const double tau = (-bd + std::sqrt(std::max(disc, 0.0))) / dd;
    return std::make_pair(base + dir * tau, tau);
  };

  for (int j = 0; j < max_inner; ++j) {
    Tangent hd = hess(d);
    ++out.hess_applies;
    const double dhd = inner_product(d, hd);
    if (!std::isfinite(dhd)) throw NumericalError("truncated_cg: non-finite curvature");
    const double dd = inner_product(d, d);
    if (dhd <= 0.0) {
      auto [step, tau] = to_boundary(eta, d, eta_eta, eta_d, dd);
      model += tau * inner_product(r, d) + 0.5 * tau * tau * dhd;
      out.step = std::move(step);
      out.predicted_decrease = -model;
      out.hit_boundary = true;
      out.stop_reason = "negative curvature";
      return out;
    }
    const double alpha = rr / dhd;
    const double new_eta_eta = eta_eta + 2.0 * alpha * eta_d + alpha * alpha * dd;
    if (new_eta_eta >= radius * radius) {
      auto [step, tau] = to_boundary(eta, d, eta_eta, eta_d, dd);
      model += tau * inner_product(r, d) + 0.5 * tau * tau * dhd;
      out.step = std::move(step);
      out.predicted_decrease = -model;
      out.hit_boundary = true;
      out.stop_reason = "boundary";
      return out;
    }
    eta = eta + d * alpha;
    model -= 0.5 * alpha * rr;  // exact CG model decrease per interior step
    r = r + hd * alpha;
    const double rr_next = inner_product(r, r);
    eta_eta = new_eta_eta;
    if (std::sqrt(rr_next) <= stop_tol) {
      out.step = std::move(eta);
      out.predicted_decrease = -model;
      out.stop_reason = "residual";
      return out;
    }
    const double beta = rr_next / rr;
    rr = rr_next;
    d = -r + d * beta;
    eta_d = beta * (eta_d + alpha * dd);
  }
  out.step = std::move(eta);
  out.predicted_decrease = -model;
  out.stop_reason = "max inner";
  return out;
}

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class Model, class Point>
double model_inner(const Model& model, const Point& x, const typename Model::Tangent& u,
                   const typename Model::Tangent& v) {
  return model.inner(x, u, v);
}

}  // namespace detail

/// Riemannian trust-region Newton (outer loop around truncated_cg). The
/// model supplies cost/gradient/hess_vec/retract/inner on its point type.
template <class Model>
SolveResult<typename Model::Point> solve_rtr(const Model& model, typename Model::Point x0,
                                             const TrustRegionConfig& cfg,
                                             RotationTracker* tracker = nullptr) {
  using Point = typename Model::Point;
  if (!(cfg.initial_radius > 0) || cfg.initial_radius > cfg.max_radius) {
    throw std::invalid_argument("solve_rtr: need 0 < initial_radius <= max_radius");
  }
  if (cfg.max_inner_cg < 1) throw std::invalid_argument("solve_rtr: max_inner_cg must be >= 1");

  const auto t0 = std::chrono::steady_clock::now();
  SolveResult<Point> out{std::move(x0), {}, false};
  double radius = cfg.initial_radius;
  double f = model.cost(out.x);
  auto g = model.gradient(out.x);
  double gn = std::sqrt(model.inner(out.x, g, g));
  out.records.push_back({0, f, gn, radius, 0, detail::seconds_since(t0)});

  for (int it = 1; it <= cfg.max_outer && gn > cfg.grad_tol; ++it) {
    auto hess = [&](const typename Model::Tangent& v) { return model.hess_vec(out.x, v); };
    auto inner_x = [&](const typename Model::Tangent& u, const typename Model::Tangent& v) {
      return model.inner(out.x, u, v);
    };
    auto tcg = truncated_cg(g, hess, radius, cfg.max_inner_cg, inner_x);

    Point candidate = model.retract(out.x, tcg.step, 1.0);
    const double f_new = model.cost(candidate);
    if (!std::isfinite(f_new)) {
      throw NumericalError("solve_rtr: non-finite cost at iteration " + std::to_string(it));
    }
    // regularize ρ so decreases at the floating-point floor still count
    const double rho_reg = 1e-13 * std::max(1.0, std::abs(f));
    const double pred = tcg.predicted_decrease + rho_reg;
    const double actual = f - f_new + rho_reg;
    const double rho = pred > 0 ? actual / pred : -1.0;

    if (rho > cfg.accept_rho) {
      if constexpr (std::is_same_v<typename Model::Tangent, TangentAction>) {
        if (tracker) tracker->absorb(tcg.step, 1.0);
      }
      out.x = std::move(candidate);
      f = f_new;
      g = model.gradient(out.x);
      gn = std::sqrt(model.inner(out.x, g, g));
    }
    if (rho < cfg.accept_rho) {
      radius *= cfg.shrink_factor;
      if (radius < 1e-14) {
        throw ConvergenceError("solve_rtr: trust radius collapsed at iteration " +
                               std::to_string(it));
      }
    } else if (rho > cfg.expand_rho) {
      radius = std::min(radius * cfg.growth_factor, cfg.max_radius);
    }
    out.records.push_back({it, f, gn, radius, tcg.hess_applies, detail::seconds_since(t0)});
  }
  out.converged = gn <= cfg.grad_tol;
  return out;
}

/// Riemannian nonlinear conjugate gradient with the Hestenes–Stiefel update,
/// backtracking Armijo line search, and direction resets on non-descent or
/// every n·p iterations. Transport of the previous gradient and direction is
/// delegated to the model (identity on the action pairs by default).
template <class Model>
SolveResult<typename Model::Point> solve_rcg(const Model& model, typename Model::Point x0,
                                             const CGConfig& cfg,
                                             RotationTracker* tracker = nullptr) {
  using Point = typename Model::Point;
  using Tangent = typename Model::Tangent;
  if (!(cfg.armijo_c1 > 0) || cfg.armijo_c1 >= 1 || !(cfg.backtrack_factor > 0) ||
      cfg.backtrack_factor >= 1) {
    throw std::invalid_argument("solve_rcg: need 0 < armijo_c1 < 1 and 0 < backtrack_factor < 1");
  }

  const auto t0 = std::chrono::steady_clock::now();
  SolveResult<Point> out{std::move(x0), {}, false};
  double f = model.cost(out.x);
  Tangent g = model.gradient(out.x);
  double gn = std::sqrt(model.inner(out.x, g, g));
  out.records.push_back({0, f, gn, 0.0, 0, detail::seconds_since(t0)});

  Tangent d = -g;
  double step = cfg.initial_step;
  const int restart_period = cfg.restart_every > 0
                                 ? cfg.restart_every
                                 : static_cast<int>(model.restart_period_hint(out.x));
  int since_restart = 0;

  for (int it = 1; it <= cfg.max_iter && gn > cfg.grad_tol; ++it) {
    double dir_deriv = model.inner(out.x, g, d);
    if (!std::isfinite(dir_deriv) || dir_deriv >= 0.0 || since_restart >= restart_period) {
      d = -g;
      dir_deriv = -gn * gn;
      since_restart = 0;
    }

    double t = step;
    int backtracks = 0;
    if (auto exact = model.exact_step(out.x, d); exact.has_value()) {
      t = *exact;
    } else {
      while (model.cost(model.retract(out.x, d, t)) > f + cfg.armijo_c1 * t * dir_deriv) {
        t *= cfg.backtrack_factor;
        if (++backtracks > cfg.max_backtracks) {
          throw StagnationError("solve_rcg: line search exhausted " +
                                    std::to_string(cfg.max_backtracks) + " backtracks at iteration " +
                                    std::to_string(it),
                                out.records);
        }
      }
    }

    Point x_new = model.retract(out.x, d, t);
    const double f_new = model.cost(x_new);
    Tangent g_new = model.gradient(x_new);
    const Tangent step_taken = d * t;
    Tangent tg = model.transport(out.x, step_taken, x_new, g);
    Tangent td = model.transport(out.x, step_taken, x_new, d);

    const Tangent y = g_new - tg;
    const double denom = model.inner(x_new, td, y);
    double beta = model.inner(x_new, g_new, y) / denom;
    if (!std::isfinite(beta)) beta = 0.0;
    Tangent d_new = -g_new + td * beta;

    if constexpr (std::is_same_v<typename Model::Tangent, TangentAction>) {
      if (tracker) tracker->absorb(d, t);
    }
    out.x = std::move(x_new);
    f = f_new;
    g = std::move(g_new);
    gn = std::sqrt(model.inner(out.x, g, g));
    d = std::move(d_new);
    // next search starts from the accepted step, probing one size up after a
    // clean acceptance
    step = backtracks == 0 ? t / cfg.backtrack_factor : t;
    ++since_restart;
    out.records.push_back({it, f, gn, t, backtracks, detail::seconds_since(t0)});
  }
  out.converged = gn <= cfg.grad_tol;
  return out;
}

}  // namespace qmanopt
