#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "qmanopt/errors.hpp"

namespace qmanopt::detail {

template <class CostFn, class GradFn, class HessFn>
double fd_model_slope(CostFn&& cost_fn, GradFn&& grad_fn, HessFn&& hess_fn,
                      const StiefelPoint& x, ManifoldKind kind, std::uint64_t seed,
                      bool use_hessian) {
  const std::vector<double> ts = fd_grid();
  const double f0 = cost_fn(x);
  const TangentAction g = grad_fn(x);

  for (int attempt = 0; attempt < 5; ++attempt) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(attempt));
    const TangentAction v = random_action(x, kind, rng);
    const double slope_dir = inner(g, v);
    double quad = 0.0;
    if (use_hessian) quad = inner(hess_fn(x, v), v);

    std::vector<double> errs;
    errs.reserve(ts.size());
    bool degenerate = false;
    for (double t : ts) {
      const double f_t = cost_fn(retract(x, v, t));
      double model = f0 + t * slope_dir;
      if (use_hessian) model += 0.5 * t * t * quad;
      const double err = std::abs(f_t - model);
      // remainders at the noise floor make the fit meaningless
      if (err < 50 * std::numeric_limits<double>::epsilon() * (std::abs(f0) + 1.0)) {
        degenerate = true;
        break;
      }
      errs.push_back(err);
    }
    if (degenerate) continue;
    const double slope = fit_loglog_slope(ts, errs);
    // a draw whose leading Taylor coefficient nearly cancels inside the
    // window leaves visibly non-collinear log-log points; resample it
    double worst_fit = 0.0;
    double intercept = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      intercept += (std::log10(errs[i]) - slope * std::log10(ts[i])) / ts.size();
    }
    for (std::size_t i = 0; i < ts.size(); ++i) {
      worst_fit = std::max(
          worst_fit, std::abs(std::log10(errs[i]) - slope * std::log10(ts[i]) - intercept));
    }
    if (worst_fit <= 0.15) return slope;
  }
  throw NumericalError("fd check: degenerate samples for 5 consecutive seeds");
}

}  // namespace qmanopt::detail
