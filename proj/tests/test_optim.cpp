#include "qmanopt/optim.hpp"

#include <gtest/gtest.h>

#include <optional>

#include "qmanopt/models.hpp"
#include "qmanopt/problems.hpp"
#include "qmanopt/sector.hpp"

using namespace qmanopt;

namespace {

SymmetricMatrix random_sym(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Matrix g = gaussian_matrix(n, n, rng);
  return SymmetricMatrix(0.5 * (g + g.transpose()));
}

SymmetricMatrix shifted_diag_hamiltonian(Index n, double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Matrix g = gaussian_matrix(n, n, rng);
  Matrix h = noise * 0.5 * (g + g.transpose());
  for (Index i = 0; i < n; ++i) h(i, i) += static_cast<double>(i + 1);
  return SymmetricMatrix(h);
}

double subspace_overlap(const StiefelPoint& x, const SymmetricMatrix& h) {
  const SymEig eig = sym_eig(h);
  const Matrix v = eig.vectors.leftCols(x.p());
  return (v.transpose() * x.mat()).squaredNorm() / static_cast<double>(x.p());
}

// flat Euclidean quadratic ½xᵀQx − bᵀx exposed through the model interface,
// with an exact line search; lets the RCG direction recursion be compared
// against textbook linear CG
class EuclideanQuadraticModel {
 public:
  using Point = Vector;
  using Tangent = Vector;
  EuclideanQuadraticModel(Matrix q, Vector b) : q_(std::move(q)), b_(std::move(b)) {}

  double cost(const Point& x) const { return 0.5 * x.dot(q_ * x) - b_.dot(x); }
  Tangent gradient(const Point& x) const { return q_ * x - b_; }
  Tangent hess_vec(const Point&, const Tangent& v) const { return q_ * v; }
  Point retract(const Point& x, const Tangent& d, double t) const {
    accepted_directions.push_back(d);
    return x + t * d;
  }
  double inner(const Point&, const Tangent& u, const Tangent& v) const { return u.dot(v); }
  Tangent transport(const Point&, const Tangent&, const Point&, const Tangent& v) const {
    return v;
  }
  Index restart_period_hint(const Point& x) const { return 10 * x.size(); }
  std::optional<double> exact_step(const Point& x, const Tangent& d) const {
    return -gradient(x).dot(d) / d.dot(q_ * d);
  }

  mutable std::vector<Vector> accepted_directions;  // one retract per iteration

 private:
  Matrix q_;
  Vector b_;
};

}  // namespace

TEST(TruncatedCg, IdentityHessianGivesNewtonStep) {
  std::mt19937_64 rng(1);
  const StiefelPoint x = random_point(6, 2, rng);
  const auto g = random_action(x, ManifoldKind::Stiefel, rng);
  auto ident = [](const TangentAction& v) { return v; };
  auto ip = [](const TangentAction& u, const TangentAction& v) { return inner(u, v); };
  const auto res = truncated_cg(g, ident, 10.0, 5, ip);
  EXPECT_LT(action_norm(res.step + g), 1e-12);
  EXPECT_EQ(res.stop_reason, "residual");
  EXPECT_GE(res.predicted_decrease, 0.0);
}

TEST(TruncatedCg, NegativeCurvatureStopsOnBoundary) {
  std::mt19937_64 rng(2);
  const StiefelPoint x = random_point(6, 2, rng);
  const auto g = random_action(x, ManifoldKind::Stiefel, rng);
  auto negdef = [](const TangentAction& v) { return v * -1.0; };
  auto ip = [](const TangentAction& u, const TangentAction& v) { return inner(u, v); };
  const double radius = 0.7;
  const auto res = truncated_cg(g, negdef, radius, 5, ip);
  EXPECT_TRUE(res.hit_boundary);
  EXPECT_NEAR(inner(res.step, res.step), radius * radius, 1e-10);
  EXPECT_GE(res.predicted_decrease, 0.0);
}

TEST(TruncatedCg, RespectsHessianBudget) {
  std::mt19937_64 rng(3);
  const StiefelPoint x = random_point(8, 3, rng);
  const auto g = random_action(x, ManifoldKind::Stiefel, rng);
  const SymmetricMatrix h = random_sym(8, 4);
  const GrassmannProblem prob{h};
  int calls = 0;
  auto hess = [&](const TangentAction& v) {
    ++calls;
    return hess_vec(prob, x, v);
  };
  auto ip = [](const TangentAction& u, const TangentAction& v) { return inner(u, v); };
  const auto res = truncated_cg(g, hess, 0.25, 3, ip);
  EXPECT_LE(calls, 3);
  EXPECT_EQ(res.hess_applies, calls);
}

TEST(SolveRtr, ConvergedStartReturnsImmediately) {
  const SymmetricMatrix h = shifted_diag_hamiltonian(8, 0.0, 5);
  ClassicalModel<GrassmannProblem> model{GrassmannProblem{h}};
  StiefelPoint x0{Matrix::Identity(8, 2)};
  TrustRegionConfig cfg;
  const auto res = solve_rtr(model, x0, cfg);
  EXPECT_TRUE(res.converged);
  EXPECT_EQ(res.records.size(), 1u);
  EXPECT_LT((res.x.mat() - x0.mat()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(SolveRtr, RecoversLowestSubspace) {
  const SymmetricMatrix h = shifted_diag_hamiltonian(8, 0.01, 6);
  ClassicalModel<GrassmannProblem> model{GrassmannProblem{h}};
  const StiefelPoint x0 = screen_initial_frame(h, 2);
  TrustRegionConfig cfg;
  cfg.initial_radius = 0.25;
  cfg.max_inner_cg = 3;
  cfg.grad_tol = 1e-3;
  const auto res = solve_rtr(model, x0, cfg);
  EXPECT_TRUE(res.converged);
  EXPECT_LE(res.records.back().iter, 15);
  EXPECT_GE(subspace_overlap(res.x, h), 1.0 - 1e-8);
}

TEST(SolveRtr, AcceptedCostsNonIncreasing) {
  const SymmetricMatrix h = random_sym(10, 7);
  ClassicalModel<GrassmannProblem> model{GrassmannProblem{h}};
  const StiefelPoint x0 = screen_initial_frame(h, 3);
  TrustRegionConfig cfg;
  cfg.grad_tol = 1e-6;
  cfg.max_outer = 500;
  const auto res = solve_rtr(model, x0, cfg);
  EXPECT_TRUE(res.converged);
  for (std::size_t i = 1; i < res.records.size(); ++i) {
    EXPECT_LE(res.records[i].f, res.records[i - 1].f + 1e-12);
  }
  EXPECT_LT(
      (res.x.mat().transpose() * res.x.mat() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(),
      1e-9);
}

TEST(SolveRtr, RadiusRuleFollowsRho) {
  // scripted landscape: every candidate improves by ≥ 1 while the quadratic
  // model predicts ≤ ~½, so ρ > expand_rho and the radius doubles to its cap
  struct ScriptedModel {
    using Point = int;
    using Tangent = Vector;
    double cost(const Point& x) const { return x == 0 ? 1.0 : -static_cast<double>(x); }
    Tangent gradient(const Point& x) const {
      Vector g(1);
      g(0) = x >= 3 ? 0.0 : 1.0;
      return g;
    }
    Tangent hess_vec(const Point&, const Tangent& v) const { return v; }
    Point retract(const Point& x, const Tangent&, double) const { return x + 1; }
    double inner(const Point&, const Tangent& u, const Tangent& v) const { return u.dot(v); }
    Tangent transport(const Point&, const Tangent&, const Point&, const Tangent& v) const {
      return v;
    }
    Index restart_period_hint(const Point&) const { return 100; }
    std::optional<double> exact_step(const Point&, const Tangent&) const { return std::nullopt; }
  };
  ScriptedModel model;
  TrustRegionConfig cfg;
  cfg.initial_radius = 0.25;
  cfg.max_radius = 1.0;
  cfg.grad_tol = 0.5;
  cfg.max_outer = 10;
  const auto res = solve_rtr(model, 0, cfg);
  EXPECT_TRUE(res.converged);
  ASSERT_GE(res.records.size(), 3u);
  EXPECT_GT(res.records[1].step_or_radius, res.records[0].step_or_radius);
  EXPECT_DOUBLE_EQ(res.records.back().step_or_radius, cfg.max_radius);
}

TEST(SolveRtr, RadiusShrinksOnRejection) {
  // gradient promises descent but the cost only increases: every proposal is
  // rejected and the radius shrinks by the 0.25 factor each time
  struct AscentModel {
    using Point = int;
    using Tangent = Vector;
    double cost(const Point& x) const { return static_cast<double>(x); }
    Tangent gradient(const Point&) const {
      Vector g(1);
      g(0) = 1.0;
      return g;
    }
    Tangent hess_vec(const Point&, const Tangent& v) const { return v; }
    Point retract(const Point& x, const Tangent&, double) const { return x + 1; }
    double inner(const Point&, const Tangent& u, const Tangent& v) const { return u.dot(v); }
    Tangent transport(const Point&, const Tangent&, const Point&, const Tangent& v) const {
      return v;
    }
    Index restart_period_hint(const Point&) const { return 100; }
    std::optional<double> exact_step(const Point&, const Tangent&) const { return std::nullopt; }
  };
  AscentModel model;
  TrustRegionConfig cfg;
  cfg.initial_radius = 0.25;
  cfg.grad_tol = 0.5;
  cfg.max_outer = 3;
  const auto res = solve_rtr(model, 0, cfg);
  EXPECT_FALSE(res.converged);
  EXPECT_NEAR(res.records[1].step_or_radius, 0.25 * cfg.shrink_factor, 1e-15);
  EXPECT_NEAR(res.records[2].step_or_radius, 0.25 * cfg.shrink_factor * cfg.shrink_factor,
              1e-15);
}

TEST(SolveRcg, SphereQuadraticFindsGroundState) {
  Vector d(4);
  d << 1, 2, 3, 4;
  const SymmetricMatrix h{Matrix(d.asDiagonal())};
  ClassicalModel<GrassmannProblem> model{GrassmannProblem{h}};
  Matrix x0(4, 1);
  x0 << 0.1, 0.1, 0.1, std::sqrt(1.0 - 0.03);
  CGConfig cfg;
  cfg.grad_tol = 1e-7;
  cfg.max_iter = 500;
  const auto res = solve_rcg(model, StiefelPoint(x0), cfg);
  EXPECT_TRUE(res.converged);
  const double overlap = std::abs(res.x.mat()(0, 0));
  EXPECT_GE(overlap * overlap, 1.0 - 1e-8);
}

TEST(SolveRcg, OrderingFollowsK) {
  const Index n = 8, p = 4;
  const SymmetricMatrix h = shifted_diag_hamiltonian(n, 0.05, 8);
  const SymEig oracle = sym_eig(h);
  const StiefelPoint x0 = screen_initial_frame(h, p);
  CGConfig cfg;
  cfg.grad_tol = 1e-6;
  cfg.max_iter = 3000;

  StiefelProblem fwd{h, StiefelProblem::default_k(p)};  // (4,3,2,1)
  const auto res_fwd = solve_rcg(ClassicalModel<StiefelProblem>{fwd}, x0, cfg);
  EXPECT_TRUE(res_fwd.converged);
  for (Index j = 0; j < p; ++j) {
    const double ov = std::abs(res_fwd.x.mat().col(j).dot(oracle.vectors.col(j)));
    EXPECT_GE(ov * ov, 0.99) << "column " << j;
  }

  Vector k_flip(p);
  for (Index j = 0; j < p; ++j) k_flip(j) = static_cast<double>(j + 1);  // (1,2,3,4)
  StiefelProblem rev{h, k_flip};
  const auto res_rev = solve_rcg(ClassicalModel<StiefelProblem>{rev}, x0, cfg);
  EXPECT_TRUE(res_rev.converged);
  for (Index j = 0; j < p; ++j) {
    const double ov = std::abs(res_rev.x.mat().col(j).dot(oracle.vectors.col(p - 1 - j)));
    EXPECT_GE(ov * ov, 0.99) << "column " << j << " (flipped)";
  }
}

TEST(SolveRcg, ArmijoHoldsOnEveryAcceptedStep) {
  const SymmetricMatrix h = random_sym(8, 9);
  ClassicalModel<GrassmannProblem> model{GrassmannProblem{h}};
  const StiefelPoint x0 = screen_initial_frame(h, 2);
  CGConfig cfg;
  cfg.grad_tol = 1e-5;
  const auto res = solve_rcg(model, x0, cfg);
  EXPECT_TRUE(res.converged);
  for (std::size_t i = 1; i < res.records.size(); ++i) {
    EXPECT_LE(res.records[i].f, res.records[i - 1].f + 1e-12);
  }
}

TEST(SolveRcg, MatchesClassicalCgOnEuclideanQuadratic) {
  // HS-β RCG with identity transport and exact line search reproduces the
  // classical CG iterates on a 4×4 SPD quadratic
  Matrix q(4, 4);
  q << 5, 1, 0, 0.5,
       1, 4, 0.3, 0,
       0, 0.3, 3, 0.2,
       0.5, 0, 0.2, 2;
  Vector b(4);
  b << 1, -2, 0.5, 1;
  EuclideanQuadraticModel model(q, b);
  CGConfig cfg;
  cfg.grad_tol = 1e-9;
  cfg.max_iter = 20;
  const auto res = solve_rcg(model, Vector(Vector::Zero(4)), cfg);
  EXPECT_TRUE(res.converged);
  EXPECT_LT((res.x - q.ldlt().solve(b)).norm(), 1e-7);

  // textbook linear CG from the same start, capturing the directions
  Vector x = Vector::Zero(4);
  Vector r = q * x - b;
  Vector d = -r;
  std::vector<Vector> cg_directions;
  for (int it = 0; it < 4 && r.norm() > 1e-9; ++it) {
    cg_directions.push_back(d);
    const double alpha = r.dot(r) / d.dot(q * d);
    x += alpha * d;
    const Vector r_new = r + alpha * (q * d);
    const double beta = r_new.dot(r_new) / r.dot(r);
    d = -r_new + beta * d;
    r = r_new;
  }
  ASSERT_GE(model.accepted_directions.size(), cg_directions.size());
  for (std::size_t i = 0; i < cg_directions.size(); ++i) {
    const Vector& a = model.accepted_directions[i];
    const Vector& c = cg_directions[i];
    const double cosine = a.dot(c) / (a.norm() * c.norm());
    EXPECT_NEAR(cosine, 1.0, 1e-9) << "direction " << i;
  }
}

TEST(SolveRcg, StagnationRaisesWithRecords) {
  // claims descent that no step length can realize: line search must exhaust
  struct FlatModel {
    using Point = Vector;
    using Tangent = Vector;
    double cost(const Point&) const { return 1.0; }
    Tangent gradient(const Point&) const {
      Vector g(1);
      g(0) = 1.0;
      return g;
    }
    Tangent hess_vec(const Point&, const Tangent& v) const { return v; }
    Point retract(const Point& x, const Tangent& d, double t) const { return x + t * d; }
    double inner(const Point&, const Tangent& u, const Tangent& v) const { return u.dot(v); }
    Tangent transport(const Point&, const Tangent&, const Point&, const Tangent& v) const {
      return v;
    }
    Index restart_period_hint(const Point&) const { return 100; }
    std::optional<double> exact_step(const Point&, const Tangent&) const { return std::nullopt; }
  };
  FlatModel model;
  Vector x0(1);
  x0 << 1.0;  // constant cost: Armijo can never hold for the claimed descent
  CGConfig cfg;
  cfg.max_backtracks = 10;
  try {
    solve_rcg(model, x0, cfg);
    FAIL() << "expected StagnationError";
  } catch (const StagnationError& e) {
    EXPECT_FALSE(e.records().empty());
  }
}

TEST(RotationTracker, ReproducesTheFinalFrame) {
  const SymmetricMatrix h = shifted_diag_hamiltonian(8, 0.05, 10);
  ClassicalModel<GrassmannProblem> model{GrassmannProblem{h}};
  const StiefelPoint x0 = screen_initial_frame(h, 2);
  TrustRegionConfig cfg;
  cfg.grad_tol = 1e-8;
  cfg.max_outer = 200;
  RotationTracker tracker(8, 2);
  const auto res = solve_rtr(model, x0, cfg, &tracker);
  EXPECT_TRUE(res.converged);
  const Matrix replay = tracker.left() * x0.mat() * tracker.right();
  EXPECT_LT((replay - res.x.mat()).cwiseAbs().maxCoeff(), 1e-10);
}
