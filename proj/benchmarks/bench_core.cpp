#include <benchmark/benchmark.h>

#include <random>

#include "qmanopt/jordan_wigner.hpp"
#include "qmanopt/models.hpp"
#include "qmanopt/problems.hpp"
#include "qmanopt/sector.hpp"
#include "qmanopt/statevector.hpp"

using namespace qmanopt;

namespace {

SymmetricMatrix random_sym(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Matrix g = gaussian_matrix(n, n, rng);
  return SymmetricMatrix(0.5 * (g + g.transpose()));
}

FcidumpData random_integrals(int norb, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  FcidumpData data;
  data.norb = norb;
  data.nelec = norb;
  data.core_energy = 0.3;
  Matrix g = gaussian_matrix(norb, norb, rng);
  data.one_body = 0.5 * (g + g.transpose());
  data.two_body.assign(static_cast<std::size_t>(norb) * norb * norb * norb, 0.0);
  std::normal_distribution<double> gauss;
  for (int p = 0; p < norb; ++p) {
    for (int q = 0; q <= p; ++q) {
      for (int r = 0; r < norb; ++r) {
        for (int s = 0; s <= r; ++s) {
          const double v = 0.1 * gauss(rng);
          const int m = norb;
          auto at = [&](int a, int b, int c, int d) -> double& {
            return data.two_body[static_cast<std::size_t>(((a * m + b) * m + c) * m + d)];
          };
          at(p, q, r, s) = at(q, p, r, s) = at(p, q, s, r) = at(q, p, s, r) = v;
          at(r, s, p, q) = at(s, r, p, q) = at(r, s, q, p) = at(s, r, q, p) = v;
        }
      }
    }
  }
  return data;
}

void BM_ExpmSkew(benchmark::State& state) {
  const Index n = state.range(0);
  std::mt19937_64 rng(1);
  Matrix g = gaussian_matrix(n, n, rng);
  const SkewMatrix l(g - g.transpose());
  for (auto _ : state) {
    benchmark::DoNotOptimize(expm_skew(l, 0.3));
  }
}
BENCHMARK(BM_ExpmSkew)->Arg(16)->Arg(64)->Arg(256);

void BM_RetractClassical(benchmark::State& state) {
  const Index n = state.range(0);
  std::mt19937_64 rng(2);
  const StiefelPoint x = random_point(n, 4, rng);
  const auto act = random_action(x, ManifoldKind::Stiefel, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(retract(x, act, 0.2));
  }
}
BENCHMARK(BM_RetractClassical)->Arg(64)->Arg(256);

void BM_RetractStatevectorExact(benchmark::State& state) {
  const Index n = state.range(0);
  std::mt19937_64 rng(3);
  const StiefelPoint x = random_point(n, 4, rng);
  const auto act = random_action(x, ManifoldKind::Stiefel, rng);
  const EntangledState psi = prepare_state(x);
  for (auto _ : state) {
    benchmark::DoNotOptimize(apply_retraction_exact(psi, act, 0.2));
  }
}
BENCHMARK(BM_RetractStatevectorExact)->Arg(64)->Arg(256);

void BM_RetractTrotter(benchmark::State& state) {
  const int steps = static_cast<int>(state.range(0));
  std::mt19937_64 rng(4);
  const StiefelPoint x = random_point(16, 2, rng);
  const auto act = random_action(x, ManifoldKind::Stiefel, rng);
  const EntangledState psi = prepare_state(x);
  for (auto _ : state) {
    benchmark::DoNotOptimize(apply_retraction_trotter(psi, act, 0.2, steps));
  }
}
BENCHMARK(BM_RetractTrotter)->Arg(1)->Arg(4)->Arg(16);

void BM_PauliDecompose(benchmark::State& state) {
  const Index n = Index(1) << state.range(0);
  std::mt19937_64 rng(5);
  Matrix g = gaussian_matrix(n, n, rng);
  const Matrix m = 0.5 * (g + g.transpose());
  for (auto _ : state) {
    benchmark::DoNotOptimize(pauli_decompose(m));
  }
}
BENCHMARK(BM_PauliDecompose)->Arg(2)->Arg(4)->Arg(6);

void BM_StiefelHessVec(benchmark::State& state) {
  const Index n = state.range(0);
  std::mt19937_64 rng(6);
  const SymmetricMatrix h = random_sym(n, 7);
  const StiefelProblem prob{h, StiefelProblem::default_k(4)};
  const StiefelPoint x = random_point(n, 4, rng);
  const auto v = random_action(x, ManifoldKind::Stiefel, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hess_vec(prob, x, v));
  }
}
BENCHMARK(BM_StiefelHessVec)->Arg(64)->Arg(256);

void BM_JordanWignerBuild(benchmark::State& state) {
  const int norb = static_cast<int>(state.range(0));
  const FcidumpData data = random_integrals(norb, 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_jw_hamiltonian(data));
  }
}
BENCHMARK(BM_JordanWignerBuild)->Arg(2)->Arg(3)->Arg(4);

void BM_RtrGrassmann(benchmark::State& state) {
  const Index n = state.range(0);
  std::mt19937_64 rng(9);
  Matrix g = gaussian_matrix(n, n, rng);
  Matrix hm = 0.01 * 0.5 * (g + g.transpose());
  for (Index i = 0; i < n; ++i) hm(i, i) += static_cast<double>(i + 1);
  const SymmetricMatrix h(hm);
  ClassicalModel<GrassmannProblem> model{GrassmannProblem{h}};
  const StiefelPoint x0 = screen_initial_frame(h, 4);
  TrustRegionConfig cfg;
  cfg.grad_tol = 1e-6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_rtr(model, x0, cfg));
  }
}
BENCHMARK(BM_RtrGrassmann)->Arg(32)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
