#include "qmanopt/sector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "qmanopt/errors.hpp"

namespace qmanopt {

namespace {

int log2_exact(Index dim, const char* who) {
  int q = 0;
  while ((Index(1) << q) < dim) ++q;
  if ((Index(1) << q) != dim) {
    throw std::invalid_argument(std::string(who) + ": dimension " + std::to_string(dim) +
                                " is not a power of two");
  }
  return q;
}

}  // namespace

SectorBasis enumerate_sector(int qubits, int n_electrons, int sz_twice) {
  if (qubits < 2 || qubits % 2 != 0) {
    throw std::invalid_argument("enumerate_sector: need an even qubit count, got " +
                                std::to_string(qubits));
  }
  const int m = qubits / 2;
  const std::uint64_t alpha_mask = (std::uint64_t(1) << m) - 1;
  SectorBasis basis{qubits, {}, n_electrons, sz_twice};
  const std::uint64_t dim = std::uint64_t(1) << qubits;
  for (std::uint64_t j = 0; j < dim; ++j) {
    const int na = std::popcount(j & alpha_mask);
    const int nb = std::popcount(j >> m);
    if (na + nb == n_electrons && na - nb == sz_twice) {
      basis.indices.push_back(static_cast<Index>(j));
    }
  }
  return basis;
}

std::pair<SectorBasis, SymmetricMatrix> sector_project(const SymmetricMatrix& h, int n_electrons,
                                                       int sz_twice) {
  const int qubits = log2_exact(h.dim(), "sector_project");
  if (qubits % 2 != 0) {
    throw std::invalid_argument("sector_project: odd qubit count has no spin blocking");
  }
  const int m = qubits / 2;
  const std::uint64_t alpha_mask = (std::uint64_t(1) << m) - 1;

  // conservation check: |[H, N]| and |[H, Sz]| entries are |H_ij·Δ|
  const Index dim = h.dim();
  double worst_n = 0.0, worst_sz = 0.0;
  for (Index i = 0; i < dim; ++i) {
    const auto ui = static_cast<std::uint64_t>(i);
    const int ni = std::popcount(ui);
    const int szi = std::popcount(ui & alpha_mask) - std::popcount(ui >> m);
    for (Index j = i + 1; j < dim; ++j) {
      const auto uj = static_cast<std::uint64_t>(j);
      const double hij = std::abs(h.mat()(i, j));
      if (hij == 0.0) continue;
      const int nj = std::popcount(uj);
      const int szj = std::popcount(uj & alpha_mask) - std::popcount(uj >> m);
      worst_n = std::max(worst_n, hij * std::abs(double(ni - nj)));
      worst_sz = std::max(worst_sz, hij * std::abs(double(szi - szj)));
    }
  }
  if (worst_n > 1e-8) {
    throw ConstraintError("sector_project: Hamiltonian does not conserve particle number, "
                          "worst commutator entry " + std::to_string(worst_n));
  }
  if (worst_sz > 1e-8) {
    throw ConstraintError("sector_project: Hamiltonian does not conserve S_z, "
                          "worst commutator entry " + std::to_string(worst_sz));
  }

  SectorBasis basis = enumerate_sector(qubits, n_electrons, sz_twice);
  const Index sub = static_cast<Index>(basis.indices.size());
  if (sub == 0) {
    throw std::invalid_argument("sector_project: empty sector N=" + std::to_string(n_electrons) +
                                ", 2Sz=" + std::to_string(sz_twice));
  }
  Matrix hs(sub, sub);
  for (Index a = 0; a < sub; ++a) {
    for (Index b = 0; b < sub; ++b) {
      hs(a, b) = h.mat()(basis.indices[static_cast<std::size_t>(a)],
                         basis.indices[static_cast<std::size_t>(b)]);
    }
  }
  return {std::move(basis), SymmetricMatrix(std::move(hs))};
}

StiefelPoint screen_initial_frame(const SymmetricMatrix& h, Index p) {
  const Index n = h.dim();
  if (p < 1 || p > n) {
    throw std::invalid_argument("screen_initial_frame: need 1 <= p <= n, got p=" +
                                std::to_string(p));
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return h.mat()(a, a) < h.mat()(b, b);
  });
  Matrix x = Matrix::Zero(n, p);
  for (Index j = 0; j < p; ++j) x(order[static_cast<std::size_t>(j)], j) = 1.0;
  return StiefelPoint(std::move(x));
}

}  // namespace qmanopt
