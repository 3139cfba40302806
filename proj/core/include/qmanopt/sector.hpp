#pragma once

#include <utility>
#include <vector>

#include "qmanopt/linalg.hpp"
#include "qmanopt/manifold.hpp"

namespace qmanopt {

/// Computational-basis indices spanning a particle-number / S_z symmetry
/// sector, in the blocked spin-orbital convention of the JW mapping.
struct SectorBasis {
  int qubits = 0;
  std::vector<Index> indices;
  int n_electrons = 0;
  int sz_twice = 0;
};

SectorBasis enumerate_sector(int qubits, int n_electrons, int sz_twice);

/// Restrict a number- and S_z-conserving Hamiltonian to a sector. The
/// conservation is checked (commutator entries ≤ 1e-8) before slicing.
std::pair<SectorBasis, SymmetricMatrix> sector_project(const SymmetricMatrix& h, int n_electrons,
                                                       int sz_twice);

/// Screened mean-field start: the computational basis columns at the p
/// smallest diagonal entries of H, ascending, ties broken by index.
StiefelPoint screen_initial_frame(const SymmetricMatrix& h, Index p);

}  // namespace qmanopt
