#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qmanopt/linalg.hpp"

namespace qmanopt {

/// Electron integrals from a Molpro-style FCIDUMP file. Two-body integrals
/// are chemists' notation (pq|rs) with the 8-fold permutation symmetry
/// applied on ingestion; all values in Hartree.
struct FcidumpData {
  int norb = 0;
  int nelec = 0;
  int ms2 = 0;
  double core_energy = 0.0;
  std::vector<int> orbsym;          // parsed, unused
  Matrix one_body;                  // h(p,q), symmetric
  std::vector<double> two_body;     // (pq|rs) at ((p*m+q)*m+r)*m+s
  std::vector<double> orbital_energies;

  double two(int p, int q, int r, int s) const {
    const int m = norb;
    return two_body[static_cast<std::size_t>(((p * m + q) * m + r) * m + s)];
  }
};

/// Parse `&FCI NORB=…,NELEC=…,MS2=…` headers terminated by `&END` or `/`,
/// then `value i j k l` lines (1-based; `i j 0 0` one-body, `i 0 0 0`
/// orbital energy, `0 0 0 0` core energy). Errors carry the line number.
FcidumpData parse_fcidump(std::istream& in);
FcidumpData parse_fcidump(const std::string& text);
FcidumpData parse_fcidump_file(const std::string& path);

}  // namespace qmanopt
