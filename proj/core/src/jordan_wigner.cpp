#include "qmanopt/jordan_wigner.hpp"

#include <cmath>
#include <string>

namespace qmanopt {

namespace {

void require_index(int s, int n) {
  if (s < 0 || s >= n) {
    throw std::invalid_argument("spin-orbital index " + std::to_string(s) + " out of range [0," +
                                std::to_string(n) + ")");
  }
  if (n > 62) throw std::invalid_argument("more than 62 spin-orbitals not supported");
}

}  // namespace

PauliSum jw_lowering(int s, int n) {
  require_index(s, n);
  const std::uint64_t tail = (std::uint64_t(1) << s) - 1;
  const std::uint64_t bit = std::uint64_t(1) << s;
  PauliSum a(n);
  a.add(bit, tail, Complex(0.5, 0.0));        // ½ X_s · Z tail
  a.add(bit, tail | bit, Complex(0.0, 0.5));  // (i/2) Y_s · Z tail
  return a;
}

PauliSum jw_raising(int s, int n) {
  require_index(s, n);
  const std::uint64_t tail = (std::uint64_t(1) << s) - 1;
  const std::uint64_t bit = std::uint64_t(1) << s;
  PauliSum a(n);
  a.add(bit, tail, Complex(0.5, 0.0));
  a.add(bit, tail | bit, Complex(0.0, -0.5));
  return a;
}

PauliSum jw_number(int s, int n) {
  require_index(s, n);
  const std::uint64_t bit = std::uint64_t(1) << s;
  PauliSum num(n);
  num.add(0, 0, Complex(0.5, 0.0));
  num.add(0, bit, Complex(-0.5, 0.0));  // (I − Z_s)/2
  return num;
}

PauliSum total_number_operator(int n) {
  PauliSum total(n);
  for (int s = 0; s < n; ++s) total += jw_number(s, n);
  return total;
}

PauliSum total_sz_operator(int n) {
  if (n % 2 != 0) throw std::invalid_argument("total_sz_operator: need an even qubit count");
  const int m = n / 2;
  PauliSum total(n);
  for (int s = 0; s < m; ++s) total += jw_number(s, n) * Complex(0.5, 0.0);
  for (int s = m; s < n; ++s) total += jw_number(s, n) * Complex(-0.5, 0.0);
  return total;
}

PauliSum build_jw_hamiltonian(const FcidumpData& data) {
  const int m = data.norb;
  const int n = 2 * m;
  if (n > 62) throw std::invalid_argument("build_jw_hamiltonian: too many spin-orbitals");

  PauliSum h = PauliSum::identity(n, Complex(data.core_energy, 0.0));

  constexpr double kThresh = 1e-14;
  for (int p = 0; p < m; ++p) {
    for (int q = 0; q < m; ++q) {
      const double hpq = data.one_body(p, q);
      if (std::abs(hpq) <= kThresh) continue;
      for (int spin = 0; spin < 2; ++spin) {
        const int off = spin * m;
        h += (jw_raising(p + off, n) * jw_lowering(q + off, n)) * Complex(hpq, 0.0);
      }
    }
  }

  for (int p = 0; p < m; ++p) {
    for (int q = 0; q < m; ++q) {
      for (int r = 0; r < m; ++r) {
        for (int s = 0; s < m; ++s) {
          const double v = data.two(p, q, r, s);
          if (std::abs(v) <= kThresh) continue;
          for (int sigma = 0; sigma < 2; ++sigma) {
            for (int tau = 0; tau < 2; ++tau) {
              const int so = sigma * m;
              const int to = tau * m;
              // ½ (pq|rs) a†_{pσ} a†_{rτ} a_{sτ} a_{qσ}
              PauliSum term = jw_raising(p + so, n) * jw_raising(r + to, n);
              term = term * jw_lowering(s + to, n);
              term = term * jw_lowering(q + so, n);
              h += term * Complex(0.5 * v, 0.0);
            }
          }
        }
      }
    }
  }
  h.prune();
  if (h.max_imag() > 1e-10) {
    throw NumericalError("build_jw_hamiltonian: non-Hermitian assembly (max imag " +
                         std::to_string(h.max_imag()) + ")");
  }
  return h;
}

}  // namespace qmanopt
