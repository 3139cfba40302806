#pragma once

#include "qmanopt/fcidump.hpp"
#include "qmanopt/pauli.hpp"

namespace qmanopt {

// Jordan–Wigner mapping with blocked spin-orbital order: qubits
// [0, m) carry the alpha orbitals and [m, 2m) the beta orbitals, qubit t
// being bit t of a basis index with occupied = 1. The Z parity tail runs
// over the qubits below t.

PauliSum jw_lowering(int spin_orbital, int n_spin_orbitals);   // a
PauliSum jw_raising(int spin_orbital, int n_spin_orbitals);    // a†
PauliSum jw_number(int spin_orbital, int n_spin_orbitals);     // a†a

PauliSum total_number_operator(int n_spin_orbitals);
PauliSum total_sz_operator(int n_spin_orbitals);  // ½(N_α − N_β), blocked order

/// Second-quantized Hamiltonian
///   H = E_core + Σ h_pq a†_pσ a_qσ + ½ Σ (pq|rs) a†_pσ a†_rτ a_sτ a_qσ
/// realized as a Hermitian Pauli sum on 2·norb qubits.
PauliSum build_jw_hamiltonian(const FcidumpData& data);

}  // namespace qmanopt
