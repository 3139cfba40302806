#pragma once

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>
#include <vector>

#include "qmanopt/linalg.hpp"
#include "qmanopt/manifold.hpp"
#include "qmanopt/optim.hpp"
#include "qmanopt/pauli.hpp"

namespace qmanopt {

struct HamiltonianSource {
  enum class Format { MatrixMarket, Fcidump, PauliText };
  std::string path;
  Format format = Format::MatrixMarket;
};

struct SectorSpec {
  int n_electrons = 0;
  int sz_twice = 0;
};

enum class BackendType { Classical, StatevectorExact, StatevectorShots };

struct BackendSpec {
  BackendType type = BackendType::Classical;
  long long shots = 10000;
  std::uint64_t seed = 0;
};

enum class OptimizerType { Rtr, Rcg };

struct OptimizerSpec {
  OptimizerType type = OptimizerType::Rtr;
  TrustRegionConfig tr;
  CGConfig cg;
};

enum class Strategy4Mode { Retraction, SignedK };  // Appendix modes A and B

struct RunConfig {
  HamiltonianSource hamiltonian;
  std::optional<SectorSpec> sector;
  Index p = 1;
  std::optional<ManifoldKind> manifold;
  int strategy = 2;
  OptimizerSpec optimizer;
  BackendSpec backend;
  std::optional<std::vector<double>> k_diagonal;
  double alpha = 0.0;
  int trotter_steps = 0;  // 0 = exact retraction on the statevector backend
  Strategy4Mode strategy4_mode = Strategy4Mode::Retraction;
  double stage_residual_tol = 1e-8;
  bool report_overlaps = true;
  std::string output_dir = ".";

  /// Parses and validates; the ConfigError message lists every violation.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig from_file(const std::string& path);
};

struct PhaseCount {
  std::string phase;
  int iterations = 0;
};

struct RunReport {
  std::vector<double> eigenvalues;  // ascending
  double final_grad_norm = 0.0;
  std::vector<PhaseCount> iterations;
  std::optional<Matrix> overlaps;  // squared overlaps vs the oracle eigenvectors
  double wall_time = 0.0;

  nlohmann::json to_json() const;
};

/// Dense realization of a Hamiltonian source.
SymmetricMatrix load_hamiltonian(const HamiltonianSource& src);

/// End-to-end pipeline: load, sector-project, screen, dispatch the strategy,
/// and write iterations.jsonl / eigenvalues.csv / summary.json into
/// output_dir. Deterministic for fixed seeds.
RunReport run(const RunConfig& config);

/// Appendix partition sets: log₂p sets of size p/2, the k-th collecting the
/// frame positions whose k-th most significant bit is 1.
std::vector<std::vector<int>> partition_sequence(Index p);

struct SubspaceEigen {
  Vector eigenvalues;  // ascending
  Matrix rotation;
};

/// Strategy 2: classical diagonalization of the measured subspace energy
/// matrix E = XᵀHX.
SubspaceEigen strategy2_diagonalize(const SymmetricMatrix& e);

/// Strategy 3: the same diagonalization replaced by a Stiefel optimization at
/// n = p. Returns the rotation Q with QᵀEQ diagonal to the gradient tolerance.
Matrix strategy3_subspace_opt(const SymmetricMatrix& e, const Vector& k_diag,
                              const OptimizerSpec& optimizer);

/// Squared-overlap matrix (xᵢᵀvⱼ)² of a frame against the p lowest oracle
/// eigenvectors.
Matrix overlap_matrix(const StiefelPoint& x, const SymmetricMatrix& h);

/// Mean principal-angle overlap of span(X) with the oracle's lowest-p
/// eigenspace: ‖VᵀX‖²_F / p.
double principal_overlap(const StiefelPoint& x, const SymmetricMatrix& h);

/// Finite-shot estimate of XᵀHX from a prepared state using per-entry
/// ancilla projector sums; used by the statevector-shots backend.
Matrix sampled_subspace_energy(const StiefelPoint& frame, const PauliSum& h_ps, long long shots,
                               std::uint64_t seed);

}  // namespace qmanopt
