#include "qmanopt/strategies.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "qmanopt/errors.hpp"
#include "qmanopt/fcidump.hpp"
#include "qmanopt/jordan_wigner.hpp"
#include "qmanopt/matrix_market.hpp"
#include "qmanopt/models.hpp"
#include "qmanopt/sector.hpp"
#include "qmanopt/statevector.hpp"

namespace qmanopt {

using nlohmann::json;

namespace {

Matrix sym_of(const Matrix& m) { return m + m.transpose(); }

struct PhaseResult {
  StiefelPoint frame;
  Matrix subspace_energy;  // XᵀHX at the final frame (measured on sv backends)
  std::vector<IterationRecord> records;
  bool converged = false;
};

template <class Problem>
PhaseResult solve_phase(const Problem& prob, const StiefelPoint& x0, const RunConfig& cfg,
                        RotationTracker* tracker) {
  const Matrix& h = prob.hamiltonian().mat();
  if (cfg.backend.type == BackendType::Classical) {
    ClassicalModel<Problem> model(prob, cfg.alpha);
    auto res = cfg.optimizer.type == OptimizerType::Rtr
                   ? solve_rtr(model, x0, cfg.optimizer.tr, tracker)
                   : solve_rcg(model, x0, cfg.optimizer.cg, tracker);
    Matrix e = res.x.mat().transpose() * h * res.x.mat();
    return {res.x, std::move(e), std::move(res.records), res.converged};
  }
  StatevectorModel<Problem> model(prob, {cfg.trotter_steps, cfg.alpha, TransportOrder::Identity});
  auto res = cfg.optimizer.type == OptimizerType::Rtr
                 ? solve_rtr(model, model.start(x0), cfg.optimizer.tr, tracker)
                 : solve_rcg(model, model.start(x0), cfg.optimizer.cg, tracker);
  Matrix e = subspace_matrix(res.x, h);
  return {model.frame(res.x), std::move(e), std::move(res.records), res.converged};
}

int count_iterations(const std::vector<IterationRecord>& records) {
  return records.empty() ? 0 : records.back().iter;
}

void append_phase(std::vector<IterationRecord>& all, std::vector<PhaseCount>& phases,
                  const std::string& name, const std::vector<IterationRecord>& records) {
  phases.push_back({name, count_iterations(records)});
  int base = all.empty() ? 0 : all.back().iter + 1;
  for (std::size_t i = 0; i < records.size(); ++i) {
    IterationRecord r = records[i];
    r.iter = base + static_cast<int>(i);
    all.push_back(r);
  }
}

void write_outputs(const RunConfig& cfg, const RunReport& report,
                   const std::vector<IterationRecord>& records) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw ParseError("cannot create output directory '" + cfg.output_dir + "'");

  {
    std::ofstream out(fs::path(cfg.output_dir) / "iterations.jsonl");
    if (!out) throw ParseError("cannot write iterations.jsonl");
    for (const auto& r : records) {
      nlohmann::ordered_json row{{"iter", r.iter},
                                 {"f", r.f},
                                 {"grad_norm", r.grad_norm},
                                 {"step_or_radius", r.step_or_radius},
                                 {"inner_iters", r.inner_iters},
                                 {"wall_time", r.wall_time}};
      out << row.dump() << "\n";
    }
  }
  {
    std::ofstream out(fs::path(cfg.output_dir) / "eigenvalues.csv");
    if (!out) throw ParseError("cannot write eigenvalues.csv");
    out << "index,eigenvalue\n";
    out.precision(17);
    for (std::size_t i = 0; i < report.eigenvalues.size(); ++i) {
      out << i << "," << report.eigenvalues[i] << "\n";
    }
  }
  {
    std::ofstream out(fs::path(cfg.output_dir) / "summary.json");
    if (!out) throw ParseError("cannot write summary.json");
    out << report.to_json().dump(2) << "\n";
  }
}

Vector effective_k(const RunConfig& cfg) {
  if (cfg.k_diagonal) {
    Vector k(static_cast<Index>(cfg.k_diagonal->size()));
    for (Index i = 0; i < k.size(); ++i) k(i) = (*cfg.k_diagonal)[static_cast<std::size_t>(i)];
    return k;
  }
  return StiefelProblem::default_k(cfg.p);
}

// Gr(n, p/2) stage solve inside iterative block diagonalization keeps its
// tighter tolerance aligned with the configured optimizer.
struct Strategy4Outcome {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;  // columns aligned with the ascending eigenvalues
  double final_grad_norm = 0.0;
  std::vector<IterationRecord> all_records;
  std::vector<PhaseCount> phases;
};

Strategy4Outcome strategy4_block_diag(const SymmetricMatrix& h, const RunConfig& cfg) {
  const Index n = h.dim();
  const Index p = cfg.p;
  Strategy4Outcome out;

  const StiefelPoint x0 = screen_initial_frame(h, p);
  std::vector<Index> positions(static_cast<std::size_t>(p));
  for (Index j = 0; j < p; ++j) {
    Index row = 0;
    x0.mat().col(j).cwiseAbs().maxCoeff(&row);
    positions[static_cast<std::size_t>(j)] = row;
  }

  Matrix h_cur = h.mat();
  Matrix r_total = Matrix::Identity(n, n);

  // initial Gr(n,p) solve, retraction tracked so H can be conjugated
  {
    RotationTracker tracker(n, p);
    GrassmannProblem prob((SymmetricMatrix(0.5 * sym_of(h_cur))));
    PhaseResult res = solve_phase(prob, x0, cfg, &tracker);
    out.final_grad_norm = res.records.back().grad_norm;
    append_phase(out.all_records, out.phases, "grassmann", res.records);
    h_cur = 0.5 * sym_of(tracker.left().transpose() * h_cur * tracker.left());
    r_total = r_total * tracker.left();
  }

  auto stage_residual = [&](int stages_done) {
    const int total_bits = [&] {
      int b = 0;
      while ((Index(1) << b) < p) ++b;
      return b;
    }();
    double worst = 0.0;
    for (Index i = 0; i < p; ++i) {
      const Index gi = positions[static_cast<std::size_t>(i)];
      // coupling to everything outside the p-block
      for (Index g = 0; g < n; ++g) {
        if (std::find(positions.begin(), positions.end(), g) != positions.end()) continue;
        worst = std::max(worst, std::abs(h_cur(gi, g)));
      }
      // coupling across the partition cells refined so far
      for (Index j = 0; j < p; ++j) {
        if (i == j) continue;
        const int shift = total_bits - stages_done;
        if (stages_done > 0 && (i >> shift) != (j >> shift)) {
          worst = std::max(worst, std::abs(h_cur(gi, positions[static_cast<std::size_t>(j)])));
        }
      }
    }
    return worst;
  };

  // The residual is checked before any cleanup; the surviving coupling is
  // then projected away so the next stage sees exactly decoupled cells.
  // Without the projection a second-order solver tunnels between the
  // near-decoupled blocks through their negative curvature directions.
  auto project_blocks = [&](int stages_done) {
    const int total_bits = [&] {
      int b = 0;
      while ((Index(1) << b) < p) ++b;
      return b;
    }();
    const int shift = total_bits - stages_done;
    for (Index i = 0; i < p; ++i) {
      const Index gi = positions[static_cast<std::size_t>(i)];
      for (Index g = 0; g < n; ++g) {
        if (std::find(positions.begin(), positions.end(), g) != positions.end()) continue;
        h_cur(gi, g) = 0.0;
        h_cur(g, gi) = 0.0;
      }
      for (Index j = 0; j < p; ++j) {
        if (i == j) continue;
        if (stages_done > 0 && (i >> shift) != (j >> shift)) {
          h_cur(gi, positions[static_cast<std::size_t>(j)]) = 0.0;
        }
      }
    }
  };

  auto check_stage = [&](int stages_done, const std::string& name) {
    const double res = stage_residual(stages_done);
    if (res > cfg.stage_residual_tol) {
      throw ConvergenceError("strategy 4: " + name + " left block-diagonal residual " +
                             std::to_string(res) + " above threshold " +
                             std::to_string(cfg.stage_residual_tol));
    }
    project_blocks(stages_done);
  };
  check_stage(0, "initial Grassmann solve");

  if (p > 1) {
    const auto partitions = partition_sequence(p);
    int stage_no = 0;
    for (const auto& part : partitions) {
      ++stage_no;
      const Index half = static_cast<Index>(part.size());
      if (cfg.strategy4_mode == Strategy4Mode::Retraction) {
        // mode A: Gr(n, p/2) on the selected columns, full-space retraction
        Matrix xs = Matrix::Zero(n, half);
        for (Index j = 0; j < half; ++j) {
          xs(positions[static_cast<std::size_t>(part[static_cast<std::size_t>(j)])], j) = 1.0;
        }
        RotationTracker tracker(n, half);
        GrassmannProblem prob((SymmetricMatrix(0.5 * sym_of(h_cur))));
        PhaseResult res = solve_phase(prob, StiefelPoint(std::move(xs)), cfg, &tracker);
        out.final_grad_norm = res.records.back().grad_norm;
        append_phase(out.all_records, out.phases, "stage " + std::to_string(stage_no),
                     res.records);
        h_cur = 0.5 * sym_of(tracker.left().transpose() * h_cur * tracker.left());
        r_total = r_total * tracker.left();
      } else {
        // mode B: Stiefel solve over the whole p-frame with K = ±1 on the
        // partition, splitting each cell into its minimal/maximal halves
        Vector k_signs = Vector::Constant(p, -1.0);
        for (int idx : part) k_signs(idx) = 1.0;
        Matrix xs = Matrix::Zero(n, p);
        for (Index j = 0; j < p; ++j) xs(positions[static_cast<std::size_t>(j)], j) = 1.0;
        RotationTracker tracker(n, p);
        StiefelProblem prob =
            StiefelProblem::with_degenerate_k(SymmetricMatrix(0.5 * sym_of(h_cur)), k_signs);
        PhaseResult res = solve_phase(prob, StiefelPoint(std::move(xs)), cfg, &tracker);
        out.final_grad_norm = res.records.back().grad_norm;
        append_phase(out.all_records, out.phases, "stage " + std::to_string(stage_no),
                     res.records);
        // embed the right rotation on the p-block positions
        Matrix w = Matrix::Identity(n, n);
        for (Index i = 0; i < p; ++i) {
          for (Index j = 0; j < p; ++j) {
            w(positions[static_cast<std::size_t>(i)], positions[static_cast<std::size_t>(j)]) =
                tracker.right()(i, j);
          }
        }
        const Matrix r_stage = tracker.left() * w;
        h_cur = 0.5 * sym_of(r_stage.transpose() * h_cur * r_stage);
        r_total = r_total * r_stage;
      }
      check_stage(stage_no, "stage " + std::to_string(stage_no));
    }
  }

  std::vector<std::pair<double, Index>> diag;
  diag.reserve(static_cast<std::size_t>(p));
  for (Index j = 0; j < p; ++j) {
    const Index g = positions[static_cast<std::size_t>(j)];
    diag.emplace_back(h_cur(g, g), g);
  }
  std::sort(diag.begin(), diag.end());
  out.eigenvalues.reserve(diag.size());
  Matrix vecs(n, p);
  // H ≈ R_total H_final R_totalᵀ, so the column of R_totalᵀ... the conjugation
  // used is H_final = R_totᵀ H R_tot, hence eigenvector j is R_tot·e_{g_j}.
  for (Index j = 0; j < p; ++j) {
    out.eigenvalues.push_back(diag[static_cast<std::size_t>(j)].first);
    vecs.col(j) = r_total.col(diag[static_cast<std::size_t>(j)].second);
  }
  out.eigenvectors = std::move(vecs);
  return out;
}

SolveResult<StiefelPoint> solve_subspace_rotation(const SymmetricMatrix& e, const Vector& k_diag,
                                                  const OptimizerSpec& optimizer) {
  const Index p = e.dim();
  StiefelProblem prob(e, k_diag);
  ClassicalModel<StiefelProblem> model(prob);

  // K-optimal column order: the largest weight takes the smallest diagonal
  std::vector<Index> k_rank(static_cast<std::size_t>(p));
  std::iota(k_rank.begin(), k_rank.end(), Index(0));
  std::stable_sort(k_rank.begin(), k_rank.end(),
                   [&](Index a, Index b) { return k_diag(a) > k_diag(b); });

  SolveResult<StiefelPoint> res{StiefelPoint{Matrix::Identity(p, p)}, {}, false};
  // every column permutation of an eigenbasis is a critical point, so the
  // solver can stop at a mis-ordered (saddle) arrangement; permuting the
  // columns strictly lowers the cost and a re-solve then settles the order
  for (Index round = 0; round <= p; ++round) {
    auto solved = optimizer.type == OptimizerType::Rtr ? solve_rtr(model, res.x, optimizer.tr)
                                                       : solve_rcg(model, res.x, optimizer.cg);
    res.x = solved.x;
    for (auto& r : solved.records) {
      r.iter += res.records.empty() ? 0 : res.records.back().iter + 1;
    }
    res.records.insert(res.records.end(), solved.records.begin(), solved.records.end());
    res.converged = solved.converged;
    if (!res.converged) break;

    const Vector diag = (res.x.mat().transpose() * e.mat() * res.x.mat()).diagonal();
    std::vector<Index> value_rank(static_cast<std::size_t>(p));
    std::iota(value_rank.begin(), value_rank.end(), Index(0));
    std::stable_sort(value_rank.begin(), value_rank.end(),
                     [&](Index a, Index b) { return diag(a) < diag(b); });
    Matrix perm = Matrix::Zero(p, p);
    bool identity = true;
    for (Index r = 0; r < p; ++r) {
      const Index from = value_rank[static_cast<std::size_t>(r)];
      const Index to = k_rank[static_cast<std::size_t>(r)];
      perm(from, to) = 1.0;
      if (from != to) identity = false;
    }
    if (identity) break;
    res.x = StiefelPoint(res.x.mat() * perm);
  }
  if (!res.converged) {
    throw ConvergenceError("strategy3_subspace_opt: subspace optimization stalled at gradient " +
                           std::to_string(res.records.back().grad_norm));
  }
  return res;
}

}  // namespace

SymmetricMatrix load_hamiltonian(const HamiltonianSource& src) {
  switch (src.format) {
    case HamiltonianSource::Format::MatrixMarket: {
      Matrix m = read_matrix_market_file(src.path);
      if (m.rows() != m.cols()) throw ParseError("Hamiltonian must be square: " + src.path);
      return SymmetricMatrix(0.5 * sym_of(m), 1e-10);
    }
    case HamiltonianSource::Format::Fcidump: {
      const FcidumpData data = parse_fcidump_file(src.path);
      return SymmetricMatrix(pauli_to_matrix(build_jw_hamiltonian(data)));
    }
    case HamiltonianSource::Format::PauliText: {
      std::ifstream in(src.path);
      if (!in) throw ParseError("cannot open '" + src.path + "'");
      return SymmetricMatrix(pauli_to_matrix(PauliSum::from_text(in)));
    }
  }
  throw std::invalid_argument("load_hamiltonian: unknown format");
}

std::vector<std::vector<int>> partition_sequence(Index p) {
  if (p < 2 || !is_power_of_two(p)) {
    throw std::invalid_argument("partition_sequence: p must be a power of two >= 2, got " +
                                std::to_string(p));
  }
  int bits = 0;
  while ((Index(1) << bits) < p) ++bits;
  std::vector<std::vector<int>> seq;
  for (int k = 1; k <= bits; ++k) {
    std::vector<int> part;
    const int bit = bits - k;
    for (int i = 0; i < p; ++i) {
      if ((i >> bit) & 1) part.push_back(i);
    }
    seq.push_back(std::move(part));
  }
  return seq;
}

SubspaceEigen strategy2_diagonalize(const SymmetricMatrix& e) {
  SymEig eig = sym_eig(e);
  return {std::move(eig.values), std::move(eig.vectors)};
}

Matrix strategy3_subspace_opt(const SymmetricMatrix& e, const Vector& k_diag,
                              const OptimizerSpec& optimizer) {
  if (k_diag.size() != e.dim()) {
    throw std::invalid_argument("strategy3_subspace_opt: K size must equal the subspace dim");
  }
  return solve_subspace_rotation(e, k_diag, optimizer).x.mat();
}

Matrix overlap_matrix(const StiefelPoint& x, const SymmetricMatrix& h) {
  const SymEig eig = sym_eig(h);
  const Matrix v = eig.vectors.leftCols(x.p());
  return (x.mat().transpose() * v).array().square();
}

double principal_overlap(const StiefelPoint& x, const SymmetricMatrix& h) {
  const SymEig eig = sym_eig(h);
  const Matrix v = eig.vectors.leftCols(x.p());
  return (v.transpose() * x.mat()).squaredNorm() / static_cast<double>(x.p());
}

Matrix sampled_subspace_energy(const StiefelPoint& frame, const PauliSum& h_ps, long long shots,
                               std::uint64_t seed) {
  const EntangledState state = prepare_state(frame);
  const Index p = frame.p();
  const Index anc = state.anc_dim();
  Matrix e(p, p);
  for (Index k = 0; k < p; ++k) {
    for (Index j = k; j < p; ++j) {
      Matrix proj = Matrix::Zero(anc, anc);
      if (k == j) {
        proj(k, k) = 1.0;
      } else {
        proj(k, j) = proj(j, k) = 0.5;  // sy(|k⟩⟨j|)
      }
      const PauliSum obs = pauli_kron(pauli_decompose(proj), h_ps);
      const auto est =
          sample_expectation(state, obs, shots, seed + 7919u * static_cast<std::uint64_t>(k) +
                                                    static_cast<std::uint64_t>(j));
      const double value = static_cast<double>(p) * est.estimate;
      e(k, j) = value;
      e(j, k) = value;
    }
  }
  // the symmetrized off-diagonal projector measures ½(E_kj + E_jk) = E_kj
  return e;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return from_json(j);
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig cfg;
  std::vector<std::string> errors;

  auto fail = [&](const std::string& msg) { errors.push_back(msg); };

  if (!j.contains("hamiltonian") || !j["hamiltonian"].is_object()) {
    fail("missing 'hamiltonian' object");
  } else {
    const auto& h = j["hamiltonian"];
    if (!h.contains("path") || !h["path"].is_string()) {
      fail("hamiltonian.path must be a string");
    } else {
      cfg.hamiltonian.path = h["path"].get<std::string>();
    }
    const std::string fmt = h.value("format", "matrixmarket");
    if (fmt == "matrixmarket") cfg.hamiltonian.format = HamiltonianSource::Format::MatrixMarket;
    else if (fmt == "fcidump") cfg.hamiltonian.format = HamiltonianSource::Format::Fcidump;
    else if (fmt == "pauli") cfg.hamiltonian.format = HamiltonianSource::Format::PauliText;
    else fail("hamiltonian.format must be matrixmarket|fcidump|pauli, got '" + fmt + "'");
  }

  if (j.contains("sector")) {
    const auto& s = j["sector"];
    if (!s.is_object() || !s.contains("n_electrons") || !s.contains("sz_twice")) {
      fail("sector needs integer fields n_electrons and sz_twice");
    } else {
      cfg.sector = SectorSpec{s["n_electrons"].get<int>(), s["sz_twice"].get<int>()};
    }
  }

  cfg.p = j.value("p", 1);
  if (cfg.p < 1) fail("p must be >= 1");

  if (j.contains("manifold")) {
    const std::string m = j["manifold"].get<std::string>();
    if (m == "grassmann") cfg.manifold = ManifoldKind::Grassmann;
    else if (m == "stiefel") cfg.manifold = ManifoldKind::Stiefel;
    else fail("manifold must be grassmann|stiefel, got '" + m + "'");
  }

  cfg.strategy = j.value("strategy", 2);
  if (cfg.strategy < 1 || cfg.strategy > 4) fail("strategy must be in 1..4");
  if (cfg.strategy == 1 && cfg.manifold && *cfg.manifold != ManifoldKind::Stiefel) {
    fail("strategy 1 requires the Stiefel manifold");
  }
  if (cfg.strategy >= 2 && cfg.manifold && *cfg.manifold != ManifoldKind::Grassmann) {
    fail("strategies 2-4 start on the Grassmannian");
  }

  if (j.contains("optimizer")) {
    const auto& o = j["optimizer"];
    const std::string type = o.value("type", "rtr");
    if (type == "rtr") cfg.optimizer.type = OptimizerType::Rtr;
    else if (type == "rcg") cfg.optimizer.type = OptimizerType::Rcg;
    else fail("optimizer.type must be rtr|rcg, got '" + type + "'");
    auto& tr = cfg.optimizer.tr;
    tr.initial_radius = o.value("initial_radius", tr.initial_radius);
    tr.max_radius = o.value("max_radius", 4.0 * tr.initial_radius);
    tr.max_inner_cg = o.value("max_inner_cg", tr.max_inner_cg);
    tr.grad_tol = o.value("grad_tol", tr.grad_tol);
    tr.max_outer = o.value("max_outer", tr.max_outer);
    tr.accept_rho = o.value("accept_rho", tr.accept_rho);
    tr.expand_rho = o.value("expand_rho", tr.expand_rho);
    auto& cg = cfg.optimizer.cg;
    cg.grad_tol = o.value("grad_tol", cg.grad_tol);
    cg.max_iter = o.value("max_iter", cg.max_iter);
    cg.armijo_c1 = o.value("armijo_c1", cg.armijo_c1);
    cg.backtrack_factor = o.value("backtrack_factor", cg.backtrack_factor);
    cg.initial_step = o.value("initial_step", cg.initial_step);
    if (tr.initial_radius <= 0 || tr.initial_radius > tr.max_radius) {
      fail("optimizer: need 0 < initial_radius <= max_radius");
    }
    if (tr.max_inner_cg < 1) fail("optimizer.max_inner_cg must be >= 1");
    if (cg.armijo_c1 <= 0 || cg.armijo_c1 >= 1) fail("optimizer.armijo_c1 must be in (0,1)");
    if (cg.backtrack_factor <= 0 || cg.backtrack_factor >= 1) {
      fail("optimizer.backtrack_factor must be in (0,1)");
    }
  }

  if (j.contains("backend")) {
    const auto& b = j["backend"];
    const std::string type = b.value("type", "classical");
    if (type == "classical") cfg.backend.type = BackendType::Classical;
    else if (type == "statevector-exact") cfg.backend.type = BackendType::StatevectorExact;
    else if (type == "statevector-shots") cfg.backend.type = BackendType::StatevectorShots;
    else fail("backend.type must be classical|statevector-exact|statevector-shots");
    cfg.backend.shots = b.value("shots", cfg.backend.shots);
    cfg.backend.seed = b.value("seed", cfg.backend.seed);
    if (cfg.backend.type == BackendType::StatevectorShots && cfg.backend.shots < 1) {
      fail("backend.shots must be >= 1");
    }
  }

  if (j.contains("k_diagonal")) {
    if (!j["k_diagonal"].is_array()) {
      fail("k_diagonal must be an array of reals");
    } else {
      cfg.k_diagonal = j["k_diagonal"].get<std::vector<double>>();
      if (cfg.k_diagonal->size() != static_cast<std::size_t>(cfg.p)) {
        fail("k_diagonal size must equal p");
      }
    }
  }

  cfg.alpha = j.value("alpha", 0.0);
  if (cfg.alpha < 0.0 || cfg.alpha > 1.0) fail("alpha must be in [0,1]");
  cfg.trotter_steps = j.value("trotter_steps", 0);
  if (cfg.trotter_steps < 0) fail("trotter_steps must be >= 0");
  if (j.contains("strategy4_mode")) {
    const std::string m = j["strategy4_mode"].get<std::string>();
    if (m == "retraction") cfg.strategy4_mode = Strategy4Mode::Retraction;
    else if (m == "signed-k") cfg.strategy4_mode = Strategy4Mode::SignedK;
    else fail("strategy4_mode must be retraction|signed-k");
  }
  cfg.stage_residual_tol = j.value("stage_residual_tol", cfg.stage_residual_tol);
  cfg.report_overlaps = j.value("report_overlaps", cfg.report_overlaps);
  cfg.output_dir = j.value("output_dir", cfg.output_dir);

  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
  return cfg;
}

json RunReport::to_json() const {
  json j;
  j["eigenvalues"] = eigenvalues;
  j["final_grad_norm"] = final_grad_norm;
  json phases = json::array();
  for (const auto& p : iterations) {
    phases.push_back({{"phase", p.phase}, {"iterations", p.iterations}});
  }
  j["iterations"] = phases;
  if (overlaps) {
    json rows = json::array();
    for (Index i = 0; i < overlaps->rows(); ++i) {
      json row = json::array();
      for (Index k = 0; k < overlaps->cols(); ++k) row.push_back((*overlaps)(i, k));
      rows.push_back(row);
    }
    j["overlaps"] = rows;
  }
  j["wall_time"] = wall_time;
  return j;
}

namespace {
void dispatch_strategy(const RunConfig& cfg, const SymmetricMatrix& h, const Vector& k,
                       const StiefelPoint& x0, RunReport& report,
                       std::vector<IterationRecord>& all_records, StiefelPoint& final_frame);
}  // namespace

RunReport run(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();

  SymmetricMatrix h = load_hamiltonian(cfg.hamiltonian);
  if (cfg.sector) {
    h = sector_project(h, cfg.sector->n_electrons, cfg.sector->sz_twice).second;
  }
  const Index n = h.dim();

  {
    std::vector<std::string> errors;
    if (cfg.p > n) errors.push_back("p exceeds the Hamiltonian dimension " + std::to_string(n));
    if (cfg.strategy >= 2 && cfg.p == n) {
      errors.push_back("Grassmann strategies need p < n (Gr(n,n) is trivial)");
    }
    if (cfg.backend.type != BackendType::Classical && !is_power_of_two(n)) {
      errors.push_back("statevector backends need a power-of-two dimension, got " +
                       std::to_string(n));
    }
    if (cfg.strategy == 4 && !is_power_of_two(cfg.p)) {
      errors.push_back("strategy 4 needs p to be a power of two");
    }
    if ((cfg.strategy == 1 || cfg.strategy == 3) && cfg.k_diagonal) {
      const auto& kd = *cfg.k_diagonal;
      for (std::size_t i = 0; i < kd.size(); ++i) {
        for (std::size_t l = i + 1; l < kd.size(); ++l) {
          if (kd[i] == kd[l]) {
            errors.push_back("k_diagonal entries must be pairwise distinct");
            i = kd.size();
            break;
          }
        }
      }
    }
    if (!errors.empty()) {
      std::string msg = "invalid configuration:";
      for (const auto& e : errors) msg += "\n  - " + e;
      throw ConfigError(msg);
    }
  }

  RunReport report;
  std::vector<IterationRecord> all_records;
  const StiefelPoint x0 = screen_initial_frame(h, cfg.p);
  const Vector k = effective_k(cfg);
  StiefelPoint final_frame = x0;

  try {
    dispatch_strategy(cfg, h, k, x0, report, all_records, final_frame);
  } catch (const StagnationError& e) {
    // leave a partial log behind so the stalled run can be inspected
    append_phase(all_records, report.iterations, "stalled", e.records());
    report.final_grad_norm =
        e.records().empty() ? std::numeric_limits<double>::quiet_NaN()
                            : e.records().back().grad_norm;
    report.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_outputs(cfg, report, all_records);
    throw;
  }

  if (cfg.backend.type == BackendType::StatevectorShots) {
    // re-estimate the reported spectrum with finite shots on the final frame
    const PauliSum h_ps = pauli_decompose(h.mat());
    const Matrix e_sampled =
        sampled_subspace_energy(final_frame, h_ps, cfg.backend.shots, cfg.backend.seed);
    const SymEig eig = sym_eig(SymmetricMatrix(0.5 * sym_of(e_sampled)));
    report.eigenvalues.assign(eig.values.begin(), eig.values.end());
  }

  if (cfg.report_overlaps) report.overlaps = overlap_matrix(final_frame, h);
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_outputs(cfg, report, all_records);
  return report;
}

namespace {

void dispatch_strategy(const RunConfig& cfg, const SymmetricMatrix& h, const Vector& k,
                       const StiefelPoint& x0, RunReport& report,
                       std::vector<IterationRecord>& all_records, StiefelPoint& final_frame) {
  switch (cfg.strategy) {
    case 1: {
      StiefelProblem prob(h, k);
      PhaseResult res = solve_phase(prob, x0, cfg, nullptr);
      append_phase(all_records, report.iterations, "stiefel", res.records);
      report.final_grad_norm = res.records.back().grad_norm;
      final_frame = res.frame;
      Vector diag = res.subspace_energy.diagonal();
      std::sort(diag.begin(), diag.end());
      report.eigenvalues.assign(diag.begin(), diag.end());
      break;
    }
    case 2: {
      GrassmannProblem prob(h);
      PhaseResult res = solve_phase(prob, x0, cfg, nullptr);
      append_phase(all_records, report.iterations, "grassmann", res.records);
      report.final_grad_norm = res.records.back().grad_norm;
      const auto sub = strategy2_diagonalize(SymmetricMatrix(0.5 * sym_of(res.subspace_energy)));
      report.eigenvalues.assign(sub.eigenvalues.begin(), sub.eigenvalues.end());
      final_frame = StiefelPoint(res.frame.mat() * sub.rotation);
      break;
    }
    case 3: {
      GrassmannProblem prob(h);
      PhaseResult res = solve_phase(prob, x0, cfg, nullptr);
      append_phase(all_records, report.iterations, "grassmann", res.records);
      const SymmetricMatrix e(0.5 * sym_of(res.subspace_energy));
      auto sub = solve_subspace_rotation(e, k, cfg.optimizer);
      append_phase(all_records, report.iterations, "subspace", sub.records);
      report.final_grad_norm = sub.records.back().grad_norm;
      const Matrix& q = sub.x.mat();
      Vector diag = (q.transpose() * e.mat() * q).diagonal();
      final_frame = StiefelPoint(res.frame.mat() * q);
      std::sort(diag.begin(), diag.end());
      report.eigenvalues.assign(diag.begin(), diag.end());
      break;
    }
    case 4: {
      Strategy4Outcome res = strategy4_block_diag(h, cfg);
      all_records = std::move(res.all_records);
      report.iterations = std::move(res.phases);
      report.final_grad_norm = res.final_grad_norm;
      report.eigenvalues = std::move(res.eigenvalues);
      final_frame = StiefelPoint(res.eigenvectors);
      break;
    }
    default:
      throw ConfigError("strategy must be in 1..4");
  }
}

}  // namespace

}  // namespace qmanopt
