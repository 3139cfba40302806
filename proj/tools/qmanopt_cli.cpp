// Command-line front end: solve (strategy pipelines), check (derivative
// slopes), spectrum (dense oracle), convert (FCIDUMP to matrix/pauli text).
// Exit codes: 0 success, 2 configuration error, 3 convergence failure,
// 4 I/O or parse error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "qmanopt/errors.hpp"
#include "qmanopt/fcidump.hpp"
#include "qmanopt/jordan_wigner.hpp"
#include "qmanopt/matrix_market.hpp"
#include "qmanopt/problems.hpp"
#include "qmanopt/sector.hpp"
#include "qmanopt/strategies.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitConvergence = 3;
constexpr int kExitIo = 4;

qmanopt::HamiltonianSource::Format parse_format(const std::string& fmt) {
  if (fmt == "matrixmarket") return qmanopt::HamiltonianSource::Format::MatrixMarket;
  if (fmt == "fcidump") return qmanopt::HamiltonianSource::Format::Fcidump;
  if (fmt == "pauli") return qmanopt::HamiltonianSource::Format::PauliText;
  throw qmanopt::ConfigError("unknown Hamiltonian format '" + fmt + "'");
}

qmanopt::HamiltonianSource::Format guess_format(const std::string& path) {
  auto ends_with = [&](const char* suffix) {
    const std::string s(suffix);
    return path.size() >= s.size() && path.compare(path.size() - s.size(), s.size(), s) == 0;
  };
  if (ends_with(".fcidump") || ends_with(".FCIDUMP")) {
    return qmanopt::HamiltonianSource::Format::Fcidump;
  }
  if (ends_with(".pauli") || ends_with(".txt")) {
    return qmanopt::HamiltonianSource::Format::PauliText;
  }
  return qmanopt::HamiltonianSource::Format::MatrixMarket;
}

int run_solve(const std::string& config_path) {
  const qmanopt::RunConfig cfg = qmanopt::RunConfig::from_file(config_path);
  try {
    const qmanopt::RunReport report = qmanopt::run(cfg);
    std::cout << "eigenvalues:";
    for (double v : report.eigenvalues) std::cout << " " << v;
    std::cout << "\nfinal gradient norm: " << report.final_grad_norm << "\n";
    std::cout << "outputs written to " << cfg.output_dir << "\n";
    return kExitOk;
  } catch (const qmanopt::StagnationError& e) {
    // emit a partial log so the run can be inspected
    std::cerr << "solver stagnated: " << e.what() << "\n";
    return kExitConvergence;
  }
}

int run_check(bool grad, bool hess, int n, int p, const std::string& manifold,
              std::uint64_t seed) {
  using namespace qmanopt;
  if (n < 2 || p < 1 || p > n) throw ConfigError("check: need n >= 2 and 1 <= p <= n");
  std::mt19937_64 rng(seed);
  Matrix g = gaussian_matrix(n, n, rng);
  const SymmetricMatrix h(0.5 * (g + g.transpose()));
  const StiefelPoint x = random_point(n, p, rng);

  auto report = [&](const char* what, double slope, double lo, double hi) {
    const bool ok = slope >= lo && slope <= hi;
    std::printf("%-8s slope %.4f  (target [%.1f, %.1f])  %s\n", what, slope, lo, hi,
                ok ? "PASS" : "FAIL");
    return ok;
  };

  bool ok = true;
  if (manifold == "gr") {
    if (p == n) throw ConfigError("check: Grassmann needs p < n");
    GrassmannProblem prob(h);
    if (grad) ok &= report("gradient", fd_check_gradient(prob, x, seed), 1.9, 2.1);
    if (hess) ok &= report("hessian", fd_check_hessian(prob, x, seed), 2.9, 3.1);
  } else if (manifold == "st") {
    StiefelProblem prob(h, StiefelProblem::default_k(p));
    if (grad) ok &= report("gradient", fd_check_gradient(prob, x, seed), 1.9, 2.1);
    if (hess) ok &= report("hessian", fd_check_hessian(prob, x, seed), 2.9, 3.1);
  } else {
    throw ConfigError("check: manifold must be gr or st");
  }
  return ok ? kExitOk : kExitConvergence;
}

int run_spectrum(const std::string& path, const std::string& format, int k,
                 const std::optional<std::pair<int, int>>& sector) {
  using namespace qmanopt;
  HamiltonianSource src{path, format.empty() ? guess_format(path) : parse_format(format)};
  SymmetricMatrix h = load_hamiltonian(src);
  if (sector) h = sector_project(h, sector->first, sector->second).second;
  if (k < 1 || k > h.dim()) throw ConfigError("spectrum: k out of range");
  const SymEig eig = sym_eig(h);
  std::cout << "index,eigenvalue\n";
  std::cout.precision(17);
  for (int i = 0; i < k; ++i) std::cout << i << "," << eig.values(i) << "\n";
  return kExitOk;
}

int run_convert(const std::string& fcidump_path, const std::string& out_kind,
                const std::string& out_path) {
  using namespace qmanopt;
  const FcidumpData data = parse_fcidump_file(fcidump_path);
  const PauliSum ps = build_jw_hamiltonian(data);
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw ParseError("cannot open '" + out_path + "' for writing");
    out = &file;
  }
  if (out_kind == "pauli") {
    *out << "# Jordan-Wigner Hamiltonian from " << fcidump_path << "\n" << ps.to_text();
  } else if (out_kind == "matrix") {
    write_matrix_market(*out, pauli_to_matrix(ps));
  } else {
    throw ConfigError("convert: --out must be matrix or pauli");
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riemannian eigensolver over Stiefel/Grassmannian frames"};
  app.require_subcommand(1);

  std::string config_path;
  auto* solve = app.add_subcommand("solve", "run a strategy pipeline from a JSON config");
  solve->add_option("--config", config_path, "JSON run configuration")->required();

  bool check_grad = false, check_hess = false;
  int check_n = 8, check_p = 2;
  std::string check_manifold = "gr";
  std::uint64_t check_seed = 0;
  auto* check = app.add_subcommand("check", "finite-difference derivative checks");
  check->add_flag("--grad", check_grad, "check the Riemannian gradient");
  check->add_flag("--hess", check_hess, "check the Riemannian Hessian");
  check->add_option("--n", check_n, "ambient dimension");
  check->add_option("--p", check_p, "frame width");
  check->add_option("--manifold", check_manifold, "gr or st");
  check->add_option("--seed", check_seed, "random seed");

  std::string spec_path, spec_format;
  int spec_k = 1;
  std::vector<int> spec_sector;
  auto* spectrum = app.add_subcommand("spectrum", "dense-oracle eigenvalues");
  spectrum->add_option("--hamiltonian", spec_path, "Hamiltonian file")->required();
  spectrum->add_option("--format", spec_format, "matrixmarket|fcidump|pauli (default: by suffix)");
  spectrum->add_option("--k", spec_k, "number of lowest eigenvalues");
  spectrum->add_option("--sector", spec_sector, "N 2Sz symmetry sector")->expected(2);

  std::string conv_fcidump, conv_out = "pauli", conv_path;
  auto* convert = app.add_subcommand("convert", "FCIDUMP to dense matrix or Pauli text");
  convert->add_option("--fcidump", conv_fcidump, "FCIDUMP input")->required();
  convert->add_option("--out", conv_out, "matrix|pauli");
  convert->add_option("--output", conv_path, "output path (default: stdout)");

  try {
    app.parse(argc, argv);
    if (solve->parsed()) return run_solve(config_path);
    if (check->parsed()) {
      if (!check_grad && !check_hess) check_grad = check_hess = true;
      return run_check(check_grad, check_hess, check_n, check_p, check_manifold, check_seed);
    }
    if (spectrum->parsed()) {
      std::optional<std::pair<int, int>> sector;
      if (!spec_sector.empty()) sector = {spec_sector[0], spec_sector[1]};
      return run_spectrum(spec_path, spec_format, spec_k, sector);
    }
    if (convert->parsed()) return run_convert(conv_fcidump, conv_out, conv_path);
    return kExitConfig;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitConfig;
  } catch (const qmanopt::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const qmanopt::ConstraintError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const qmanopt::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const qmanopt::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const qmanopt::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
