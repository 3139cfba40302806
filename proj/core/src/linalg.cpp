#include "qmanopt/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <string>

namespace qmanopt {

namespace {

void require_square(const Matrix& m, const char* who) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument(std::string(who) + ": matrix must be square, got " +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void require_finite(const Matrix& m, const char* who) {
  if (!m.allFinite()) throw std::invalid_argument(std::string(who) + ": non-finite entries");
}

}  // namespace

SymmetricMatrix::SymmetricMatrix(Matrix m, double tol) {
  require_square(m, "SymmetricMatrix");
  require_finite(m, "SymmetricMatrix");
  const double dev = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (dev > tol) {
    throw ConstraintError("SymmetricMatrix: asymmetry " + std::to_string(dev) +
                          " exceeds tolerance " + std::to_string(tol));
  }
  m_ = 0.5 * (m + m.transpose());
}

SymmetricMatrix SymmetricMatrix::identity(Index dim) {
  return SymmetricMatrix(Matrix::Identity(dim, dim));
}

SymmetricMatrix SymmetricMatrix::zero(Index dim) {
  return SymmetricMatrix(Matrix::Zero(dim, dim));
}

SkewMatrix::SkewMatrix(Matrix m, double tol) {
  require_square(m, "SkewMatrix");
  require_finite(m, "SkewMatrix");
  const double dev = (m + m.transpose()).cwiseAbs().maxCoeff();
  if (dev > tol) {
    throw ConstraintError("SkewMatrix: symmetry residual " + std::to_string(dev) +
                          " exceeds tolerance " + std::to_string(tol));
  }
  m_ = 0.5 * (m - m.transpose());
}

SkewMatrix SkewMatrix::zero(Index dim) { return SkewMatrix(Matrix::Zero(dim, dim)); }

std::pair<SymmetricMatrix, SkewMatrix> split_sym_skew(const Matrix& a) {
  require_square(a, "split_sym_skew");
  Matrix sy = 0.5 * (a + a.transpose());
  Matrix sk = 0.5 * (a - a.transpose());
  return {SymmetricMatrix(std::move(sy)), SkewMatrix(std::move(sk))};
}

Matrix expm_skew(const SkewMatrix& l, double t) {
  Matrix q = (t * l.mat()).exp();
  const Index n = q.rows();
  const double ortho = (q.transpose() * q - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (ortho > 1e-10) {
    throw NumericalError("expm_skew: output lost orthogonality, deviation " +
                         std::to_string(ortho));
  }
  return q;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Vector vectorize(const Matrix& x) {
  return Eigen::Map<const Vector>(x.data(), x.size());
}

Matrix unvectorize(const Vector& v, Index rows, Index cols) {
  if (v.size() != rows * cols) {
    throw std::invalid_argument("unvectorize: length " + std::to_string(v.size()) +
                                " does not match " + std::to_string(rows) + "x" +
                                std::to_string(cols));
  }
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

double trace_inner(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("trace_inner: shape mismatch");
  }
  return a.cwiseProduct(b).sum();
}

SymEig sym_eig(const SymmetricMatrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s.mat());
  if (solver.info() != Eigen::Success) {
    throw NumericalError("sym_eig: eigensolver failed to converge on dim " +
                         std::to_string(s.dim()));
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Matrix gaussian_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = gauss(rng);
  }
  return m;
}

}  // namespace qmanopt
