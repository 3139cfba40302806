#pragma once

#include <Eigen/Dense>
#include <random>
#include <utility>

#include "qmanopt/errors.hpp"

namespace qmanopt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Construction tolerance for symmetric/skew wrappers.
inline constexpr double kSymmetryTol = 1e-12;

/// Real symmetric matrix. The constructor rejects inputs whose worst
/// asymmetry exceeds `tol` and stores the exactly symmetrized matrix
/// (M + Mᵀ)/2, so downstream algebra can rely on exact symmetry.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(Matrix m, double tol = kSymmetryTol);
  static SymmetricMatrix identity(Index dim);
  static SymmetricMatrix zero(Index dim);

  const Matrix& mat() const { return m_; }
  Index dim() const { return m_.rows(); }

 private:
  Matrix m_;
};

/// Real skew-symmetric matrix; stores (M − Mᵀ)/2 after validation.
class SkewMatrix {
 public:
  explicit SkewMatrix(Matrix m, double tol = kSymmetryTol);
  static SkewMatrix zero(Index dim);

  const Matrix& mat() const { return m_; }
  Index dim() const { return m_.rows(); }

 private:
  Matrix m_;
};

/// A = sy(A) + sk(A) with sy = (A+Aᵀ)/2, sk = (A−Aᵀ)/2.
std::pair<SymmetricMatrix, SkewMatrix> split_sym_skew(const Matrix& a);

/// e^{t·L} for skew L; the result is orthogonal with unit determinant.
/// Throws NumericalError if orthogonality degrades beyond 1e-10.
Matrix expm_skew(const SkewMatrix& l, double t = 1.0);

/// Kronecker product; block (i,j) of the result equals a(i,j)·b.
Matrix kron(const Matrix& a, const Matrix& b);

/// Stack columns of x (column index slow), and the inverse map.
Vector vectorize(const Matrix& x);
Matrix unvectorize(const Vector& v, Index rows, Index cols);

/// Euclidean trace product Tr(AᵀB).
double trace_inner(const Matrix& a, const Matrix& b);

struct SymEig {
  Vector values;   // ascending
  Matrix vectors;  // orthogonal, column i pairs with values[i]
};

/// Dense symmetric eigendecomposition; the oracle used across the test
/// suites and by the classical diagonalization strategy.
SymEig sym_eig(const SymmetricMatrix& s);

/// Standard-normal matrix draw from an explicit engine (determinism).
Matrix gaussian_matrix(Index rows, Index cols, std::mt19937_64& rng);

}  // namespace qmanopt
