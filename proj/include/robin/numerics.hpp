#ifndef ROBIN_NUMERICS_HPP
#define ROBIN_NUMERICS_HPP

#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "robin/parallel.hpp"

namespace robin {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Sparse LDL^T factorization of a symmetric positive definite matrix with
/// AMD ordering (a fixed, deterministic permutation for a given pattern).
///
/// Construction fails with NotPositiveDefinite at the first pivot that is not
/// strictly positive, so building an SpdFactor doubles as a definiteness test.
class SpdFactor {
public:
  explicit SpdFactor(const SparseMatrix& a);

  SpdFactor(const SpdFactor&) = delete;
  SpdFactor& operator=(const SpdFactor&) = delete;
  SpdFactor(SpdFactor&&) = default;
  SpdFactor& operator=(SpdFactor&&) = default;

  long rows() const { return rows_; }

  Vector solve(const Vector& rhs) const;
  // Multiple right-hand sides; columns are independent and may be solved
  // in parallel.
  Matrix solve(const Matrix& rhs, Exec exec = Exec::serial) const;

  // Columns idx of A^{-1}, i.e. A^{-1} restricted to the given unit vectors.
  Matrix solve_unit(const std::vector<int>& idx, Exec exec = Exec::serial) const;

  double logdet() const { return logdet_; }
  // Pivots of the LDL^T factorization in elimination order.
  const Vector& pivots() const { return pivots_; }

private:
  using Solver = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;
  std::unique_ptr<Solver> solver_;
  Vector pivots_;
  double logdet_ = 0.0;
  long rows_ = 0;
};

inline SpdFactor spd_factorize(const SparseMatrix& a) { return SpdFactor(a); }

struct SymmetricEigen {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns, vectors.col(i) pairs with values(i)
};

// Throws DomainError when M is not symmetric to 1e-12 relative (max-norm).
SymmetricEigen eig_sym(const Matrix& m);
double min_eig(const Matrix& m);
double max_eig(const Matrix& m);

// Largest absolute eigenvalue of a symmetric matrix.
double spectral_norm_sym(const Matrix& m);

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

void require_symmetric(const Matrix& m, const char* what);

}  // namespace robin

#endif  // ROBIN_NUMERICS_HPP
