#include "robin/numerics.hpp"

#include <cmath>
#include <string>

#include "robin/errors.hpp"

namespace robin {

SpdFactor::SpdFactor(const SparseMatrix& a) : solver_(std::make_unique<Solver>()), rows_(a.rows()) {
  if (a.rows() != a.cols()) throw DomainError("spd_factorize: matrix is not square");
  solver_->compute(a);

  // While they stay positive, LDL^T pivots are the squared Cholesky
  // diagonal, so the first non-positive one marks where definiteness is
  // lost. On a zero pivot Eigen stops right after writing D(k,k) = 0.
  const Vector& d = solver_->vectorD();
  const Eigen::Index count = d.size();
  for (Eigen::Index p = 0; p < count; ++p) {
    if (!(d[p] > 0.0) || !std::isfinite(d[p])) {
      throw NotPositiveDefinite(solver_->permutationPinv().indices()(p));
    }
  }
  if (solver_->info() != Eigen::Success) throw NotPositiveDefinite(count > 0 ? count - 1 : 0);

  pivots_ = d;
  logdet_ = d.array().log().sum();
}

Vector SpdFactor::solve(const Vector& rhs) const {
  if (rhs.size() != rows_) throw DomainError("SpdFactor::solve: dimension mismatch");
  return solver_->solve(rhs);
}

Matrix SpdFactor::solve(const Matrix& rhs, Exec exec) const {
  if (rhs.rows() != rows_) throw DomainError("SpdFactor::solve: dimension mismatch");
  Matrix out(rhs.rows(), rhs.cols());
  for_each_index(exec, static_cast<std::size_t>(rhs.cols()), [&](std::size_t c) {
    const auto col = static_cast<Eigen::Index>(c);
    Vector x = solver_->solve(Vector(rhs.col(col)));
    out.col(col) = x;
  });
  return out;
}

Matrix SpdFactor::solve_unit(const std::vector<int>& idx, Exec exec) const {
  Matrix out(rows_, static_cast<Eigen::Index>(idx.size()));
  for_each_index(exec, idx.size(), [&](std::size_t c) {
    Vector e = Vector::Zero(rows_);
    e[idx[c]] = 1.0;
    Vector x = solver_->solve(e);
    out.col(static_cast<Eigen::Index>(c)) = x;
  });
  return out;
}

void require_symmetric(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) throw DomainError(std::string(what) + ": matrix is not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= 1e-12 * scale)) throw DomainError(std::string(what) + ": matrix is not symmetric");
}

SymmetricEigen eig_sym(const Matrix& m) {
  require_symmetric(m, "eig_sym");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(m));
  if (solver.info() != Eigen::Success) throw DomainError("eig_sym: eigensolver did not converge");
  return SymmetricEigen{solver.eigenvalues(), solver.eigenvectors()};
}

double min_eig(const Matrix& m) {
  require_symmetric(m, "min_eig");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

double max_eig(const Matrix& m) {
  require_symmetric(m, "max_eig");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(m.rows() - 1);
}

double spectral_norm_sym(const Matrix& m) {
  require_symmetric(m, "spectral_norm_sym");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace robin
