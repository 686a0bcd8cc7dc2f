#include "robin/forward.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "robin/errors.hpp"

namespace robin {

Linearization::Linearization(const AssembledSystem& sys, const Vector& gamma, Exec exec) : gamma_(gamma) {
  const SpdFactor factor(system_matrix(sys, gamma));
  potentials_ = factor.solve(sys.P, exec);
  value_ = symmetrize(sys.P.transpose() * potentials_);

  const auto g = static_cast<Eigen::Index>(sys.interface_dofs.size());
  Matrix w_interface(g, sys.m);
  for (Eigen::Index r = 0; r < g; ++r) w_interface.row(r) = potentials_.row(sys.interface_dofs[r]);

  sensitivities_.reserve(sys.n);
  for (int i = 0; i < sys.n; ++i) {
    sensitivities_.push_back(symmetrize(w_interface.transpose() * sys.B_interface[i] * w_interface));
  }
}

Matrix Linearization::derivative(const Vector& delta) const {
  if (delta.size() != static_cast<Eigen::Index>(sensitivities_.size())) {
    throw DomainError("derivative: direction has wrong length");
  }
  Matrix out = Matrix::Zero(value_.rows(), value_.cols());
  for (std::size_t i = 0; i < sensitivities_.size(); ++i) {
    out.noalias() -= delta[static_cast<Eigen::Index>(i)] * sensitivities_[i];
  }
  return symmetrize(out);
}

ForwardSolution solve_forward(const AssembledSystem& sys, const Vector& gamma, const Vector& currents) {
  if (currents.size() != sys.m) throw DomainError("solve_forward: expected one current per electrode");
  const SpdFactor factor(system_matrix(sys, gamma));
  ForwardSolution sol;
  sol.u = factor.solve(Vector(sys.P * currents));
  sol.U = sys.P.transpose() * sol.u;
  return sol;
}

Matrix measure(const AssembledSystem& sys, const Vector& gamma) { return Linearization(sys, gamma).value(); }

Matrix derivative_apply(const AssembledSystem& sys, const Vector& gamma, const Vector& delta) {
  return Linearization(sys, gamma).derivative(delta);
}

Matrix convexity_gap(const AssembledSystem& sys, const Vector& gamma, const Vector& gamma0) {
  require_positive(sys, gamma, "convexity_gap");
  const Linearization base(sys, gamma0);
  return symmetrize(measure(sys, gamma) - base.value() - base.derivative(gamma - gamma0));
}

double loewner_tol(const Matrix& m) { return 1e-10 * (1.0 + spectral_norm_sym(symmetrize(m))); }

void write_measurement(std::ostream& out, const Matrix& y) {
  const auto old_precision = out.precision(17);
  for (Eigen::Index r = 0; r < y.rows(); ++r) {
    for (Eigen::Index c = 0; c < y.cols(); ++c) out << (c ? " " : "") << y(r, c);
    out << "\n";
  }
  out.precision(old_precision);
}

Matrix read_measurement(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<double> row;
    double v = 0.0;
    while (fields >> v) row.push_back(v);
    if (!fields.eof()) throw DomainError("read_measurement: non-numeric entry");
    if (!row.empty()) rows.push_back(std::move(row));
  }
  const auto m = static_cast<Eigen::Index>(rows.size());
  if (m == 0) throw DomainError("read_measurement: empty table");
  Matrix y(m, m);
  for (Eigen::Index r = 0; r < m; ++r) {
    if (static_cast<Eigen::Index>(rows[r].size()) != m) throw DomainError("read_measurement: table is not square");
    for (Eigen::Index c = 0; c < m; ++c) y(r, c) = rows[r][c];
  }
  require_symmetric(y, "read_measurement");
  return y;
}

}  // namespace robin
