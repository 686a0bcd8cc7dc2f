#ifndef ROBIN_FORWARD_HPP
#define ROBIN_FORWARD_HPP

#include <iosfwd>
#include <vector>

#include "robin/assembly.hpp"

namespace robin {

/// Measurement operator and its derivative at a fixed Robin coefficient.
///
/// Holds one factorization of A(gamma) and W = A(gamma)^{-1} P, from which
/// F(gamma) = P^T W and every directional derivative
/// F'(gamma) delta = -sum_i delta_i W^T B_i W follow without further solves.
class Linearization {
public:
  Linearization(const AssembledSystem& sys, const Vector& gamma, Exec exec = Exec::serial);

  const Vector& gamma() const { return gamma_; }
  const Matrix& value() const { return value_; }
  // W = A(gamma)^{-1} P, one column per electrode.
  const Matrix& potentials() const { return potentials_; }
  // W^T B_i W, so that F'(gamma) e_i = -sensitivities()[i].
  const std::vector<Matrix>& sensitivities() const { return sensitivities_; }

  Matrix derivative(const Vector& delta) const;

private:
  Vector gamma_;
  Matrix value_;
  Matrix potentials_;
  std::vector<Matrix> sensitivities_;
};

struct ForwardSolution {
  Vector u;  // DOF vector
  Vector U;  // electrode voltages
};

// Potential for applied electrode currents I: A(gamma) u = P I, U = P^T u.
ForwardSolution solve_forward(const AssembledSystem& sys, const Vector& gamma, const Vector& currents);

// F(gamma) = P^T A(gamma)^{-1} P, symmetrized.
Matrix measure(const AssembledSystem& sys, const Vector& gamma);

Matrix derivative_apply(const AssembledSystem& sys, const Vector& gamma, const Vector& delta);

// F(gamma) - F(gamma0) - F'(gamma0)(gamma - gamma0); positive semidefinite
// by convexity of the forward map.
Matrix convexity_gap(const AssembledSystem& sys, const Vector& gamma, const Vector& gamma0);

// Tolerance for Loewner-order checks on a matrix of this size:
// 1e-10 * (1 + ||M||_2).
double loewner_tol(const Matrix& m);

// Plain-text m x m table, row-major, whitespace separated.
void write_measurement(std::ostream& out, const Matrix& y);
Matrix read_measurement(std::istream& in);

}  // namespace robin

#endif  // ROBIN_FORWARD_HPP
