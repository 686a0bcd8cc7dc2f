#ifndef ROBIN_ASSEMBLY_HPP
#define ROBIN_ASSEMBLY_HPP

#include <iosfwd>
#include <vector>

#include "robin/geometry.hpp"
#include "robin/numerics.hpp"

namespace robin {

/// Piecewise constant conductivity: sigma1 in the inner disc, sigma2 in the
/// surrounding annulus.
struct Conductivity {
  double sigma1 = 1.0;
  double sigma2 = 1.0;
};

/// P1 finite element system on the electrode-constrained space: every node
/// of electrode k shares one degree of freedom, so discrete potentials are
/// constant on each electrode.
///
/// B0 is the Neumann stiffness matrix, B[i] the trace mass matrix of
/// interface arc i and column k of P the indicator of electrode k's DOF. The
/// forward map is F(gamma) = P^T (B0 + sum_i gamma_i B[i])^{-1} P.
struct AssembledSystem {
  int dofs = 0;
  int n = 0;
  int m = 0;
  SparseMatrix B0;
  std::vector<SparseMatrix> B;
  Matrix P;
  std::vector<int> dof_map;         // mesh node -> DOF
  std::vector<int> electrode_dofs;  // electrode -> DOF

  // Derived data: sorted DOFs touched by some B[i], and each B[i]
  // restricted to those DOFs. Rebuilt by finalize_interface().
  std::vector<int> interface_dofs;
  std::vector<Matrix> B_interface;
};

AssembledSystem assemble(const Mesh& mesh, const Geometry& geometry, const Conductivity& sigma = {},
                         Exec exec = Exec::parallel);

// Recomputes interface_dofs and B_interface from B.
void finalize_interface(AssembledSystem& sys);

// Throws DomainError unless gamma has n strictly positive entries.
void require_positive(const AssembledSystem& sys, const Vector& gamma, const char* what);

// A(gamma) = B0 + sum_i gamma_i B[i].
SparseMatrix system_matrix(const AssembledSystem& sys, const Vector& gamma);

// Text container: dimension header, lower-triangle coordinate triplets per
// matrix, dense P. Values are written with 17 significant digits, so a
// write/read cycle reproduces the system bit for bit.
void write_system(std::ostream& out, const AssembledSystem& sys);
AssembledSystem read_system(std::istream& in);

}  // namespace robin

#endif  // ROBIN_ASSEMBLY_HPP
