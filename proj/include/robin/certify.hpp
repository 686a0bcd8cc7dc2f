#ifndef ROBIN_CERTIFY_HPP
#define ROBIN_CERTIFY_HPP

#include <optional>
#include <vector>

#include "robin/assembly.hpp"
#include "robin/forward.hpp"

namespace robin {

/// Finite set of probe points z_{j,k} and directions d_j at which the
/// derivative of the forward map is tested.
///
///   z_{j,k} = (a/2) e_j' + (a + k a / (4C)) e_j,   k = 2..K
///   d_j     = ((2b - a)/a) C e_j' - (1/2) e_j
///
/// with e_j' = 1 - e_j. K is the smallest integer >= 2 with
/// a + K a/(4C) >= b + a/(4C), so the probe abscissae cover [a, b] with
/// steps of a/(4C). C = 1 certifies uniqueness and Lipschitz stability,
/// C = n - 1 certifies the convex reformulation.
struct ProbeGrid {
  double a = 1.0;
  double b = 3.0;
  double C = 1.0;
  int n = 2;
  int K = 2;

  // j is 0-based, k runs over 2..K as in the formulas above.
  Vector point(int j, int k) const;
  Vector direction(int j) const;
  int probes_per_direction() const { return K - 1; }
};

// Smallest K >= 2 satisfying the coverage inequality.
int probe_count(double a, double b, double C);

ProbeGrid probe_grid(double a, double b, int n, double C);

struct CriterionResult {
  ProbeGrid grid;
  // table(j, k - 2) = lambda_max(F'(z_{j,k}) d_j)
  Matrix table;
  double lambda = 0.0;  // exact minimum of the table
  bool satisfied = false;
  int m = 0;
};

// Evaluates every probe. The probes are independent; Exec::parallel spreads
// them over OpenMP threads and gives the same table as Exec::serial.
CriterionResult criterion_lambda(const AssembledSystem& sys, double a, double b, double C,
                                 Exec exec = Exec::parallel);

// lambda_max(F'(x)(C e_j' - e_j)) for each j.
Vector directional_lambdas(const AssembledSystem& sys, const Vector& x, double C);

// min_j lambda_max(F'(x)(e_j' - e_j)).
double lambda_at_point(const AssembledSystem& sys, const Vector& x);

struct ElectrodeSweep {
  std::optional<int> m_min;
  std::vector<int> ms;
  std::vector<double> lambdas;
};

// Rebuilds geometry, mesh and system for m = 2..m_max (family.n is replaced
// by n) and records lambda for each m. m_min is the first satisfying m.
ElectrodeSweep min_electrodes(const GeometryConfig& family, int refinement, const Conductivity& sigma, int n,
                              double a, double b, double C, int m_max, Exec exec = Exec::parallel);

}  // namespace robin

#endif  // ROBIN_CERTIFY_HPP
