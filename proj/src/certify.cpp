#include "robin/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "robin/errors.hpp"

namespace robin {

namespace {

bool covers(double a, double b, double C, int K) {
  const double step = a / (4.0 * C);
  return a + K * step >= b + step;
}

void require_bounds(double a, double b) {
  if (!(a > 0.0) || !(a < b) || !std::isfinite(b)) throw DomainError("probe grid: bounds must satisfy 0 < a < b");
}

}  // namespace

int probe_count(double a, double b, double C) {
  require_bounds(a, b);
  if (!(C > 0.0)) throw DomainError("probe grid: C must be positive");
  const double estimate = 1.0 + 4.0 * C * (b - a) / a;
  if (estimate > 1e7) throw DomainError("probe grid: b/a too large");
  int K = std::max(2, static_cast<int>(std::ceil(estimate)));
  while (K > 2 && covers(a, b, C, K - 1)) --K;
  while (!covers(a, b, C, K)) ++K;
  return K;
}

ProbeGrid probe_grid(double a, double b, int n, double C) {
  if (n < 2) throw DomainError("probe grid: n must be at least 2");
  ProbeGrid grid;
  grid.a = a;
  grid.b = b;
  grid.C = C;
  grid.n = n;
  grid.K = probe_count(a, b, C);
  return grid;
}

Vector ProbeGrid::point(int j, int k) const {
  Vector z = Vector::Constant(n, 0.5 * a);
  z[j] = a + k * a / (4.0 * C);
  return z;
}

Vector ProbeGrid::direction(int j) const {
  Vector d = Vector::Constant(n, (2.0 * b - a) / a * C);
  d[j] = -0.5;
  return d;
}

CriterionResult criterion_lambda(const AssembledSystem& sys, double a, double b, double C, Exec exec) {
  CriterionResult result;
  result.grid = probe_grid(a, b, sys.n, C);
  result.m = sys.m;
  const ProbeGrid& grid = result.grid;
  const int per_dir = grid.probes_per_direction();

  result.table.resize(grid.n, per_dir);
  for_each_index(exec, static_cast<std::size_t>(grid.n * per_dir), [&](std::size_t idx) {
    const int j = static_cast<int>(idx) / per_dir;
    const int col = static_cast<int>(idx) % per_dir;
    const Linearization lin(sys, grid.point(j, col + 2));
    result.table(j, col) = max_eig(lin.derivative(grid.direction(j)));
  });

  result.lambda = result.table.minCoeff();
  result.satisfied = result.lambda > 0.0;
  return result;
}

Vector directional_lambdas(const AssembledSystem& sys, const Vector& x, double C) {
  require_positive(sys, x, "directional_lambdas");
  const Linearization lin(sys, x);
  Vector out(sys.n);
  for (int j = 0; j < sys.n; ++j) {
    Vector d = Vector::Constant(sys.n, C);
    d[j] = -1.0;
    out[j] = max_eig(lin.derivative(d));
  }
  return out;
}

double lambda_at_point(const AssembledSystem& sys, const Vector& x) {
  return directional_lambdas(sys, x, 1.0).minCoeff();
}

ElectrodeSweep min_electrodes(const GeometryConfig& family, int refinement, const Conductivity& sigma, int n,
                              double a, double b, double C, int m_max, Exec exec) {
  if (m_max < 2) throw DomainError("min_electrodes: m_max must be at least 2");
  ElectrodeSweep sweep;
  for (int m = 2; m <= m_max; ++m) {
    GeometryConfig cfg = family;
    cfg.n = n;
    cfg.m = m;
    const Geometry geometry = build_geometry(cfg);
    const AssembledSystem sys = assemble(generate_mesh(geometry, refinement), geometry, sigma, exec);
    const CriterionResult crit = criterion_lambda(sys, a, b, C, exec);
    sweep.ms.push_back(m);
    sweep.lambdas.push_back(crit.lambda);
    if (crit.satisfied && !sweep.m_min) sweep.m_min = m;
  }
  return sweep;
}

}  // namespace robin
