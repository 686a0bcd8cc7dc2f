#ifndef ROBIN_RECONSTRUCT_HPP
#define ROBIN_RECONSTRUCT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "robin/assembly.hpp"
#include "robin/certify.hpp"
#include "robin/forward.hpp"

namespace robin {

/// Linear matrix inequality form of the constraint F(gamma) <= Y_target.
///
/// With padded interface matrices B~_j = [[B_j, 0], [0, 0]] and the block
/// matrix Y = [[B0, P], [P^T, Y_target]],
///
///   sum_j gamma_j B~_j + Y >= 0   <=>   F(gamma) <= Y_target,
///
/// because Y_target - F(gamma) is the Schur complement of the positive
/// definite block B0 + sum_j gamma_j B_j.
struct LmiProblem {
  int dofs = 0;
  int n = 0;
  int m = 0;
  Matrix target;                 // Y_target (m x m)
  SparseMatrix Y;                // (D+m) x (D+m)
  std::vector<SparseMatrix> Bt;  // padded B~_j

  // sum_j gamma_j B~_j + Y + shift * [[0, 0], [0, I]]. gamma is not
  // required to be positive here.
  SparseMatrix matrix(const Vector& gamma, double shift = 0.0) const;
  // Definiteness test by attempted factorization.
  bool strictly_feasible(const Vector& gamma, double shift = 0.0) const;
  // Dense smallest eigenvalue; intended for small systems and tests.
  double min_eig(const Vector& gamma, double shift = 0.0) const;
};

LmiProblem schur_embed(const AssembledSystem& sys, const Matrix& target);

struct SdpOptions {
  double gap_tol = 1e-8;   // stop once the barrier duality gap bound is below this
  double feas_tol = 1e-9;  // largest slack accepted from phase 1
  int max_outer = 40;
  int max_newton = 60;
  double t0 = 1.0;
  double mu = 10.0;
  std::uint64_t seed = 0;
  Exec exec = Exec::serial;  // parallel solves inside each Newton step
};

enum class SdpStatus { optimal, infeasible, max_iter };
std::string to_string(SdpStatus status);

struct SdpIterate {
  int phase = 2;
  int outer = 0;
  int newton = 0;
  double objective = 0.0;
  double min_eig = 0.0;  // smallest eigenvalue of Y_target + slack I - F(gamma)
  double barrier_t = 0.0;
};

struct KktReport {
  double min_eig = 0.0;         // lambda_min(Y_target - F(gamma*))
  double shifted_min_eig = 0.0;  // lambda_min(Y_target + slack I - F(gamma*))
  double box_slack = 0.0;       // min_i min(gamma_i - a, b - gamma_i)
  double barrier_t = 0.0;
  double gap_bound = 0.0;  // barrier parameter / t at exit
  double slack = 0.0;      // target lift fixed after phase 1
};

struct SdpSolution {
  Vector gamma;
  double objective = 0.0;
  SdpStatus status = SdpStatus::max_iter;
  KktReport kkt;
  std::vector<SdpIterate> iterations;
  int newton_steps = 0;
};

/// minimize sum(gamma) subject to gamma in [a, b]^n and F(gamma) <= Y_target,
/// solved as the equivalent LMI program by a primal log-barrier method
/// (Newton in gamma, gradient and Hessian from trace identities on one
/// sparse factorization of the LMI matrix per step). A phase-1 problem in
/// (gamma, s) first finds a strictly feasible point for the target lifted
/// by s I.
SdpSolution solve_sdp(const AssembledSystem& sys, const Matrix& target, double a, double b,
                      const SdpOptions& opts = {});

struct NoisyInput {
  Matrix y_delta;
  double delta = 0.0;
};

struct NoisySolution {
  SdpSolution solution;
  // 2 delta (n - 1) / lambda, when a satisfied C = n - 1 criterion is given.
  std::optional<double> error_bound;
};

// Solves the program with target Y^delta + delta I.
NoisySolution solve_sdp_noisy(const AssembledSystem& sys, const NoisyInput& noisy, double a, double b,
                              const SdpOptions& opts = {}, const CriterionResult* criterion = nullptr);

// Symmetric perturbation with seeded uniform entries, scaled so that its
// spectral norm is exactly delta.
Matrix make_noise(int m, double delta, std::uint64_t seed);

struct LsqOptions {
  double damping = 1e-3;  // initial Marquardt parameter
  int max_iter = 200;
  double fun_tol = 1e-6;   // decrease of the residual, relative to 1 + f
  double step_tol = 1e-6;  // relative step length
  double opt_tol = 1e-6;   // projected gradient, relative to max(1, start)
};

struct LsqResult {
  Vector gamma;
  std::vector<double> residuals;  // squared Frobenius residual per accepted iterate
  int iterations = 0;
  bool hit_iteration_cap = false;
  std::string stop_reason;
};

/// Box-constrained Levenberg-Marquardt on ||F(gamma) - Y_target||_F^2 with
/// projection onto [a, b]^n after each step. A local method: it only
/// reaches the global minimizer from a good start.
LsqResult lsq_baseline(const AssembledSystem& sys, const Matrix& target, const Vector& gamma0, double a, double b,
                       const LsqOptions& opts = {});

struct AdmissibleGrid {
  int resolution = 0;
  double a = 0.0;
  double b = 0.0;
  double delta = 0.0;
  // cell(p, q) corresponds to gamma = (coord(p), coord(q)).
  std::vector<std::uint8_t> cells;

  double coord(int p) const { return a + (b - a) * p / (resolution - 1); }
  bool at(int p, int q) const { return cells[static_cast<std::size_t>(p) * resolution + q] != 0; }
};

// Marks cells with lambda_min(Y_target + delta I - F(gamma)) >= -tol, with
// tol = 1e-10 (1 + ||Y_target||_2). Requires n = 2.
AdmissibleGrid admissible_set_sample(const AssembledSystem& sys, const Matrix& target, double delta, double a,
                                     double b, int resolution, Exec exec = Exec::parallel);

}  // namespace robin

#endif  // ROBIN_RECONSTRUCT_HPP
