#include "robin/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "robin/errors.hpp"

namespace robin {

using Triplet = Eigen::Triplet<double>;

std::string to_string(SdpStatus status) {
  switch (status) {
    case SdpStatus::optimal:
      return "optimal";
    case SdpStatus::infeasible:
      return "infeasible";
    case SdpStatus::max_iter:
      return "max_iter";
  }
  return "unknown";
}

LmiProblem schur_embed(const AssembledSystem& sys, const Matrix& target) {
  if (target.rows() != sys.m || target.cols() != sys.m) {
    throw DomainError("schur_embed: target must be " + std::to_string(sys.m) + " x " + std::to_string(sys.m));
  }
  require_symmetric(target, "schur_embed");

  LmiProblem lmi;
  lmi.dofs = sys.dofs;
  lmi.n = sys.n;
  lmi.m = sys.m;
  lmi.target = symmetrize(target);
  const int D = sys.dofs;
  const int size = D + sys.m;

  std::vector<Triplet> entries;
  for (int c = 0; c < sys.B0.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(sys.B0, c); it; ++it) entries.emplace_back(it.row(), it.col(), it.value());
  }
  for (Eigen::Index r = 0; r < sys.P.rows(); ++r) {
    for (Eigen::Index k = 0; k < sys.P.cols(); ++k) {
      if (sys.P(r, k) != 0.0) {
        entries.emplace_back(r, D + k, sys.P(r, k));
        entries.emplace_back(D + k, r, sys.P(r, k));
      }
    }
  }
  for (int i = 0; i < sys.m; ++i) {
    for (int j = 0; j < sys.m; ++j) entries.emplace_back(D + i, D + j, lmi.target(i, j));
  }
  lmi.Y.resize(size, size);
  lmi.Y.setFromTriplets(entries.begin(), entries.end());

  for (const SparseMatrix& b : sys.B) {
    std::vector<Triplet> padded;
    for (int c = 0; c < b.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(b, c); it; ++it) padded.emplace_back(it.row(), it.col(), it.value());
    }
    SparseMatrix bt(size, size);
    bt.setFromTriplets(padded.begin(), padded.end());
    lmi.Bt.push_back(std::move(bt));
  }
  return lmi;
}

SparseMatrix LmiProblem::matrix(const Vector& gamma, double shift) const {
  if (gamma.size() != n) throw DomainError("LmiProblem::matrix: wrong number of coefficients");
  SparseMatrix s = Y;
  for (int j = 0; j < n; ++j) s += gamma[j] * Bt[j];
  if (shift != 0.0) {
    for (int k = 0; k < m; ++k) s.coeffRef(dofs + k, dofs + k) += shift;
  }
  return s;
}

bool LmiProblem::strictly_feasible(const Vector& gamma, double shift) const {
  try {
    SpdFactor factor(matrix(gamma, shift));
    return true;
  } catch (const NotPositiveDefinite&) {
    return false;
  }
}

double LmiProblem::min_eig(const Vector& gamma, double shift) const {
  return robin::min_eig(Matrix(matrix(gamma, shift)));
}

namespace {

// One variable's constraint matrix restricted to the rows/columns it touches.
struct LocalTerm {
  std::vector<int> idx;
  Matrix block;
};

struct BarrierSetup {
  const LmiProblem* lmi = nullptr;
  std::vector<LocalTerm> terms;  // one per variable
  Vector cost;
  Vector lower;  // -inf / +inf for unbounded
  Vector upper;
  double shift = 0.0;       // fixed lift of the target block
  bool slack_variable = false;  // last variable lifts the target block
  Exec exec = Exec::serial;
};

struct Evaluation {
  double logdet = 0.0;
  Vector grad;
  Matrix hess;
  double schur_min_eig = 0.0;
};

class BarrierEngine {
public:
  explicit BarrierEngine(BarrierSetup setup) : s_(std::move(setup)) {
    const int D = s_.lmi->dofs;
    std::vector<int> all;
    for (const LocalTerm& t : s_.terms) all.insert(all.end(), t.idx.begin(), t.idx.end());
    for (int k = 0; k < s_.lmi->m; ++k) all.push_back(D + k);
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    cols_ = all;

    std::vector<int> where(D + s_.lmi->m, -1);
    for (std::size_t i = 0; i < cols_.size(); ++i) where[cols_[i]] = static_cast<int>(i);
    for (const LocalTerm& t : s_.terms) {
      std::vector<int> pos;
      for (int g : t.idx) pos.push_back(where[g]);
      local_.push_back(std::move(pos));
    }
    for (int k = 0; k < s_.lmi->m; ++k) target_pos_.push_back(where[D + k]);

    nu_ = D + s_.lmi->m;
    for (Eigen::Index i = 0; i < s_.lower.size(); ++i) {
      nu_ += std::isfinite(s_.lower[i]) ? 1 : 0;
      nu_ += std::isfinite(s_.upper[i]) ? 1 : 0;
    }
  }

  double barrier_parameter() const { return nu_; }

  SparseMatrix matrix(const Vector& x) const {
    const int n = s_.lmi->n;
    const double lift = s_.shift + (s_.slack_variable ? x[n] : 0.0);
    return s_.lmi->matrix(x.head(n), lift);
  }

  bool inside_box(const Vector& x) const {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (!(x[i] > s_.lower[i]) || !(x[i] < s_.upper[i])) return false;
    }
    return true;
  }

  Evaluation evaluate(const Vector& x, double t) const {
    const SpdFactor factor(matrix(x));
    const Matrix inv = factor.solve_unit(cols_, s_.exec);
    Matrix z(cols_.size(), cols_.size());
    for (std::size_t c = 0; c < cols_.size(); ++c) {
      for (std::size_t r = 0; r < cols_.size(); ++r) z(r, c) = inv(cols_[r], c);
    }
    z = symmetrize(z);

    const auto p = static_cast<Eigen::Index>(s_.terms.size());
    auto gather = [&z](const std::vector<int>& rows, const std::vector<int>& cols) {
      Matrix out(rows.size(), cols.size());
      for (std::size_t c = 0; c < cols.size(); ++c) {
        for (std::size_t r = 0; r < rows.size(); ++r) out(r, c) = z(rows[r], cols[c]);
      }
      return out;
    };

    Evaluation ev;
    ev.logdet = factor.logdet();
    ev.grad.resize(p);
    ev.hess.resize(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
      const Matrix zii = gather(local_[i], local_[i]);
      ev.grad[i] = t * s_.cost[i] - s_.terms[i].block.cwiseProduct(zii).sum();
      for (Eigen::Index j = 0; j <= i; ++j) {
        const Matrix mij = gather(local_[i], local_[j]);
        const double h = (s_.terms[i].block * mij * s_.terms[j].block).cwiseProduct(mij).sum();
        ev.hess(i, j) = h;
        ev.hess(j, i) = h;
      }
      if (std::isfinite(s_.lower[i])) {
        const double d = x[i] - s_.lower[i];
        ev.grad[i] -= 1.0 / d;
        ev.hess(i, i) += 1.0 / (d * d);
      }
      if (std::isfinite(s_.upper[i])) {
        const double d = s_.upper[i] - x[i];
        ev.grad[i] += 1.0 / d;
        ev.hess(i, i) += 1.0 / (d * d);
      }
    }

    // The target block of S^{-1} is the inverse of the Schur complement.
    const Matrix schur_inv = gather(target_pos_, target_pos_);
    ev.schur_min_eig = 1.0 / robin::max_eig(symmetrize(schur_inv));
    return ev;
  }

  // Barrier value change from x to x + step, accumulated term by term so
  // that the large t * cost contribution does not swamp the difference.
  double barrier_change(const Vector& x, const Vector& step, double t, double logdet_old, double logdet_new) const {
    double change = t * s_.cost.dot(step) - (logdet_new - logdet_old);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (std::isfinite(s_.lower[i])) change -= std::log1p(step[i] / (x[i] - s_.lower[i]));
      if (std::isfinite(s_.upper[i])) change -= std::log1p(-step[i] / (s_.upper[i] - x[i]));
    }
    return change;
  }

  struct Outcome {
    Vector x;
    double t = 0.0;
    bool converged = false;
    bool stopped_early = false;
    int newton_steps = 0;
  };

  // Path following from a strictly feasible x. stop(x) ends the run early.
  Outcome run(Vector x, double t, const SdpOptions& opts, int phase, std::vector<SdpIterate>& trace,
              const std::function<bool(const Vector&)>& stop) const {
    Outcome out;
    for (int outer = 0; outer < opts.max_outer; ++outer) {
      for (int step = 0; step < opts.max_newton; ++step) {
        const Evaluation ev = evaluate(x, t);
        trace.push_back(SdpIterate{phase, outer, step, s_.cost.dot(x), ev.schur_min_eig, t});
        if (stop && stop(x)) {
          out.x = x;
          out.t = t;
          out.stopped_early = true;
          return out;
        }

        Eigen::LDLT<Matrix> ldlt(ev.hess);
        Vector dx = -ldlt.solve(ev.grad);
        if (ldlt.info() != Eigen::Success || !dx.allFinite()) {
          const double ridge = 1e-12 * (1.0 + ev.hess.diagonal().cwiseAbs().maxCoeff());
          dx = -(ev.hess + ridge * Matrix::Identity(dx.size(), dx.size())).ldlt().solve(ev.grad);
        }
        const double decrement2 = -ev.grad.dot(dx);
        if (!(decrement2 > 2e-10)) break;

        double alpha = 1.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
          if (dx[i] < 0.0 && std::isfinite(s_.lower[i])) alpha = std::min(alpha, 0.99 * (s_.lower[i] - x[i]) / dx[i]);
          if (dx[i] > 0.0 && std::isfinite(s_.upper[i])) alpha = std::min(alpha, 0.99 * (s_.upper[i] - x[i]) / dx[i]);
        }

        bool accepted = false;
        for (int tries = 0; tries < 60 && !accepted; ++tries, alpha *= 0.5) {
          const Vector trial_step = alpha * dx;
          const Vector trial = x + trial_step;
          if (!inside_box(trial)) continue;
          double logdet_new = 0.0;
          try {
            logdet_new = SpdFactor(matrix(trial)).logdet();
          } catch (const NotPositiveDefinite&) {
            continue;
          }
          const double change = barrier_change(x, trial_step, t, ev.logdet, logdet_new);
          if (change <= -0.01 * alpha * decrement2) {
            x = trial;
            accepted = true;
          }
        }
        ++out.newton_steps;
        if (!accepted) break;
      }

      if (barrier_parameter() / t < opts.gap_tol) {
        out.converged = true;
        break;
      }
      t *= opts.mu;
    }
    out.x = x;
    out.t = t;
    return out;
  }

private:
  BarrierSetup s_;
  std::vector<int> cols_;
  std::vector<std::vector<int>> local_;
  std::vector<int> target_pos_;
  double nu_ = 0.0;
};

std::vector<LocalTerm> interface_terms(const AssembledSystem& sys) {
  std::vector<LocalTerm> terms;
  for (int j = 0; j < sys.n; ++j) {
    const Matrix& full = sys.B_interface[j];
    std::vector<int> local;
    for (Eigen::Index r = 0; r < full.rows(); ++r) {
      if (full.row(r).cwiseAbs().maxCoeff() > 0.0) local.push_back(static_cast<int>(r));
    }
    LocalTerm term;
    term.block.resize(local.size(), local.size());
    for (std::size_t c = 0; c < local.size(); ++c) {
      for (std::size_t r = 0; r < local.size(); ++r) term.block(r, c) = full(local[r], local[c]);
      term.idx.push_back(sys.interface_dofs[local[c]]);
    }
    terms.push_back(std::move(term));
  }
  return terms;
}

void require_box(double a, double b) {
  if (!(a > 0.0) || !(a < b) || !std::isfinite(b)) throw DomainError("bounds must satisfy 0 < a < b");
}

}  // namespace

SdpSolution solve_sdp(const AssembledSystem& sys, const Matrix& target, double a, double b, const SdpOptions& opts) {
  require_box(a, b);
  const LmiProblem lmi = schur_embed(sys, target);
  const int n = sys.n;
  const double scale = spectral_norm_sym(lmi.target);
  const double s_floor = 1e-12 * std::max(scale, std::numeric_limits<double>::min());

  SdpSolution sol;
  Vector gamma = Vector::Constant(n, b - 1e-3 * (b - a));
  double slack = s_floor;

  if (!lmi.strictly_feasible(gamma, slack)) {
    // Phase 1: minimize s over (gamma, s) with the target lifted by s I,
    // stopping as soon as the lift drops below the floor.
    const double e0 = min_eig(symmetrize(lmi.target - measure(sys, gamma)));
    double s0 = 1.1 * std::max(-e0, 0.0) + s_floor;
    while (!lmi.strictly_feasible(gamma, s0)) s0 = 2.0 * s0 + s_floor;

    BarrierSetup setup;
    setup.lmi = &lmi;
    setup.terms = interface_terms(sys);
    LocalTerm lift;
    for (int k = 0; k < sys.m; ++k) lift.idx.push_back(sys.dofs + k);
    lift.block = Matrix::Identity(sys.m, sys.m);
    setup.terms.push_back(std::move(lift));
    setup.cost = Vector::Zero(n + 1);
    setup.cost[n] = 1.0;
    setup.lower = Vector::Constant(n + 1, a);
    setup.upper = Vector::Constant(n + 1, b);
    setup.lower[n] = -std::numeric_limits<double>::infinity();
    setup.upper[n] = std::numeric_limits<double>::infinity();
    setup.slack_variable = true;
    setup.exec = opts.exec;
    const BarrierEngine phase1(std::move(setup));

    Vector x(n + 1);
    x << gamma, s0;
    const double t1 = std::max(opts.t0, sys.m / s0);
    const auto result = phase1.run(x, t1, opts, 1, sol.iterations,
                                   [s_floor, n](const Vector& v) { return v[n] < s_floor; });
    sol.newton_steps += result.newton_steps;
    gamma = result.x.head(n);
    const double s_reached = result.x[n];
    if (result.stopped_early) {
      slack = s_floor;
    } else if (s_reached <= opts.feas_tol) {
      slack = std::max(s_reached, s_floor);
    } else {
      sol.gamma = gamma;
      sol.objective = gamma.sum();
      sol.status = SdpStatus::infeasible;
      sol.kkt.slack = s_reached;
      sol.kkt.barrier_t = result.t;
      sol.kkt.min_eig = min_eig(symmetrize(lmi.target - measure(sys, gamma)));
      sol.kkt.shifted_min_eig = sol.kkt.min_eig + s_reached;
      sol.kkt.box_slack = std::min((gamma.array() - a).minCoeff(), (b - gamma.array()).minCoeff());
      sol.kkt.gap_bound = phase1.barrier_parameter() / result.t;
      return sol;
    }
  }

  BarrierSetup setup;
  setup.lmi = &lmi;
  setup.terms = interface_terms(sys);
  setup.cost = Vector::Ones(n);
  setup.lower = Vector::Constant(n, a);
  setup.upper = Vector::Constant(n, b);
  setup.shift = slack;
  setup.exec = opts.exec;
  const BarrierEngine phase2(std::move(setup));

  const auto result = phase2.run(gamma, opts.t0, opts, 2, sol.iterations, {});
  sol.newton_steps += result.newton_steps;
  sol.gamma = result.x;
  sol.objective = result.x.sum();
  sol.status = result.converged ? SdpStatus::optimal : SdpStatus::max_iter;

  const Matrix residual = symmetrize(lmi.target - measure(sys, sol.gamma));
  sol.kkt.min_eig = min_eig(residual);
  sol.kkt.shifted_min_eig = sol.kkt.min_eig + slack;
  sol.kkt.box_slack = std::min((sol.gamma.array() - a).minCoeff(), (b - sol.gamma.array()).minCoeff());
  sol.kkt.barrier_t = result.t;
  sol.kkt.gap_bound = phase2.barrier_parameter() / result.t;
  sol.kkt.slack = slack;
  return sol;
}

NoisySolution solve_sdp_noisy(const AssembledSystem& sys, const NoisyInput& noisy, double a, double b,
                              const SdpOptions& opts, const CriterionResult* criterion) {
  if (!(noisy.delta >= 0.0)) throw DomainError("solve_sdp_noisy: delta must be non-negative");
  require_symmetric(noisy.y_delta, "solve_sdp_noisy");
  const Matrix target = symmetrize(noisy.y_delta) + noisy.delta * Matrix::Identity(sys.m, sys.m);

  NoisySolution out;
  out.solution = solve_sdp(sys, target, a, b, opts);
  if (criterion && criterion->satisfied && criterion->lambda > 0.0) {
    out.error_bound = 2.0 * noisy.delta * (sys.n - 1) / criterion->lambda;
  }
  return out;
}

Matrix make_noise(int m, double delta, std::uint64_t seed) {
  if (!(delta >= 0.0)) throw DomainError("make_noise: delta must be non-negative");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Matrix e(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j <= i; ++j) {
      e(i, j) = uniform(rng);
      e(j, i) = e(i, j);
    }
  }
  if (delta == 0.0) return Matrix::Zero(m, m);
  return e * (delta / spectral_norm_sym(e));
}

namespace {

Vector flatten(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

}  // namespace

LsqResult lsq_baseline(const AssembledSystem& sys, const Matrix& target, const Vector& gamma0, double a, double b,
                       const LsqOptions& opts) {
  require_box(a, b);
  if (gamma0.size() != sys.n) throw DomainError("lsq_baseline: start has wrong length");
  if ((gamma0.array() < a).any() || (gamma0.array() > b).any()) throw DomainError("lsq_baseline: start outside [a, b]^n");
  if (target.rows() != sys.m || target.cols() != sys.m) throw DomainError("lsq_baseline: target has wrong shape");

  const int n = sys.n;
  auto project = [a, b](Vector g) { return Vector(g.array().max(a).min(b)); };

  struct State {
    Vector gamma;
    Vector residual;
    Matrix jacobian;
    double f = 0.0;
  };
  auto evaluate = [&](const Vector& g) {
    const Linearization lin(sys, g);
    State s;
    s.gamma = g;
    s.residual = flatten(lin.value() - target);
    s.jacobian.resize(s.residual.size(), n);
    for (int i = 0; i < n; ++i) s.jacobian.col(i) = -flatten(lin.sensitivities()[i]);
    s.f = s.residual.squaredNorm();
    return s;
  };
  auto projected_gradient = [a, b](const State& s) {
    Vector g = s.jacobian.transpose() * s.residual;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      if ((s.gamma[i] <= a && g[i] > 0.0) || (s.gamma[i] >= b && g[i] < 0.0)) g[i] = 0.0;
    }
    return g;
  };

  LsqResult out;
  State cur = evaluate(project(gamma0));
  out.residuals.push_back(cur.f);
  const double g0 = projected_gradient(cur).lpNorm<Eigen::Infinity>();
  double damping = opts.damping;

  for (int it = 0; it < opts.max_iter; ++it) {
    out.iterations = it;
    const double gnorm = projected_gradient(cur).lpNorm<Eigen::Infinity>();
    if (cur.f == 0.0 || gnorm <= opts.opt_tol * std::max(1.0, g0)) {
      out.stop_reason = "first_order_optimality";
      out.gamma = cur.gamma;
      return out;
    }

    const Matrix jtj = cur.jacobian.transpose() * cur.jacobian;
    const Vector rhs = -(cur.jacobian.transpose() * cur.residual);
    bool accepted = false;
    while (!accepted) {
      Matrix lhs = jtj;
      lhs.diagonal() += damping * jtj.diagonal();
      const Vector step = lhs.ldlt().solve(rhs);
      const Vector next = project(cur.gamma + step);
      const State trial = evaluate(next);
      if (trial.f < cur.f) {
        const double moved = (trial.gamma - cur.gamma).norm();
        const double decrease = cur.f - trial.f;
        const double step_scale = 1.0 + cur.gamma.norm();
        const double f_before = cur.f;
        cur = trial;
        out.residuals.push_back(cur.f);
        damping *= 0.1;
        accepted = true;
        if (moved <= opts.step_tol * step_scale) {
          out.stop_reason = "step_tolerance";
          out.iterations = it + 1;
          out.gamma = cur.gamma;
          return out;
        }
        if (decrease <= opts.fun_tol * (1.0 + f_before)) {
          out.stop_reason = "function_tolerance";
          out.iterations = it + 1;
          out.gamma = cur.gamma;
          return out;
        }
      } else {
        damping *= 10.0;
        if (damping > 1e16) {
          out.stop_reason = "damping_limit";
          out.iterations = it + 1;
          out.gamma = cur.gamma;
          return out;
        }
      }
    }
  }
  out.iterations = opts.max_iter;
  out.hit_iteration_cap = true;
  out.stop_reason = "iteration_cap";
  out.gamma = cur.gamma;
  return out;
}

AdmissibleGrid admissible_set_sample(const AssembledSystem& sys, const Matrix& target, double delta, double a,
                                     double b, int resolution, Exec exec) {
  if (sys.n != 2) throw DomainError("admissible_set_sample: requires n = 2");
  if (resolution < 2) throw DomainError("admissible_set_sample: resolution must be at least 2");
  require_box(a, b);
  require_symmetric(target, "admissible_set_sample");

  AdmissibleGrid grid;
  grid.resolution = resolution;
  grid.a = a;
  grid.b = b;
  grid.delta = delta;
  grid.cells.assign(static_cast<std::size_t>(resolution) * resolution, 0);

  const Matrix lifted = symmetrize(target) + delta * Matrix::Identity(sys.m, sys.m);
  const double tol = 1e-10 * (1.0 + spectral_norm_sym(symmetrize(target)));
  for_each_index(exec, grid.cells.size(), [&](std::size_t cell) {
    const int p = static_cast<int>(cell) / resolution;
    const int q = static_cast<int>(cell) % resolution;
    Vector gamma(2);
    gamma << grid.coord(p), grid.coord(q);
    grid.cells[cell] = min_eig(symmetrize(lifted - measure(sys, gamma))) >= -tol ? 1 : 0;
  });
  return grid;
}

}  // namespace robin
