// Acceptance suite. Each criterion prints one PASS/FAIL line; the exit code
// is non-zero if any selected criterion fails.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "robin/certify.hpp"
#include "robin/experiments.hpp"
#include "robin/reconstruct.hpp"
#include "support/oracles.hpp"

using namespace robin;
namespace fs = std::filesystem;

namespace tol {
constexpr double forward_rel = 1e-10;
constexpr double reciprocity_rel = 1e-12;
constexpr double forward_seconds = 1.0;

constexpr double loewner_scale = 1e-8;
constexpr double fd_rel = 1e-5;
constexpr double fd_step = 1e-4;
constexpr double monotone_seconds = 60.0;

constexpr double schur_zero = 1e-9;
constexpr double schur_seconds = 30.0;

constexpr int certify_m_max = 8;

constexpr double domination_slack = 1e-9;
constexpr double domination_seconds = 120.0;

constexpr int desk_dofs_lo = 500;
constexpr int desk_dofs_hi = 2500;
constexpr double desk_error = 1e-3;
constexpr double desk_seconds = 600.0;

constexpr double landscape_sdp = 1e-4;
constexpr double landscape_lsq = 0.1;
constexpr double landscape_seconds = 900.0;

constexpr double noise_jitter = 0.10;
constexpr double noise_bound_slack = 1e-8;
constexpr double noise_lambda_min = 1e-6;
constexpr double noise_seconds = 900.0;

constexpr double lipschitz_slack = 1e-9;
constexpr double lipschitz_seconds = 60.0;
}  // namespace tol

// Refinement used for the desk-scale reproductions.
constexpr int kDeskRefinement = 2;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string sci(double v) { return fmt("%.3e", v); }

const AssembledSystem& desk(int n, int m) { return fixture::system(n, m, kDeskRefinement); }

Outcome forward_correctness() {
  struct Case {
    int n, m;
  };
  const Case cases[] = {{2, 4}, {3, 5}, {4, 8}, {5, 7}};
  std::mt19937_64 rng(101);
  double worst = 0.0, worst_recip = 0.0, solve_time = 0.0;
  int max_dofs = 0;
  for (const Case& c : cases) {
    const auto& built = fixture::get({c.n, c.m, 1});
    max_dofs = std::max(max_dofs, built.sys.dofs);
    const auto dense = oracle::dense_system(built.mesh, built.geometry, Conductivity{}, c.n);
    for (int trial = 0; trial < 10; ++trial) {
      const Vector gamma = oracle::uniform_point(rng, c.n, 0.5, 5.0);
      Stopwatch sw;
      const Matrix F = measure(built.sys, gamma);
      std::vector<Vector> columns;
      for (int k = 0; k < c.m; ++k) columns.push_back(solve_forward(built.sys, gamma, Vector::Unit(c.m, k)).U);
      solve_time += sw.seconds();
      const Matrix ref = oracle::dense_measure(dense, gamma);
      worst = std::max(worst, (F - ref).norm() / ref.norm());
      for (int k = 0; k < c.m; ++k) {
        for (int l = 0; l < c.m; ++l) {
          worst_recip = std::max(worst_recip, std::abs(columns[l][k] - columns[k][l]) / ref.norm());
        }
      }
    }
  }
  const bool pass = max_dofs <= 300 && worst <= tol::forward_rel && worst_recip <= tol::reciprocity_rel &&
                    solve_time < tol::forward_seconds;
  return {pass, "max D " + std::to_string(max_dofs) + ", rel err vs dense oracle " + sci(worst) +
                    ", reciprocity " + sci(worst_recip) + ", solve time " + fmt("%.3f", solve_time) + " s"};
}

Outcome monotone_suite() {
  Stopwatch sw;
  const int layouts[][2] = {{2, 4}, {4, 8}, {8, 16}};
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_mono = 1e300, worst_conv = 1e300, worst_fd = 0.0;
  int pairs = 0;
  for (const auto& l : layouts) {
    const int n = l[0];
    const AssembledSystem& sys = fixture::system(n, l[1], 1);
    for (int trial = 0; trial < 1000; ++trial) {
      const Vector x = oracle::uniform_point(rng, n, 1.0, 3.0);
      Vector y = x;
      for (int i = 0; i < n; ++i) y[i] += unit(rng) * (3.0 - x[i]);
      const Linearization lx(sys, x);
      const Matrix Fy = measure(sys, y);
      const double scale = 1.0 + spectral_norm_sym(lx.value());
      // y >= x componentwise, so F(y) <= F(x)
      worst_mono = std::min(worst_mono, min_eig(symmetrize(lx.value() - Fy)) / scale);
      const Matrix gap = Fy - lx.value() - lx.derivative(y - x);
      worst_conv = std::min(worst_conv, min_eig(symmetrize(gap)) / scale);
      ++pairs;
    }
    for (int trial = 0; trial < 20; ++trial) {
      const Vector g = oracle::uniform_point(rng, n, 1.2, 2.8);
      const Vector d = oracle::uniform_point(rng, n, -1.0, 1.0);
      const Matrix exact = derivative_apply(sys, g, d);
      const Matrix fd = oracle::fd_derivative(sys, g, d, tol::fd_step);
      worst_fd = std::max(worst_fd, (exact - fd).norm() / exact.norm());
    }
  }
  const double t = sw.seconds();
  const bool pass = worst_mono >= -tol::loewner_scale && worst_conv >= -tol::loewner_scale && worst_fd <= tol::fd_rel &&
                    t < tol::monotone_seconds;
  return {pass, std::to_string(pairs) + " pairs, min monotonicity eig/scale " + sci(worst_mono) +
                    ", min convexity eig/scale " + sci(worst_conv) + ", derivative vs FD " + sci(worst_fd) + ", " +
                    fmt("%.1f", t) + " s"};
}

Outcome schur_equivalence() {
  Stopwatch sw;
  std::mt19937_64 rng(303);
  int agree = 0, total = 0, zeros = 0;
  auto sign = [](double v) { return std::abs(v) <= tol::schur_zero ? 0 : (v > 0 ? 1 : -1); };
  for (const auto& l : {std::pair{2, 4}, std::pair{5, 8}}) {
    const int n = l.first;
    const AssembledSystem& sys = fixture::system(n, l.second, 1);
    for (int trial = 0; trial < 100; ++trial) {
      const Vector truth = oracle::uniform_point(rng, n, 1.0, 3.0);
      const LmiProblem lmi = schur_embed(sys, measure(sys, truth));
      const Vector g = oracle::uniform_point(rng, n, 1.0, 3.0);
      const int direct = sign(min_eig(symmetrize(lmi.target - measure(sys, g))));
      const int embedded = sign(lmi.min_eig(g));
      zeros += (direct == 0 || embedded == 0) ? 1 : 0;
      agree += direct == embedded ? 1 : 0;
      ++total;
    }
  }
  const double t = sw.seconds();
  return {agree == total && t < tol::schur_seconds,
          std::to_string(agree) + "/" + std::to_string(total) + " signs agree (" + std::to_string(zeros) +
              " in the zero band), " + fmt("%.1f", t) + " s"};
}

Outcome certification() {
  const int K = probe_count(1.0, 3.0, 1.0);
  std::optional<int> found;
  double lambda = 0.0;
  std::ostringstream trace;
  for (int m = 2; m <= tol::certify_m_max && !found; ++m) {
    const CriterionResult c = criterion_lambda(desk(2, m), 1.0, 3.0, 1.0);
    trace << " m=" << m << ":" << sci(c.lambda);
    if (c.satisfied) {
      found = m;
      lambda = c.lambda;
    }
  }
  const bool pass = K == 9 && found.has_value();
  return {pass, "K=" + std::to_string(K) + ", n=2 C=1=n-1 first satisfied at m=" +
                    (found ? std::to_string(*found) : std::string("none")) + " (lambda " + sci(lambda) + ");" + trace.str()};
}

Outcome probe_domination() {
  Stopwatch sw;
  std::mt19937_64 rng(505);
  double worst = 1e300;
  int checks = 0;
  for (const auto& l : {std::pair{2, 4}, std::pair{3, 6}}) {
    const int n = l.first;
    const AssembledSystem& sys = desk(n, l.second);
    for (double C : {1.0, n - 1.0}) {
      const CriterionResult table = criterion_lambda(sys, 1.0, 3.0, C);
      for (int trial = 0; trial < 100; ++trial) {
        const Vector x = oracle::uniform_point(rng, n, 1.0, 3.0);
        const Vector lam = directional_lambdas(sys, x, C);
        for (int j = 0; j < n; ++j) {
          worst = std::min(worst, lam[j] - table.lambda);
          ++checks;
        }
      }
    }
  }
  const double t = sw.seconds();
  return {worst >= -tol::domination_slack && t < tol::domination_seconds,
          std::to_string(checks) + " checks, min(lambda_x - lambda_table) " + sci(worst) + ", " + fmt("%.1f", t) + " s"};
}

Outcome desk_reconstruction() {
  Stopwatch sw;
  const AssembledSystem& sys = desk(20, 30);
  std::mt19937_64 rng(606);
  const Vector truth = oracle::uniform_point(rng, 20, 1.0, 3.0);
  const SdpSolution sol = solve_sdp(sys, measure(sys, truth), 1.0, 3.0);
  const double err = (sol.gamma - truth).lpNorm<Eigen::Infinity>();
  const double t = sw.seconds();
  const bool pass = sys.dofs >= tol::desk_dofs_lo && sys.dofs <= tol::desk_dofs_hi && sol.status == SdpStatus::optimal &&
                    err <= tol::desk_error && t < tol::desk_seconds;
  return {pass, "D=" + std::to_string(sys.dofs) + ", status " + to_string(sol.status) + ", inf error " + sci(err) + ", " +
                    std::to_string(sol.newton_steps) + " Newton steps, " + fmt("%.1f", t) + " s"};
}

Outcome landscape(const fs::path& work) {
  Stopwatch sw;
  ExperimentSpec spec;
  spec.command = Command::landscape;
  spec.config.geometry.n = 2;
  spec.config.geometry.m = 4;
  spec.config.refinement = kDeskRefinement;
  spec.config.grid_resolution = 21;
  spec.config.lsq_start = {2.0, 2.0};
  spec.out_dir = (work / "landscape").string();
  run_landscape(spec);
  std::ifstream in(work / "landscape" / "landscape_summary.json");
  const auto summary = nlohmann::json::parse(in);
  const double sdp = summary["max_sdp_error"];
  const double lsq = summary["max_lsq_error"];
  const int failed = summary["failed_cells"];
  const double t = sw.seconds();
  const bool pass = failed == 0 && sdp <= tol::landscape_sdp && lsq >= tol::landscape_lsq && t < tol::landscape_seconds;
  return {pass, "max SDP error " + sci(sdp) + " (<= " + sci(tol::landscape_sdp) + "), max LSQ error " + sci(lsq) +
                    " at (" + fmt("%.2f", summary["max_lsq_error_at"][0]) + ", " +
                    fmt("%.2f", summary["max_lsq_error_at"][1]) + ") (>= " + sci(tol::landscape_lsq) + "), " +
                    fmt("%.1f", t) + " s"};
}

Outcome noise_behavior() {
  Stopwatch sw;
  const AssembledSystem& big = desk(20, 30);
  std::mt19937_64 rng(808);
  const Vector truth = oracle::uniform_point(rng, 20, 1.0, 3.0);
  const Matrix exact = measure(big, truth);
  std::vector<double> deltas;
  for (int e = 1; e <= 10; ++e) deltas.push_back(std::pow(10.0, -e));
  deltas.push_back(0.0);
  std::vector<double> errors;
  std::ostringstream trace;
  for (double delta : deltas) {
    const Matrix noisy = exact + make_noise(30, delta, 809);
    const NoisySolution r = solve_sdp_noisy(big, NoisyInput{noisy, delta}, 1.0, 3.0);
    errors.push_back((r.solution.gamma - truth).lpNorm<Eigen::Infinity>());
    trace << " " << sci(delta) << ":" << sci(errors.back());
  }
  bool monotone = true;
  for (std::size_t i = 1; i < errors.size(); ++i) monotone &= errors[i] <= (1.0 + tol::noise_jitter) * errors[i - 1];

  const AssembledSystem& small = desk(2, 8);
  const CriterionResult crit = criterion_lambda(small, 1.0, 3.0, 1.0);
  bool bound_ok = crit.lambda > tol::noise_lambda_min;
  std::ostringstream bounds;
  Vector small_truth(2);
  small_truth << 2.7, 1.2;
  const Matrix small_exact = measure(small, small_truth);
  for (double delta : {1e-8, 1e-6}) {
    const Matrix noisy = small_exact + make_noise(8, delta, 810);
    const NoisySolution r = solve_sdp_noisy(small, NoisyInput{noisy, delta}, 1.0, 3.0, {}, &crit);
    const double err = (r.solution.gamma - small_truth).lpNorm<Eigen::Infinity>();
    const double bound = r.error_bound.value_or(-1.0);
    bound_ok &= r.error_bound.has_value() && err <= bound + tol::noise_bound_slack;
    bounds << " delta " << sci(delta) << ": err " << sci(err) << " <= bound " << sci(bound) << ";";
  }
  const double t = sw.seconds();
  return {monotone && bound_ok && t < tol::noise_seconds,
          std::string("n=20 errors") + trace.str() + (monotone ? " (monotone)" : " (NOT monotone)") +
              "; n=2 m=8 lambda " + sci(crit.lambda) + ":" + bounds.str() + " " + fmt("%.1f", t) + " s"};
}

Outcome lipschitz_bound() {
  Stopwatch sw;
  std::mt19937_64 rng(909);
  double worst = 1e300;
  int pairs = 0, certified = 0;
  for (const auto& l : {std::pair{2, 4}, std::pair{3, 6}, std::pair{4, 8}}) {
    const AssembledSystem& sys = desk(l.first, l.second);
    const CriterionResult crit = criterion_lambda(sys, 1.0, 3.0, 1.0);
    if (!crit.satisfied) continue;
    ++certified;
    for (int trial = 0; trial < 100; ++trial) {
      const Vector g1 = oracle::uniform_point(rng, l.first, 1.0, 3.0);
      const Vector g2 = oracle::uniform_point(rng, l.first, 1.0, 3.0);
      const double lhs = spectral_norm_sym(symmetrize(measure(sys, g1) - measure(sys, g2)));
      worst = std::min(worst, lhs - crit.lambda * (g1 - g2).lpNorm<Eigen::Infinity>());
      ++pairs;
    }
  }
  const double t = sw.seconds();
  return {certified > 0 && worst >= -tol::lipschitz_slack && t < tol::lipschitz_seconds,
          std::to_string(certified) + " certified layouts, " + std::to_string(pairs) +
              " pairs, min(||dF|| - lambda ||dgamma||_inf) " + sci(worst) + ", " + fmt("%.1f", t) + " s"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

Outcome determinism(const fs::path& work) {
  set_deterministic(true);
  std::vector<std::string> mismatched;
  int compared = 0;
  for (Command command : {Command::certify, Command::landscape}) {
    std::vector<std::string> runs[2];
    for (int run = 0; run < 2; ++run) {
      ExperimentSpec spec;
      spec.command = command;
      spec.deterministic = true;
      spec.config.geometry.n = 2;
      spec.config.geometry.m = 4;
      spec.config.refinement = 1;
      spec.config.grid_resolution = 6;
      spec.config.seed = 77;
      spec.out_dir = (work / ("determinism_" + command_name(command) + "_" + std::to_string(run))).string();
      fs::remove_all(spec.out_dir);
      runs[run] = run_experiment(spec);
    }
    for (std::size_t i = 0; i < runs[0].size(); ++i) {
      if (fs::path(runs[0][i]).extension() != ".csv") continue;
      ++compared;
      if (slurp(runs[0][i]) != slurp(runs[1][i])) mismatched.push_back(fs::path(runs[0][i]).filename().string());
    }
  }
  set_deterministic(false);
  std::string detail = std::to_string(compared) + " CSV files compared";
  for (const auto& m : mismatched) detail += ", differs: " + m;
  return {compared > 0 && mismatched.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  std::string work = "acceptance_work";
  app.add_option("--criterion", only, "run a single criterion (1-10); default runs all")->check(CLI::Range(0, 10));
  app.add_option("--work", work, "scratch directory for CLI artifacts");
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"forward correctness", forward_correctness},
      {"monotonicity, convexity and derivative", monotone_suite},
      {"Schur complement equivalence", schur_equivalence},
      {"certification for n=2 and probe count", certification},
      {"probe domination", probe_domination},
      {"desk-scale global reconstruction n=20 m=30", desk_reconstruction},
      {"landscape SDP vs least squares", [&] { return landscape(work); }},
      {"noise behavior and error bound", noise_behavior},
      {"Lipschitz lower bound", lipschitz_bound},
      {"determinism of CSV output", [&] { return determinism(work); }},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i + 1) != only) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %02zu %s: %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
