#include "robin/experiments.hpp"

#include <json.hpp>

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "robin/certify.hpp"
#include "robin/errors.hpp"

namespace robin {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

const std::vector<std::pair<Command, std::string>>& command_table() {
  static const std::vector<std::pair<Command, std::string>> table = {
      {Command::mesh, "mesh"},
      {Command::certify, "certify"},
      {Command::sweep_n, "sweep-n"},
      {Command::sweep_m, "sweep-m"},
      {Command::reconstruct, "reconstruct"},
      {Command::landscape, "landscape"},
      {Command::noise_sweep, "noise-sweep"},
      {Command::admissible, "admissible"},
  };
  return table;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Errors below this are printed as this in log10 columns.
constexpr double kLogFloor = 1e-16;

double log_error(double e) { return std::isfinite(e) ? std::log10(std::max(e, kLogFloor)) : e; }

class Csv {
public:
  Csv(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw ConfigError("cannot write '" + path.string() + "'");
    row(header);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

private:
  std::ofstream out_;
};

void write_json(const fs::path& path, const json& value) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << value.dump(2) << '\n';
}

fs::path prepare(const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) throw ConfigError("cannot create output directory '" + out_dir + "'");
  return fs::path(out_dir);
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector from_std(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), v.size()); }

ExperimentConfig with_layout(const ExperimentConfig& base, int n, int m) {
  ExperimentConfig c = base;
  c.geometry.n = n;
  c.geometry.m = m;
  return c;
}

Vector true_gamma(const ExperimentConfig& c) {
  if (c.gamma_true) return from_std(*c.gamma_true);
  std::mt19937_64 rng(derive_seed(c.seed, 0));
  std::uniform_real_distribution<double> draw(c.a, c.b);
  Vector g(c.geometry.n);
  for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = draw(rng);
  return g;
}

std::uint64_t noise_seed(const ExperimentConfig& c) { return derive_seed(c.seed, 1); }

void require_two(const ExperimentConfig& c, const std::string& what) {
  if (c.geometry.n != 2) throw ConfigError(what + " requires n = 2");
}

json kkt_json(const KktReport& k) {
  return json{{"min_eig", k.min_eig},     {"shifted_min_eig", k.shifted_min_eig},
              {"box_slack", k.box_slack}, {"barrier_t", k.barrier_t},
              {"gap_bound", k.gap_bound}, {"slack", k.slack}};
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::string cache_key(const ExperimentConfig& c) {
  std::ostringstream key;
  const GeometryConfig& g = c.geometry;
  key << "v1 " << num(g.outer_radius) << ' ' << num(g.inner_radius) << ' ' << g.n << ' ' << g.m << ' '
      << num(g.electrode_coverage) << ' ' << num(g.partition_phase) << ' ' << num(g.electrode_phase) << ' '
      << c.refinement << ' ' << num(c.sigma.sigma1) << ' ' << num(c.sigma.sigma2);
  return fnv1a_hex(key.str());
}

void write_criterion(const fs::path& dir, const std::string& stem, const CriterionResult& crit, double a, double b,
                     std::vector<std::string>& written) {
  {
    Csv csv(dir / (stem + ".csv"), {"j", "k", "lambda_max"});
    for (int j = 0; j < crit.grid.n; ++j) {
      for (int col = 0; col < crit.grid.probes_per_direction(); ++col) {
        csv.row({std::to_string(j + 1), std::to_string(col + 2), num(crit.table(j, col))});
      }
    }
  }
  write_json(dir / (stem + ".json"), json{{"C", crit.grid.C},
                                          {"K", crit.grid.K},
                                          {"lambda", crit.lambda},
                                          {"satisfied", crit.satisfied},
                                          {"m", crit.m},
                                          {"n", crit.grid.n},
                                          {"a", a},
                                          {"b", b}});
  written.push_back((dir / (stem + ".csv")).string());
  written.push_back((dir / (stem + ".json")).string());
}

}  // namespace

std::optional<Command> parse_command(const std::string& name) {
  for (const auto& [command, label] : command_table()) {
    if (label == name) return command;
  }
  return std::nullopt;
}

std::string command_name(Command command) {
  for (const auto& [c, label] : command_table()) {
    if (c == command) return label;
  }
  return "unknown";
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 of the combined value
  std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

AssembledSystem cached_system(const ExperimentConfig& config, const std::string& out_dir) {
  const fs::path dir = prepare(out_dir) / "cache";
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path file = dir / ("system-" + cache_key(config) + ".txt");

  if (fs::exists(file)) {
    std::ifstream in(file);
    try {
      AssembledSystem sys = read_system(in);
      if (sys.n == config.geometry.n && sys.m == config.geometry.m) return sys;
    } catch (const std::exception&) {
      // unreadable cache entry; rebuilt below
    }
  }

  const Geometry geometry = build_geometry(config.geometry);
  AssembledSystem sys = assemble(generate_mesh(geometry, config.refinement), geometry, config.sigma);
  const fs::path tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (out) write_system(out, sys);
  }
  fs::rename(tmp, file, ec);
  return sys;
}

std::vector<std::string> run_mesh(const ExperimentSpec& spec) {
  const fs::path dir = prepare(spec.out_dir);
  const ExperimentConfig& c = spec.config;
  const Geometry geometry = build_geometry(c.geometry);
  const Mesh mesh = generate_mesh(geometry, c.refinement);
  const std::vector<MeshIssue> issues = validate_mesh(mesh, geometry);
  const AssembledSystem sys = assemble(mesh, geometry, c.sigma);

  {
    std::ofstream out(dir / "mesh.txt");
    if (!out) throw ConfigError("cannot write mesh.txt");
    write_mesh(out, mesh);
  }
  json list = json::array();
  for (const MeshIssue& issue : issues) list.push_back({{"kind", issue.kind}, {"index", issue.index}, {"detail", issue.detail}});
  write_json(dir / "mesh_summary.json", json{{"refinement", c.refinement},
                                             {"nodes", mesh.nodes.size()},
                                             {"triangles", mesh.triangles.size()},
                                             {"interface_edges", mesh.interface_edges.size()},
                                             {"boundary_edges", mesh.boundary_edges.size()},
                                             {"dofs", sys.dofs},
                                             {"area", mesh_area(mesh)},
                                             {"issues", list}});
  if (!issues.empty()) throw MeshError("mesh validation reported " + std::to_string(issues.size()) + " issue(s)");
  return {(dir / "mesh.txt").string(), (dir / "mesh_summary.json").string()};
}

std::vector<std::string> run_certify(const ExperimentSpec& spec) {
  const fs::path dir = prepare(spec.out_dir);
  const ExperimentConfig& c = spec.config;
  const AssembledSystem sys = cached_system(c, spec.out_dir);
  std::vector<std::string> written;
  write_criterion(dir, "criterion_C1", criterion_lambda(sys, c.a, c.b, 1.0), c.a, c.b, written);
  write_criterion(dir, "criterion_Cn1", criterion_lambda(sys, c.a, c.b, c.geometry.n - 1.0), c.a, c.b, written);
  return written;
}

std::vector<std::string> run_sweep_n(const ExperimentSpec& spec) {
  const fs::path dir = prepare(spec.out_dir);
  const ExperimentConfig& c = spec.config;
  const std::vector<int> ns = c.n_list.empty() ? std::vector<int>{c.geometry.n} : c.n_list;

  Csv summary(dir / "sweep_n.csv", {"n", "C", "m_min", "lambda_m_min", "m_plus5", "lambda_m_plus5"});
  Csv trace(dir / "sweep_n_trace.csv", {"n", "C", "m", "lambda"});
  for (int n : ns) {
    for (double C : {1.0, n - 1.0}) {
      auto lambda_for = [&](int m) {
        return criterion_lambda(cached_system(with_layout(c, n, m), spec.out_dir), c.a, c.b, C).lambda;
      };
      std::optional<int> m_min;
      double lambda_min = 0.0;
      for (int m = 2; m <= c.m_max && !m_min; ++m) {
        const double lambda = lambda_for(m);
        trace.row({std::to_string(n), num(C), std::to_string(m), num(lambda)});
        if (lambda > 0.0) {
          m_min = m;
          lambda_min = lambda;
        }
      }
      if (m_min) {
        const int m5 = *m_min + 5;
        const double lambda5 = lambda_for(m5);
        trace.row({std::to_string(n), num(C), std::to_string(m5), num(lambda5)});
        summary.row({std::to_string(n), num(C), std::to_string(*m_min), num(lambda_min), std::to_string(m5), num(lambda5)});
      } else {
        summary.row({std::to_string(n), num(C), "none", "", "", ""});
      }
    }
  }
  return {(dir / "sweep_n.csv").string(), (dir / "sweep_n_trace.csv").string()};
}

std::vector<std::string> run_sweep_m(const ExperimentSpec& spec) {
  const fs::path dir = prepare(spec.out_dir);
  const ExperimentConfig& c = spec.config;
  std::vector<int> ms = c.m_list;
  if (ms.empty()) {
    for (int m = 2; m <= c.m_max; ++m) ms.push_back(m);
  }
  const int n = c.geometry.n;
  Csv csv(dir / "sweep_m.csv", {"n", "m", "K_C1", "lambda_C1", "satisfied_C1", "K_Cn1", "lambda_Cn1", "satisfied_Cn1"});
  for (int m : ms) {
    const AssembledSystem sys = cached_system(with_layout(c, n, m), spec.out_dir);
    const CriterionResult c1 = criterion_lambda(sys, c.a, c.b, 1.0);
    const CriterionResult cn = criterion_lambda(sys, c.a, c.b, n - 1.0);
    csv.row({std::to_string(n), std::to_string(m), std::to_string(c1.grid.K), num(c1.lambda),
             c1.satisfied ? "1" : "0", std::to_string(cn.grid.K), num(cn.lambda), cn.satisfied ? "1" : "0"});
  }
  return {(dir / "sweep_m.csv").string()};
}

std::vector<std::string> run_reconstruct(const ExperimentSpec& spec) {
  const fs::path dir = prepare(spec.out_dir);
  const ExperimentConfig& c = spec.config;
  const AssembledSystem sys = cached_system(c, spec.out_dir);

  std::optional<Vector> truth;
  Matrix data;
  if (!c.measurement.empty()) {
    std::ifstream in(c.measurement);
    if (!in) throw ConfigError("cannot open measurement file '" + c.measurement + "'");
    data = read_measurement(in);
    if (data.rows() != sys.m) throw ConfigError("measurement file must hold an m x m matrix");
  } else {
    truth = true_gamma(c);
    data = measure(sys, *truth) + make_noise(sys.m, c.delta, noise_seed(c));
  }

  std::optional<CriterionResult> crit;
  if (c.certify_bound) crit = criterion_lambda(sys, c.a, c.b, sys.n - 1.0);
  SdpOptions opts = c.sdp;
  opts.seed = c.seed;
  const NoisySolution result =
      solve_sdp_noisy(sys, NoisyInput{data, c.delta}, c.a, c.b, opts, crit ? &*crit : nullptr);
  const SdpSolution& sol = result.solution;

  json out{{"status", to_string(sol.status)},
           {"objective", sol.objective},
           {"gamma_star", to_std(sol.gamma)},
           {"delta", c.delta},
           {"dofs", sys.dofs},
           {"n", sys.n},
           {"m", sys.m}};
  if (truth) {
    out["gamma_true"] = to_std(*truth);
    out["error_inf"] = (sol.gamma - *truth).lpNorm<Eigen::Infinity>();
    out["error_2"] = (sol.gamma - *truth).norm();
  }
  out["error_bound"] = result.error_bound ? json(*result.error_bound) : json(nullptr);
  if (crit) out["lambda"] = crit->lambda;
  out["kkt"] = kkt_json(sol.kkt);
  out["newton_steps"] = sol.newton_steps;
  write_json(dir / "reconstruct.json", out);

  Csv trace(dir / "sdp_trace.csv", {"iteration", "objective", "min_eig", "barrier_t", "phase"});
  for (std::size_t i = 0; i < sol.iterations.size(); ++i) {
    const SdpIterate& it = sol.iterations[i];
    trace.row({std::to_string(i), num(it.objective), num(it.min_eig), num(it.barrier_t), std::to_string(it.phase)});
  }
  return {(dir / "reconstruct.json").string(), (dir / "sdp_trace.csv").string()};
}

std::vector<std::string> run_landscape(const ExperimentSpec& spec) {
  const fs::path dir = prepare(spec.out_dir);
  const ExperimentConfig& c = spec.config;
  require_two(c, "landscape");
  const AssembledSystem sys = cached_system(c, spec.out_dir);
  const int R = c.grid_resolution;
  const Vector start = c.lsq_start.empty() ? Vector::Constant(2, 0.5 * (c.a + c.b)) : from_std(c.lsq_start);
  auto coord = [&](int p) { return c.a + (c.b - c.a) * p / (R - 1); };

  struct Cell {
    std::string sdp_status = "failed";
    double sdp_error = std::nan("");
    double lsq_error = std::nan("");
    int lsq_iterations = 0;
    std::string lsq_stop = "failed";
  };
  std::vector<Cell> cells(static_cast<std::size_t>(R) * R);
  SdpOptions opts = c.sdp;
  opts.exec = Exec::serial;

  for_each_index(Exec::parallel, cells.size(), [&](std::size_t idx) {
    Vector truth(2);
    truth << coord(static_cast<int>(idx) / R), coord(static_cast<int>(idx) % R);
    Cell& cell = cells[idx];
    Matrix data;
    try {
      data = measure(sys, truth);
    } catch (const std::exception&) {
      return;
    }
    try {
      const SdpSolution sol = solve_sdp(sys, data, c.a, c.b, opts);
      cell.sdp_status = to_string(sol.status);
      cell.sdp_error = (sol.gamma - truth).norm();
    } catch (const std::exception&) {
      cell.sdp_status = "failed";
    }
    try {
      const LsqResult lsq = lsq_baseline(sys, data, start, c.a, c.b);
      cell.lsq_error = (lsq.gamma - truth).norm();
      cell.lsq_iterations = lsq.iterations;
      cell.lsq_stop = lsq.stop_reason;
    } catch (const std::exception&) {
      cell.lsq_stop = "failed";
    }
  });

  double max_sdp = 0.0, max_lsq = 0.0;
  std::vector<double> at_sdp{coord(0), coord(0)}, at_lsq{coord(0), coord(0)};
  int failed = 0;
  {
    Csv csv(dir / "landscape.csv", {"p", "q", "gamma1", "gamma2", "sdp_status", "sdp_error", "lsq_error",
                                    "log10_sdp_error", "log10_lsq_error", "lsq_iterations", "lsq_stop"});
    for (int p = 0; p < R; ++p) {
      for (int q = 0; q < R; ++q) {
        const Cell& cell = cells[static_cast<std::size_t>(p) * R + q];
        csv.row({std::to_string(p), std::to_string(q), num(coord(p)), num(coord(q)), cell.sdp_status,
                 num(cell.sdp_error), num(cell.lsq_error), num(log_error(cell.sdp_error)),
                 num(log_error(cell.lsq_error)), std::to_string(cell.lsq_iterations), cell.lsq_stop});
        if (cell.sdp_status == "failed" || cell.lsq_stop == "failed") ++failed;
        if (cell.sdp_error > max_sdp) {
          max_sdp = cell.sdp_error;
          at_sdp = {coord(p), coord(q)};
        }
        if (cell.lsq_error > max_lsq) {
          max_lsq = cell.lsq_error;
          at_lsq = {coord(p), coord(q)};
        }
      }
    }
  }
  write_json(dir / "landscape_summary.json", json{{"resolution", R},
                                                  {"a", c.a},
                                                  {"b", c.b},
                                                  {"lsq_start", to_std(start)},
                                                  {"cells", cells.size()},
                                                  {"failed_cells", failed},
                                                  {"max_sdp_error", max_sdp},
                                                  {"max_sdp_error_at", at_sdp},
                                                  {"max_lsq_error", max_lsq},
                                                  {"max_lsq_error_at", at_lsq},
                                                  {"dofs", sys.dofs}});
  return {(dir / "landscape.csv").string(), (dir / "landscape_summary.json").string()};
}

std::vector<std::string> run_noise_sweep(const ExperimentSpec& spec) {
  const fs::path dir = prepare(spec.out_dir);
  const ExperimentConfig& c = spec.config;
  const AssembledSystem sys = cached_system(c, spec.out_dir);
  std::vector<double> deltas = c.delta_list;
  if (deltas.empty()) {
    for (int e = 1; e <= 10; ++e) deltas.push_back(std::pow(10.0, -e));
    deltas.push_back(0.0);
  }
  const Vector truth = true_gamma(c);
  const Matrix exact = measure(sys, truth);
  std::optional<CriterionResult> crit;
  if (c.certify_bound) crit = criterion_lambda(sys, c.a, c.b, sys.n - 1.0);

  struct Row {
    std::string status = "failed";
    double error_inf = std::nan("");
    double error_2 = std::nan("");
    double objective = std::nan("");
    std::optional<double> bound;
  };
  std::vector<Row> rows(deltas.size());
  SdpOptions opts = c.sdp;
  opts.seed = c.seed;
  // One noise direction for every level, scaled to each delta.
  for_each_index(Exec::parallel, deltas.size(), [&](std::size_t i) {
    const Matrix noisy = exact + make_noise(sys.m, deltas[i], noise_seed(c));
    try {
      const NoisySolution r = solve_sdp_noisy(sys, NoisyInput{noisy, deltas[i]}, c.a, c.b, opts, crit ? &*crit : nullptr);
      rows[i].status = to_string(r.solution.status);
      rows[i].error_inf = (r.solution.gamma - truth).lpNorm<Eigen::Infinity>();
      rows[i].error_2 = (r.solution.gamma - truth).norm();
      rows[i].objective = r.solution.objective;
      rows[i].bound = r.error_bound;
    } catch (const std::exception&) {
      rows[i].status = "failed";
    }
  });

  Csv csv(dir / "noise_sweep.csv", {"delta", "status", "error_inf", "error_2", "objective", "error_bound"});
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const Row& r = rows[i];
    csv.row({num(deltas[i]), r.status, num(r.error_inf), num(r.error_2), num(r.objective), r.bound ? num(*r.bound) : ""});
  }
  return {(dir / "noise_sweep.csv").string()};
}

std::vector<std::string> run_admissible(const ExperimentSpec& spec) {
  const fs::path dir = prepare(spec.out_dir);
  const ExperimentConfig& c = spec.config;
  require_two(c, "admissible");
  const AssembledSystem sys = cached_system(c, spec.out_dir);
  const std::vector<double> deltas = c.delta_list.empty() ? std::vector<double>{0.0, 1e-4, 1e-3, 1e-2} : c.delta_list;
  const Vector truth = true_gamma(c);
  const Matrix exact = measure(sys, truth);

  json counts = json::array();
  Csv csv(dir / "admissible.csv", {"delta", "p", "q", "gamma1", "gamma2", "admissible"});
  for (double delta : deltas) {
    const Matrix noisy = exact + make_noise(sys.m, delta, noise_seed(c));
    const AdmissibleGrid grid = admissible_set_sample(sys, noisy, delta, c.a, c.b, c.grid_resolution);
    int admitted = 0;
    for (int p = 0; p < grid.resolution; ++p) {
      for (int q = 0; q < grid.resolution; ++q) {
        admitted += grid.at(p, q) ? 1 : 0;
        csv.row({num(delta), std::to_string(p), std::to_string(q), num(grid.coord(p)), num(grid.coord(q)),
                 grid.at(p, q) ? "1" : "0"});
      }
    }
    counts.push_back({{"delta", delta}, {"admissible_cells", admitted}});
  }
  write_json(dir / "admissible_summary.json",
             json{{"resolution", c.grid_resolution}, {"gamma_true", to_std(truth)}, {"grids", counts}});
  return {(dir / "admissible.csv").string(), (dir / "admissible_summary.json").string()};
}

std::vector<std::string> run_experiment(const ExperimentSpec& spec) {
  switch (spec.command) {
    case Command::mesh:
      return run_mesh(spec);
    case Command::certify:
      return run_certify(spec);
    case Command::sweep_n:
      return run_sweep_n(spec);
    case Command::sweep_m:
      return run_sweep_m(spec);
    case Command::reconstruct:
      return run_reconstruct(spec);
    case Command::landscape:
      return run_landscape(spec);
    case Command::noise_sweep:
      return run_noise_sweep(spec);
    case Command::admissible:
      return run_admissible(spec);
  }
  return {};
}

}  // namespace robin
