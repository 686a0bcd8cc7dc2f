#ifndef ROBIN_EXPERIMENTS_HPP
#define ROBIN_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "robin/config.hpp"

namespace robin {

enum class Command { mesh, certify, sweep_n, sweep_m, reconstruct, landscape, noise_sweep, admissible };

std::optional<Command> parse_command(const std::string& name);
std::string command_name(Command command);

struct ExperimentSpec {
  Command command = Command::certify;
  ExperimentConfig config;
  std::string out_dir = ".";
  bool deterministic = false;
};

// Deterministic per-cell seed from the master seed and a cell index.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Loads the system for the configured geometry from <out>/cache or builds
// and stores it there.
AssembledSystem cached_system(const ExperimentConfig& config, const std::string& out_dir);

// Each runner writes its CSV/JSON artifacts into spec.out_dir and returns
// the list of files written. Layouts are documented in docs/experiments.md.
std::vector<std::string> run_mesh(const ExperimentSpec& spec);
std::vector<std::string> run_certify(const ExperimentSpec& spec);
std::vector<std::string> run_sweep_n(const ExperimentSpec& spec);
std::vector<std::string> run_sweep_m(const ExperimentSpec& spec);
std::vector<std::string> run_reconstruct(const ExperimentSpec& spec);
std::vector<std::string> run_landscape(const ExperimentSpec& spec);
std::vector<std::string> run_noise_sweep(const ExperimentSpec& spec);
std::vector<std::string> run_admissible(const ExperimentSpec& spec);

std::vector<std::string> run_experiment(const ExperimentSpec& spec);

}  // namespace robin

#endif  // ROBIN_EXPERIMENTS_HPP
