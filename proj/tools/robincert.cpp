#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "robin/errors.hpp"
#include "robin/experiments.hpp"
#include "robin/parallel.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kNumeric = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability certification and convex reconstruction for the Robin transmission problem"};
  std::string command;
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool deterministic = false;

  app.add_option("command", command, "mesh | certify | sweep-n | sweep-m | reconstruct | landscape | noise-sweep | admissible")
      ->required();
  app.add_option("--config", config_path, "key = value configuration file")->required();
  app.add_option("--out", out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "master seed, overrides the config");
  app.add_flag("--deterministic", deterministic, "static OpenMP schedule for reproducible runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  const auto parsed = robin::parse_command(command);
  if (!parsed) {
    std::cerr << "error: unknown command '" << command << "'\n";
    return kUsage;
  }

  try {
    robin::ExperimentSpec spec;
    spec.command = *parsed;
    spec.config = robin::load_config(config_path);
    if (*seed_opt) spec.config.seed = seed;
    spec.out_dir = out_dir;
    spec.deterministic = deterministic;
    robin::set_deterministic(deterministic);

    for (const std::string& file : robin::run_experiment(spec)) std::cout << file << '\n';
    return kOk;
  } catch (const robin::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const robin::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  }
}
