#ifndef ROBIN_CONFIG_HPP
#define ROBIN_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "robin/assembly.hpp"
#include "robin/geometry.hpp"
#include "robin/reconstruct.hpp"

namespace robin {

/// Settings read from a `key = value` text file. Blank lines and text after
/// '#' are ignored; list values are comma separated. Unknown keys, repeated
/// keys and malformed values raise ConfigError.
struct ExperimentConfig {
  GeometryConfig geometry;
  int refinement = 2;
  Conductivity sigma;

  double a = 1.0;
  double b = 3.0;
  std::vector<int> n_list;  // defaults to {geometry.n}
  std::vector<int> m_list;  // defaults to 2..m_max
  int m_max = 30;
  std::vector<double> delta_list;
  double delta = 0.0;
  int grid_resolution = 21;

  std::optional<std::vector<double>> gamma_true;  // drawn from the seed when absent
  std::vector<double> lsq_start;                  // defaults to the box midpoint
  std::string measurement;                        // measured data file for reconstruct
  bool certify_bound = false;                     // compute the noisy error bound

  SdpOptions sdp;
  std::uint64_t seed = 0;
};

ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

}  // namespace robin

#endif  // ROBIN_CONFIG_HPP
