#include "robin/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "robin/errors.hpp"

namespace robin {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) parts.push_back(trim(item));
  return parts;
}

class Reader {
public:
  Reader(std::string source, int line, std::string key) : source_(std::move(source)), line_(line), key_(std::move(key)) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(source_ + ":" + std::to_string(line_) + ": " + key_ + ": " + what);
  }

  double real(const std::string& text) const {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(v)) fail("expected a number, got '" + text + "'");
    return v;
  }

  long long integer(const std::string& text) const {
    long long v = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size()) fail("expected an integer, got '" + text + "'");
    return v;
  }

  int count(const std::string& text) const {
    const long long v = integer(text);
    if (v < 0 || v > 1000000) fail("value out of range");
    return static_cast<int>(v);
  }

  std::uint64_t unsigned64(const std::string& text) const {
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size()) fail("expected an unsigned integer, got '" + text + "'");
    return v;
  }

  bool boolean(const std::string& text) const {
    if (text == "1" || text == "true" || text == "yes") return true;
    if (text == "0" || text == "false" || text == "no") return false;
    fail("expected true or false, got '" + text + "'");
  }

  std::vector<double> reals(const std::string& text) const {
    std::vector<double> out;
    for (const std::string& part : split(text)) out.push_back(real(part));
    if (out.empty()) fail("empty list");
    return out;
  }

  std::vector<int> counts(const std::string& text) const {
    std::vector<int> out;
    for (const std::string& part : split(text)) out.push_back(count(part));
    if (out.empty()) fail("empty list");
    return out;
  }

private:
  std::string source_;
  int line_;
  std::string key_;
};

using Setter = std::function<void(ExperimentConfig&, const Reader&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"outer_radius", [](auto& c, const Reader& r, const auto& v) { c.geometry.outer_radius = r.real(v); }},
      {"inner_radius", [](auto& c, const Reader& r, const auto& v) { c.geometry.inner_radius = r.real(v); }},
      {"n", [](auto& c, const Reader& r, const auto& v) { c.geometry.n = r.count(v); }},
      {"m", [](auto& c, const Reader& r, const auto& v) { c.geometry.m = r.count(v); }},
      {"electrode_coverage", [](auto& c, const Reader& r, const auto& v) { c.geometry.electrode_coverage = r.real(v); }},
      {"partition_phase", [](auto& c, const Reader& r, const auto& v) { c.geometry.partition_phase = r.real(v); }},
      {"electrode_phase", [](auto& c, const Reader& r, const auto& v) { c.geometry.electrode_phase = r.real(v); }},
      {"refinement", [](auto& c, const Reader& r, const auto& v) { c.refinement = r.count(v); }},
      {"sigma1", [](auto& c, const Reader& r, const auto& v) { c.sigma.sigma1 = r.real(v); }},
      {"sigma2", [](auto& c, const Reader& r, const auto& v) { c.sigma.sigma2 = r.real(v); }},
      {"a", [](auto& c, const Reader& r, const auto& v) { c.a = r.real(v); }},
      {"b", [](auto& c, const Reader& r, const auto& v) { c.b = r.real(v); }},
      {"n_list", [](auto& c, const Reader& r, const auto& v) { c.n_list = r.counts(v); }},
      {"m_list", [](auto& c, const Reader& r, const auto& v) { c.m_list = r.counts(v); }},
      {"m_max", [](auto& c, const Reader& r, const auto& v) { c.m_max = r.count(v); }},
      {"delta_list", [](auto& c, const Reader& r, const auto& v) { c.delta_list = r.reals(v); }},
      {"delta", [](auto& c, const Reader& r, const auto& v) { c.delta = r.real(v); }},
      {"grid_resolution", [](auto& c, const Reader& r, const auto& v) { c.grid_resolution = r.count(v); }},
      {"gamma_true", [](auto& c, const Reader& r, const auto& v) { c.gamma_true = r.reals(v); }},
      {"lsq_start", [](auto& c, const Reader& r, const auto& v) { c.lsq_start = r.reals(v); }},
      {"measurement", [](auto& c, const Reader&, const auto& v) { c.measurement = v; }},
      {"certify_bound", [](auto& c, const Reader& r, const auto& v) { c.certify_bound = r.boolean(v); }},
      {"gap_tol", [](auto& c, const Reader& r, const auto& v) { c.sdp.gap_tol = r.real(v); }},
      {"feas_tol", [](auto& c, const Reader& r, const auto& v) { c.sdp.feas_tol = r.real(v); }},
      {"max_outer", [](auto& c, const Reader& r, const auto& v) { c.sdp.max_outer = r.count(v); }},
      {"max_newton", [](auto& c, const Reader& r, const auto& v) { c.sdp.max_newton = r.count(v); }},
      {"seed", [](auto& c, const Reader& r, const auto& v) { c.seed = r.unsigned64(v); }},
  };
  return table;
}

void validate(const ExperimentConfig& c, const std::string& source) {
  auto fail = [&source](const std::string& what) { throw ConfigError(source + ": " + what); };
  build_geometry(c.geometry);
  if (c.refinement < 1 || c.refinement > 12) fail("refinement must lie in 1..12");
  if (!(c.sigma.sigma1 > 0.0) || !(c.sigma.sigma2 > 0.0)) fail("sigma1 and sigma2 must be positive");
  if (!(c.a > 0.0) || !(c.a < c.b)) fail("bounds must satisfy 0 < a < b");
  if (c.m_max < 2) fail("m_max must be at least 2");
  if (c.grid_resolution < 2) fail("grid_resolution must be at least 2");
  if (c.delta < 0.0) fail("delta must be non-negative");
  for (double d : c.delta_list) {
    if (d < 0.0) fail("delta_list entries must be non-negative");
  }
  for (int n : c.n_list) {
    if (n < 2) fail("n_list entries must be at least 2");
  }
  for (int m : c.m_list) {
    if (m < 2) fail("m_list entries must be at least 2");
  }
  if (c.gamma_true) {
    if (static_cast<int>(c.gamma_true->size()) != c.geometry.n) fail("gamma_true must have n entries");
    for (double g : *c.gamma_true) {
      if (g < c.a || g > c.b) fail("gamma_true must lie in [a, b]");
    }
  }
  if (!c.lsq_start.empty()) {
    if (static_cast<int>(c.lsq_start.size()) != c.geometry.n) fail("lsq_start must have n entries");
    for (double g : c.lsq_start) {
      if (g < c.a || g > c.b) fail("lsq_start must lie in [a, b]");
    }
  }
  if (!(c.sdp.gap_tol > 0.0) || !(c.sdp.feas_tol > 0.0)) fail("gap_tol and feas_tol must be positive");
  if (c.sdp.max_outer < 1 || c.sdp.max_newton < 1) fail("max_outer and max_newton must be positive");
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  ExperimentConfig config;
  std::set<std::string> seen;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(raw.substr(0, raw.find('#')));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(source + ":" + std::to_string(line) + ": expected key = value");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    const Reader reader(source, line, key);
    const auto it = setters().find(key);
    if (it == setters().end()) reader.fail("unknown key");
    if (!seen.insert(key).second) reader.fail("repeated key");
    if (value.empty()) reader.fail("missing value");
    it->second(config, reader, value);
  }
  try {
    validate(config, source);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

}  // namespace robin
