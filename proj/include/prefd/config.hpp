#pragma once

#include "prefd/harness.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace prefd {

/// Sectioned key-value configuration file:
///
///   [discretization]
///   n_ladder = 1000 3000 10000 30000
///   seed = 1
///   [refinement]
///   zones = [[0.2, 6], [0.4, 4]]
///   default_order = 2
///
/// `#` and `;` start comments. Keys before any section header live in the
/// section with the empty name.
class Config {
 public:
  static Config parse(std::istream& in);
  static Config parse_file(const std::filesystem::path& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  long long get_int(const std::string& section, const std::string& key, long long fallback) const;

  /// All numbers in the value, in order; brackets and commas are separators.
  std::vector<double> get_numbers(const std::string& section, const std::string& key) const;

 private:
  std::map<std::string, std::map<std::string, std::string>> values_;
};

/// Everything the command line needs, resolved from a Config with defaults
/// for all missing keys.
struct HarnessSetup {
  std::shared_ptr<BallDomain> domain;
  PoissonProblem problem;
  RadialZoneSpec order_spec;  // for single runs
  SweepConfig sweep;          // for convergence sweeps
  double single_h = 0.0;      // [discretization] h / n for single runs
  Eigen::Index single_n = 0;
};

HarnessSetup load_setup(const Config& config);
HarnessSetup default_setup();

}  // namespace prefd
