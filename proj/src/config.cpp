#include "prefd/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace prefd {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_names(const std::string& value) {
  std::vector<std::string> names;
  std::string cur;
  for (char ch : value) {
    if (std::isspace(static_cast<unsigned char>(ch)) || ch == ',') {
      if (!cur.empty()) names.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) names.push_back(std::move(cur));
  return names;
}

[[noreturn]] void bad_value(const std::string& section, const std::string& key,
                            const std::string& value, const char* wanted) {
  throw std::invalid_argument("config: [" + section + "] " + key + " = '" + value +
                              "' is not " + wanted);
}

}  // namespace

Config Config::parse(std::istream& in) {
  Config cfg;
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw std::runtime_error("config: line " + std::to_string(lineno) +
                                 ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config: line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw std::runtime_error("config: line " + std::to_string(lineno) + ": empty key");
    }
    cfg.values_[section][key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

Config Config::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path.string());
  return parse(in);
}

Config Config::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

bool Config::has(const std::string& section, const std::string& key) const {
  const auto sec = values_.find(section);
  return sec != values_.end() && sec->second.count(key) != 0;
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  const auto sec = values_.find(section);
  if (sec == values_.end()) return fallback;
  const auto it = sec->second.find(key);
  return it == sec->second.end() ? fallback : it->second;
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
  if (!has(section, key)) return fallback;
  const std::string value = get_string(section, key, "");
  char* end = nullptr;
  const double parsed = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0') bad_value(section, key, value, "a number");
  return parsed;
}

long long Config::get_int(const std::string& section, const std::string& key,
                          long long fallback) const {
  if (!has(section, key)) return fallback;
  const std::string value = get_string(section, key, "");
  char* end = nullptr;
  const long long parsed = std::strtoll(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0') bad_value(section, key, value, "an integer");
  return parsed;
}

std::vector<double> Config::get_numbers(const std::string& section, const std::string& key) const {
  std::vector<double> numbers;
  const std::string value = get_string(section, key, "");
  auto is_number_char = [](char ch) {
    return std::isdigit(static_cast<unsigned char>(ch)) || ch == '.' || ch == '+' || ch == '-' ||
           ch == 'e' || ch == 'E';
  };
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    char* end = nullptr;
    const double parsed = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0') bad_value(section, key, token, "a number");
    numbers.push_back(parsed);
    token.clear();
  };
  for (char ch : value) {
    if (is_number_char(ch)) {
      token.push_back(ch);
    } else {
      flush();
    }
  }
  flush();
  return numbers;
}

HarnessSetup load_setup(const Config& config) {
  HarnessSetup setup;

  const std::vector<double> center = config.get_numbers("domain", "center");
  const int dim = center.empty() ? static_cast<int>(config.get_int("domain", "dimension", 2))
                                 : static_cast<int>(center.size());
  Vector domain_center = Vector::Zero(dim);
  for (int a = 0; a < static_cast<int>(center.size()); ++a) domain_center[a] = center[a];
  const double radius = config.get_double("domain", "radius", 1.5);
  setup.domain = std::make_shared<BallDomain>(domain_center, radius);
  setup.problem = strong_source_problem(setup.domain);

  if (config.has("refinement", "zones")) {
    const std::vector<double> pairs = config.get_numbers("refinement", "zones");
    if (pairs.empty() || pairs.size() % 2 != 0) {
      throw std::invalid_argument("config: [refinement] zones needs [radius, order] pairs");
    }
    RadialZoneSpec spec;
    spec.name = config.get_string("refinement", "name", "custom");
    spec.default_order = static_cast<int>(config.get_int("refinement", "default_order", 2));
    spec.center = Vector::Constant(dim, 0.5);
    const std::vector<double> source = config.get_numbers("refinement", "source");
    if (!source.empty()) {
      if (static_cast<int>(source.size()) != dim) {
        throw std::invalid_argument("config: [refinement] source has wrong dimension");
      }
      for (int a = 0; a < dim; ++a) spec.center[a] = source[a];
    }
    for (std::size_t i = 0; i < pairs.size(); i += 2) {
      spec.zones.push_back({pairs[i], static_cast<int>(pairs[i + 1])});
    }
    std::sort(spec.zones.begin(), spec.zones.end(),
              [](const RadialZone& a, const RadialZone& b) { return a.radius < b.radius; });
    for (std::size_t i = 0; i < spec.zones.size(); ++i) {
      if (spec.zones[i].radius < 0.0 || spec.zones[i].order < 1 ||
          (i > 0 && spec.zones[i].radius == spec.zones[i - 1].radius)) {
        throw std::invalid_argument("config: [refinement] zones need distinct radii >= 0 "
                                    "and orders >= 1");
      }
    }
    setup.order_spec = spec;
  } else {
    setup.order_spec = preset(config.get_string("refinement", "preset", "c2"), dim);
  }

  SolveConfig solve;
  solve.seed = static_cast<std::uint64_t>(config.get_int("discretization", "seed", 1));
  solve.phs_exponent = static_cast<int>(config.get_int("basis", "k", 3));
  solve.tol = config.get_double("solver", "tol", 1e-10);
  solve.threads = static_cast<int>(config.get_int("solver", "threads", 1));
  solve.fill_candidates = static_cast<int>(config.get_int("discretization", "candidates", 15));
  solve.spacing_calibration =
      config.get_double("discretization", "calibration", kSpacingCalibration);
  const std::string method = config.get_string("solver", "method", "auto");
  if (method == "auto") {
    solve.solver = SolverKind::Auto;
  } else if (method == "direct") {
    solve.solver = SolverKind::Direct;
  } else if (method == "iterative") {
    solve.solver = SolverKind::Iterative;
  } else {
    throw std::invalid_argument("config: [solver] method '" + method +
                                "' is not auto, direct or iterative");
  }

  setup.single_h = config.get_double("discretization", "h", 0.0);
  setup.single_n = static_cast<Eigen::Index>(config.get_int("discretization", "n", 0));

  setup.sweep.problem = setup.problem;
  setup.sweep.solve = solve;
  for (double n : config.get_numbers("discretization", "n_ladder")) {
    setup.sweep.n_ladder.push_back(static_cast<Eigen::Index>(n));
  }
  setup.sweep.h_ladder = config.get_numbers("discretization", "h_ladder");
  if (setup.sweep.n_ladder.empty() && setup.sweep.h_ladder.empty()) {
    setup.sweep.n_ladder = {1000, 3000, 10000, 30000};
  }
  setup.sweep.repeats = static_cast<int>(config.get_int("sweep", "repeats", 5));
  setup.sweep.fit_min_n = config.get_double("sweep", "fit_min_n", 4000.0);
  const std::string spec_names =
      config.get_string("sweep", "specs", "uniform-2 uniform-4 uniform-6 c1 c2 c3");
  for (const std::string& name : split_names(spec_names)) {
    setup.sweep.order_specs.push_back(preset(name, dim));
  }

  return setup;
}

HarnessSetup default_setup() { return load_setup(Config{}); }

}  // namespace prefd
