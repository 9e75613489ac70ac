#include "prefd/config.hpp"

#include "doctest.h"

#include <filesystem>
#include <fstream>

using namespace prefd;

TEST_CASE("config parsing basics") {
  const Config cfg = Config::parse_string(
      "top = 1\n"
      "[domain]\n"
      "radius = 2.5   # trailing comment\n"
      "center = 0.0 0.0\n"
      "; full-line comment\n"
      "\n"
      "[solver]\r\n"
      "method = direct\r\n"
      "tol = 1e-8\n"
      "tol = 1e-6\n");

  CHECK(cfg.has("", "top"));
  CHECK(cfg.get_int("", "top", -1) == 1);
  CHECK(cfg.has("domain", "radius"));
  CHECK(!cfg.has("domain", "missing"));
  CHECK(!cfg.has("missing", "radius"));
  CHECK(cfg.get_double("domain", "radius", 0.0) == 2.5);
  CHECK(cfg.get_string("solver", "method", "auto") == "direct");
  CHECK(cfg.get_double("solver", "tol", 0.0) == 1e-6);  // last assignment wins
  CHECK(cfg.get_string("domain", "missing", "fallback") == "fallback");
  CHECK(cfg.get_double("domain", "missing", 7.25) == 7.25);
  CHECK(cfg.get_int("domain", "missing", -3) == -3);
}

TEST_CASE("config number lists") {
  const Config cfg = Config::parse_string(
      "[refinement]\n"
      "zones = [[0.2, 6], [0.4, 4]]\n"
      "[discretization]\n"
      "n_ladder = 1000 3000 10000 30000\n"
      "h_ladder = 1e-1, 5e-2\n"
      "empty =\n");

  CHECK(cfg.get_numbers("refinement", "zones") == std::vector<double>{0.2, 6.0, 0.4, 4.0});
  CHECK(cfg.get_numbers("discretization", "n_ladder") ==
        std::vector<double>{1000.0, 3000.0, 10000.0, 30000.0});
  CHECK(cfg.get_numbers("discretization", "h_ladder") == std::vector<double>{0.1, 0.05});
  CHECK(cfg.get_numbers("discretization", "empty").empty());
  CHECK(cfg.get_numbers("discretization", "absent").empty());
}

TEST_CASE("config parse errors") {
  CHECK_THROWS_WITH_AS(Config::parse_string("[domain\nradius = 1\n"),
                       doctest::Contains("line 1"), std::runtime_error);
  CHECK_THROWS_WITH_AS(Config::parse_string("[domain]\njust words\n"),
                       doctest::Contains("line 2"), std::runtime_error);
  CHECK_THROWS_AS(Config::parse_string("= 3\n"), std::runtime_error);
  CHECK_THROWS_AS(Config::parse_file("/no/such/config.ini"), std::runtime_error);

  const Config cfg = Config::parse_string("[a]\nx = not-a-number\ny = 1.5zzz\n");
  CHECK_THROWS_AS(cfg.get_double("a", "x", 0.0), std::invalid_argument);
  CHECK_THROWS_AS(cfg.get_int("a", "y", 0), std::invalid_argument);
}

TEST_CASE("config file round trip") {
  namespace fs = std::filesystem;
  const fs::path path = fs::temp_directory_path() / "prefd_test_config.ini";
  {
    std::ofstream out(path);
    out << "[domain]\nradius = 0.75\n";
  }
  const Config cfg = Config::parse_file(path);
  CHECK(cfg.get_double("domain", "radius", 0.0) == 0.75);
  fs::remove(path);
}

TEST_CASE("default setup") {
  const HarnessSetup setup = default_setup();
  REQUIRE(setup.domain);
  CHECK(setup.domain->dimension() == 2);
  CHECK(setup.domain->radius() == 1.5);
  CHECK(setup.domain->center() == Vector::Zero(2));
  CHECK(setup.problem.name == "strong-source");
  CHECK(setup.order_spec.name == "c2");
  CHECK(setup.single_h == 0.0);
  CHECK(setup.single_n == 0);

  CHECK(setup.sweep.n_ladder ==
        std::vector<Eigen::Index>{1000, 3000, 10000, 30000});
  CHECK(setup.sweep.h_ladder.empty());
  CHECK(setup.sweep.repeats == 5);
  CHECK(setup.sweep.fit_min_n == 4000.0);
  REQUIRE(setup.sweep.order_specs.size() == 6);
  CHECK(setup.sweep.order_specs[0].name == "uniform-2");
  CHECK(setup.sweep.order_specs[2].name == "uniform-6");
  CHECK(setup.sweep.order_specs[5].name == "c3");

  CHECK(setup.sweep.solve.seed == 1);
  CHECK(setup.sweep.solve.phs_exponent == 3);
  CHECK(setup.sweep.solve.tol == 1e-10);
  CHECK(setup.sweep.solve.threads == 1);
  CHECK(setup.sweep.solve.solver == SolverKind::Auto);
  CHECK(setup.sweep.solve.fill_candidates == 15);
  CHECK(setup.sweep.solve.spacing_calibration == kSpacingCalibration);
}

TEST_CASE("setup from a full configuration") {
  const HarnessSetup setup = load_setup(Config::parse_string(
      "[domain]\n"
      "center = 1.0 -1.0\n"
      "radius = 2.0\n"
      "[discretization]\n"
      "h = 0.05\n"
      "n = 4000\n"
      "seed = 9\n"
      "candidates = 20\n"
      "calibration = 0.9\n"
      "n_ladder = 500 2000\n"
      "[refinement]\n"
      "zones = [[0.4, 4], [0.2, 6]]\n"  // out of order on purpose
      "source = 0.25 0.25\n"
      "default_order = 2\n"
      "name = tight\n"
      "[basis]\n"
      "k = 5\n"
      "[solver]\n"
      "method = iterative\n"
      "tol = 1e-8\n"
      "threads = 4\n"
      "[sweep]\n"
      "repeats = 2\n"
      "fit_min_n = 1500\n"
      "specs = uniform-2, c3\n"));

  CHECK(setup.domain->radius() == 2.0);
  CHECK(setup.domain->center()[0] == 1.0);
  CHECK(setup.domain->center()[1] == -1.0);

  CHECK(setup.order_spec.name == "tight");
  REQUIRE(setup.order_spec.zones.size() == 2);
  CHECK(setup.order_spec.zones[0].radius == 0.2);  // sorted by radius
  CHECK(setup.order_spec.zones[0].order == 6);
  CHECK(setup.order_spec.zones[1].radius == 0.4);
  CHECK(setup.order_spec.center[0] == 0.25);

  CHECK(setup.single_h == 0.05);
  CHECK(setup.single_n == 4000);
  CHECK(setup.sweep.n_ladder == std::vector<Eigen::Index>{500, 2000});
  CHECK(setup.sweep.repeats == 2);
  CHECK(setup.sweep.fit_min_n == 1500.0);
  REQUIRE(setup.sweep.order_specs.size() == 2);
  CHECK(setup.sweep.order_specs[1].name == "c3");

  CHECK(setup.sweep.solve.seed == 9);
  CHECK(setup.sweep.solve.phs_exponent == 5);
  CHECK(setup.sweep.solve.tol == 1e-8);
  CHECK(setup.sweep.solve.threads == 4);
  CHECK(setup.sweep.solve.solver == SolverKind::Iterative);
  CHECK(setup.sweep.solve.fill_candidates == 20);
  CHECK(setup.sweep.solve.spacing_calibration == 0.9);
}

TEST_CASE("setup rejects inconsistent input") {
  CHECK_THROWS_AS(load_setup(Config::parse_string("[refinement]\nzones = [[0.1, 6], [0.2]]\n")),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      load_setup(Config::parse_string("[refinement]\nzones = [[0.1, 6], [0.1, 4]]\n")),
      std::invalid_argument);
  CHECK_THROWS_AS(load_setup(Config::parse_string("[refinement]\nzones = [[-0.1, 6]]\n")),
                  std::invalid_argument);
  CHECK_THROWS_AS(load_setup(Config::parse_string("[refinement]\nzones = [[0.1, 0]]\n")),
                  std::invalid_argument);
  CHECK_THROWS_AS(load_setup(Config::parse_string(
                      "[refinement]\nzones = [[0.1, 6]]\nsource = 0.5 0.5 0.5\n")),
                  std::invalid_argument);
  CHECK_THROWS_AS(load_setup(Config::parse_string("[solver]\nmethod = gaussian\n")),
                  std::invalid_argument);
  CHECK_THROWS_AS(load_setup(Config::parse_string("[sweep]\nspecs = uniform-9\n")),
                  std::invalid_argument);
  CHECK_THROWS_AS(load_setup(Config::parse_string("[refinement]\npreset = nope\n")),
                  std::invalid_argument);
  CHECK_THROWS_AS(load_setup(Config::parse_string("[domain]\nradius = -1\n")),
                  std::invalid_argument);
}
