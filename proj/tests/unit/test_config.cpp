#include <doctest.h>

#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "afdmsense/config.hpp"

using namespace afdmsense;

namespace {

SweepConfig parse_str(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

const char* kMinimal =
    "n_sub = 64\n"
    "num_paths = 3\n"
    "snr_db = 20\n";

}  // namespace

TEST_SUITE("config") {

TEST_CASE("scalar keys land on the base scenario") {
  const SweepConfig cfg = parse_str(
      "n_sub = 128\n"
      "c1 = auto\n"
      "c2 = 0.25\n"
      "delta_f = 1e4\n"
      "f_c = 3e9\n"
      "k_v = 4\n"
      "num_paths = 5\n"
      "est_num_paths = 4\n"
      "shape_m = 2.5\n"
      "velocity_kmh = 90\n"
      "snr_db = 15\n"
      "g0 = 0.5\n"
      "d0_true = 42\n"
      "fading_exp_los = 2.0\n"
      "fading_exp_nlos = 3.0\n"
      "tap_min = 2\n"
      "tap_max = 12\n"
      "trials = 7\n"
      "seed = 99\n"
      "crb_draws = 11\n"
      "eps1 = 1e-5\n"
      "eps2 = 1e-6\n"
      "max_iter_ec = 123\n"
      "max_iter_em = 45\n"
      "damping = 0.8\n"
      "relinearize = true\n"
      "lambda_min = 1e-7\n"
      "lambda_max = 1e7\n"
      "d0_init = 20\n"
      "d0_lower = 0.5\n"
      "d0_upper = 2e4\n");
  const ScenarioConfig& b = cfg.base;
  CHECK(b.afdm.n_sub == 128);
  CHECK(b.afdm.c1 == -1.0);  // auto sentinel
  CHECK(b.afdm.c2 == 0.25);
  CHECK(b.afdm.delta_f == 1e4);
  CHECK(b.afdm.f_c == 3e9);
  CHECK(b.afdm.k_v == 4);
  CHECK(b.num_paths == 5);
  CHECK(b.est_num_paths == 4);
  CHECK(b.shape_m == 2.5);
  CHECK(b.velocity_kmh == 90.0);
  CHECK(b.snr_db == 15.0);
  CHECK(b.g0 == 0.5);
  CHECK(b.d0_true == 42.0);
  CHECK(b.fading_exp_los == 2.0);
  CHECK(b.fading_exp_nlos == 3.0);
  CHECK(b.tap_min == 2);
  CHECK(b.tap_max == 12);
  CHECK(b.trials == 7);
  CHECK(b.seed == 99);
  CHECK(b.crb_draws == 11);
  CHECK(b.solver.eps1 == 1e-5);
  CHECK(b.solver.eps2 == 1e-6);
  CHECK(b.solver.max_iter_ec == 123);
  CHECK(b.solver.max_iter_em == 45);
  CHECK(b.solver.damping == 0.8);
  CHECK(b.solver.relinearize);
  CHECK(b.solver.lambda_min == 1e-7);
  CHECK(b.solver.lambda_max == 1e7);
  CHECK(b.solver.d0_init == 20.0);
  CHECK(b.solver.d0_lower == 0.5);
  CHECK(b.solver.d0_upper == 2e4);
  // no lists given: every axis empty
  CHECK(cfg.axes.num_paths.empty());
  CHECK(cfg.axes.snr_db.empty());
}

TEST_CASE("comments, blank lines, and whitespace are tolerated") {
  const SweepConfig cfg = parse_str(
      "# full-line comment\n"
      "\n"
      "  n_sub   =  32   # trailing comment\n"
      "\t\n"
      "snr_db=5\n");
  CHECK(cfg.base.afdm.n_sub == 32);
  CHECK(cfg.base.snr_db == 5.0);
}

TEST_CASE("list values populate the sweep axes") {
  const SweepConfig cfg = parse_str(
      "num_paths = 3, 7, 11\n"
      "shape_m = 1, 5\n"
      "velocity_kmh = 30, 60\n"
      "est_num_paths = 0, 6\n"
      "snr_db = 0, 10, 20, 30\n");
  CHECK(cfg.axes.num_paths == std::vector<int>{3, 7, 11});
  CHECK(cfg.axes.shape_m == std::vector<double>{1.0, 5.0});
  CHECK(cfg.axes.velocity_kmh == std::vector<double>{30.0, 60.0});
  CHECK(cfg.axes.est_num_paths == std::vector<int>{0, 6});
  CHECK(cfg.axes.snr_db == std::vector<double>{0.0, 10.0, 20.0, 30.0});
  // single-element list collapses to a scalar
  const SweepConfig one = parse_str("snr_db = 25\n");
  CHECK(one.axes.snr_db.empty());
  CHECK(one.base.snr_db == 25.0);
}

TEST_CASE("parse errors carry the line number") {
  auto expect_throw = [](const std::string& text, const char* needle) {
    try {
      parse_str(text);
      FAIL_CHECK("no exception for: " << text);
    } catch (const std::runtime_error& e) {
      CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos,
                    e.what());
    }
  };
  expect_throw("bogus_key = 1\n", "unknown key");
  expect_throw("n_sub = 64\nn_sub = 32\n", "line 2");
  expect_throw("n_sub = 64\nn_sub = 32\n", "duplicate");
  expect_throw("n_sub =\n", "empty value");
  expect_throw("= 3\n", "empty key");
  expect_throw("n_sub 64\n", "expected 'key = value'");
  expect_throw("n_sub = abc\n", "cannot parse");
  expect_throw("n_sub = 64x\n", "trailing");
  expect_throw("trials = 3, 4\n", "does not accept a list");
  expect_throw("relinearize = maybe\n", "true/false");
}

TEST_CASE("serialize/parse round trip is exact") {
  const SweepConfig cfg = parse_str(
      "n_sub = 64\n"
      "c1 = auto\n"
      "eps1 = 0.037199999999999997\n"
      "num_paths = 3, 7\n"
      "snr_db = 0, 12.5\n"
      "velocity_kmh = 61.3\n");
  const std::string text = serialize_config(cfg);
  const SweepConfig back = parse_str(text);
  CHECK(serialize_config(back) == text);
  CHECK(back.base.solver.eps1 == cfg.base.solver.eps1);
  CHECK(back.axes.num_paths == cfg.axes.num_paths);
  CHECK(back.axes.snr_db == cfg.axes.snr_db);
  CHECK(back.base.velocity_kmh == 61.3);
  CHECK(back.base.afdm.c1 == -1.0);
  // canonical output mentions auto, not a negative number
  CHECK(text.find("c1 = auto") != std::string::npos);
}

TEST_CASE("grid expansion order and scenario ids") {
  const SweepConfig cfg = parse_str(
      "num_paths = 3, 7\n"
      "shape_m = 1, 5\n"
      "velocity_kmh = 30, 60\n"
      "est_num_paths = 0, 2\n"
      "snr_db = 0, 10, 20\n");
  const auto grid = expand_grid(cfg);
  REQUIRE(grid.size() == 2 * 2 * 2 * 2 * 3);
  // snr fastest, then est_num_paths, velocity, shape, num_paths slowest
  CHECK(grid[0].scn.num_paths == 3);
  CHECK(grid[0].scn.snr_db == 0.0);
  CHECK(grid[1].scn.snr_db == 10.0);
  CHECK(grid[2].scn.snr_db == 20.0);
  CHECK(grid[3].scn.est_num_paths == 2);
  CHECK(grid[3].scn.snr_db == 0.0);
  CHECK(grid[6].scn.velocity_kmh == 60.0);
  CHECK(grid[12].scn.shape_m == 5.0);
  CHECK(grid[24].scn.num_paths == 7);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(grid[i].scenario_id == static_cast<int>(i));

  // geometry keys: shared across est_num_paths and snr, distinct otherwise
  CHECK(grid[0].geom_key == grid[1].geom_key);
  CHECK(grid[0].geom_key == grid[3].geom_key);   // est axis
  CHECK(grid[0].geom_key == grid[5].geom_key);   // both
  CHECK(grid[0].geom_key != grid[6].geom_key);   // velocity
  CHECK(grid[0].geom_key != grid[12].geom_key);  // shape
  CHECK(grid[0].geom_key != grid[24].geom_key);  // num_paths
  std::set<std::uint64_t> keys;
  for (const auto& p : grid) keys.insert(p.geom_key);
  CHECK(keys.size() == 2 * 2 * 2);  // one per geometry combo

  // no axes: a single point with the base scenario
  const auto single = expand_grid(parse_str(kMinimal));
  REQUIRE(single.size() == 1);
  CHECK(single[0].scenario_id == 0);
  CHECK(single[0].scn.afdm.n_sub == 64);
}

TEST_CASE("expansion validates every point") {
  // tap range cannot host 30 distinct NLoS taps
  const SweepConfig cfg = parse_str(
      "num_paths = 3, 31\n"
      "tap_max = 20\n");
  CHECK_THROWS(expand_grid(cfg));
}

TEST_CASE("load_config reports the path on failure") {
  try {
    load_config("/nonexistent/x.cfg");
    FAIL_CHECK("no exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("/nonexistent/x.cfg") !=
          std::string::npos);
  }
}

}  // TEST_SUITE
