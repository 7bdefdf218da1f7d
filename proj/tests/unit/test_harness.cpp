#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "afdmsense/harness.hpp"

using namespace afdmsense;

namespace {

SweepConfig tiny_sweep() {
  std::istringstream in(
      "n_sub = 32\n"
      "num_paths = 2\n"
      "tap_max = 8\n"
      "trials = 6\n"
      "seed = 3\n"
      "snr_db = 10, 20\n"
      "est_num_paths = 0, 1\n"
      "crb_draws = 4\n"
      "max_iter_ec = 200\n"
      "max_iter_em = 50\n");
  return parse_config(in);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool same_record(const TrialRecord& a, const TrialRecord& b) {
  auto eq = [](double x, double y) {
    return (std::isnan(x) && std::isnan(y)) || x == y;
  };
  return a.scenario_id == b.scenario_id && a.trial_index == b.trial_index &&
         eq(a.d0_true, b.d0_true) && eq(a.d0_hat, b.d0_hat) &&
         eq(a.d0_hat_baseline, b.d0_hat_baseline) &&
         eq(a.nu1_true, b.nu1_true) && eq(a.nu1_hat, b.nu1_hat) &&
         eq(a.vlos_true, b.vlos_true) && eq(a.vlos_hat, b.vlos_hat) &&
         a.converged == b.converged && a.em_iters == b.em_iters &&
         a.ec_iters_total == b.ec_iters_total &&
         eq(a.fixed_point_residual, b.fixed_point_residual) &&
         a.clamp_count == b.clamp_count;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("run_trial is deterministic and fills the physics fields") {
  const auto grid = expand_grid(tiny_sweep());
  REQUIRE(grid.size() == 4);
  const TrialRecord a = run_trial(grid[0], 2);
  const TrialRecord b = run_trial(grid[0], 2);
  CHECK(same_record(a, b));
  CHECK(a.scenario_id == 0);
  CHECK(a.trial_index == 2);
  CHECK(a.d0_true == 100.0);
  // 60 km/h at 90 GHz / 15 kHz: nu1 = cos(theta)/3, |nu1| <= 1/3
  CHECK(std::abs(a.nu1_true) <= 1.0 / 3.0 + 1e-12);
  CHECK(a.vlos_true ==
        doctest::Approx(a.nu1_true * 3e8 * 15e3 / 90e9).epsilon(1e-12));
  CHECK(std::isfinite(a.d0_hat));
  CHECK(std::isfinite(a.d0_hat_baseline));
  CHECK(a.d0_hat_baseline > 0.0);
  CHECK(a.em_iters >= 1);
  CHECK(a.ec_iters_total >= a.em_iters);

  // different trials draw different channels
  const TrialRecord c = run_trial(grid[0], 3);
  CHECK(a.nu1_true != c.nu1_true);
  // same geometry key: the channel draw matches across the snr axis
  const TrialRecord d = run_trial(grid[1], 2);
  CHECK(grid[1].scn.snr_db != grid[0].scn.snr_db);
  CHECK(a.nu1_true == d.nu1_true);
  CHECK(a.d0_true == d.d0_true);
  CHECK_THROWS(run_trial(grid[0], -1));
  CHECK_THROWS(run_trial(grid[0], 6));
}

TEST_CASE("summarize aggregates rmse, nrmse, and failures") {
  GridPoint gp;
  gp.scenario_id = 5;
  gp.scn.num_paths = 2;
  gp.scn.shape_m = 2.0;
  gp.scn.velocity_kmh = 50.0;
  gp.scn.snr_db = 12.0;
  gp.scn.est_num_paths = 0;

  std::vector<TrialRecord> recs(4);
  for (int i = 0; i < 4; ++i) {
    recs[i].scenario_id = 5;
    recs[i].trial_index = i;
    recs[i].d0_true = 100.0;
    recs[i].converged = true;
  }
  recs[0].d0_hat = 103.0;
  recs[0].d0_hat_baseline = 90.0;
  recs[0].nu1_true = 0.2;
  recs[0].nu1_hat = 0.25;
  recs[1].d0_hat = 96.0;
  recs[1].d0_hat_baseline = 110.0;
  recs[1].nu1_true = -0.1;
  recs[1].nu1_hat = -0.08;
  recs[2].d0_hat = 100.0;
  recs[2].d0_hat_baseline = 100.0;
  recs[2].nu1_true = 0.0;  // excluded from NRMSE
  recs[2].nu1_hat = 0.01;
  recs[3].d0_hat = std::nan("");  // estimator failure
  recs[3].d0_hat_baseline = 120.0;
  recs[3].nu1_true = 0.3;
  recs[3].nu1_hat = std::nan("");
  recs[3].converged = false;

  const SweepSummary s = summarize(gp, recs);
  CHECK(s.scenario_id == 5);
  CHECK(s.num_paths == 2);
  CHECK(s.shape_m == 2.0);
  CHECK(s.velocity_kmh == 50.0);
  CHECK(s.snr_db == 12.0);
  // trials counts records entering the rmse; the failed one is excluded
  // from both estimator and baseline columns (paired comparison)
  CHECK(s.trials == 3);
  CHECK(s.failures == 1);
  CHECK(s.rmse_d0 ==
        doctest::Approx(std::sqrt((9.0 + 16.0 + 0.0) / 3.0)).epsilon(1e-12));
  CHECK(s.rmse_d0_baseline ==
        doctest::Approx(std::sqrt((100.0 + 100.0 + 0.0) / 3.0)).epsilon(1e-12));
  // nrmse over records 0 and 1 only (record 2 is zero-doppler, 3 failed)
  const double e0 = 0.05 / 0.2, e1 = 0.02 / 0.1;
  CHECK(s.nrmse_count == 2);
  CHECK(s.nrmse_nu1 ==
        doctest::Approx(std::sqrt((e0 * e0 + e1 * e1) / 2.0)).epsilon(1e-12));

  // exclude_nonconverged drops converged = false trials entirely
  recs[3].d0_hat = 50.0;
  recs[3].nu1_hat = 0.2;
  const SweepSummary s2 = summarize(gp, recs, true);
  CHECK(s2.trials == 3);
  CHECK(s2.failures == 0);
  CHECK(s2.rmse_d0 ==
        doctest::Approx(std::sqrt((9.0 + 16.0 + 0.0) / 3.0)).epsilon(1e-12));
  const SweepSummary s3 = summarize(gp, recs, false);
  CHECK(s3.rmse_d0 ==
        doctest::Approx(std::sqrt((9.0 + 16.0 + 0.0 + 2500.0) / 4.0))
            .epsilon(1e-12));
}

TEST_CASE("serial and parallel sweeps produce identical records") {
  const SweepConfig cfg = tiny_sweep();
  SweepOptions serial;
  serial.jobs = 1;
  serial.with_crb = false;
  SweepOptions parallel;
  parallel.jobs = 4;
  parallel.with_crb = false;
  const SweepResult a = run_sweep(cfg, serial);
  const SweepResult b = run_sweep(cfg, parallel);
  REQUIRE(a.records.size() == 4 * 6);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i)
    CHECK(same_record(a.records[i], b.records[i]));
  REQUIRE(a.summaries.size() == 4);
  // records are grid-point major, trial minor
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].scenario_id == static_cast<int>(i / 6));
    CHECK(a.records[i].trial_index == static_cast<int>(i % 6));
  }
  // crb off leaves the overlays NaN
  for (const auto& s : a.summaries) {
    CHECK(std::isnan(s.rcrb_d0));
    CHECK(std::isnan(s.nrcrb_nu1));
  }
}

TEST_CASE("rcrb overlay fills shape_m = 1 points") {
  const auto grid = expand_grid(tiny_sweep());
  const auto [rd0, rnu] = rcrb_overlay(grid[0]);
  CHECK(std::isfinite(rd0));
  CHECK(rd0 > 0.0);
  CHECK(std::isfinite(rnu));
  CHECK(rnu > 0.0);
  // deterministic
  const auto [rd0b, rnub] = rcrb_overlay(grid[0]);
  CHECK(rd0 == rd0b);
  CHECK(rnu == rnub);

  SweepOptions opts;
  opts.jobs = 2;
  opts.with_crb = true;
  const SweepResult res = run_sweep(tiny_sweep(), opts);
  for (const auto& s : res.summaries) {
    CHECK(std::isfinite(s.rcrb_d0));
    CHECK(s.rcrb_d0 > 0.0);
  }
}

TEST_CASE("csv round trip is bit exact, including nan") {
  std::vector<TrialRecord> recs(3);
  recs[0].scenario_id = 1;
  recs[0].trial_index = 0;
  recs[0].d0_true = 100.0;
  recs[0].d0_hat = 101.23456789012345;
  recs[0].d0_hat_baseline = 98.7;
  recs[0].nu1_true = 0.333333333333333315;
  recs[0].nu1_hat = 0.32;
  recs[0].vlos_true = 16.6;
  recs[0].vlos_hat = 16.0;
  recs[0].converged = true;
  recs[0].em_iters = 12;
  recs[0].ec_iters_total = 240;
  recs[0].fixed_point_residual = 3.2e-9;
  recs[0].clamp_count = 4;
  recs[1] = recs[0];
  recs[1].trial_index = 1;
  recs[1].d0_hat = std::nan("");
  recs[1].nu1_hat = std::nan("");
  recs[1].converged = false;
  recs[2] = recs[0];
  recs[2].trial_index = 2;
  recs[2].d0_hat = 1.0 / 3.0;

  const std::string text = trials_csv(recs);
  std::istringstream in(text);
  const auto back = parse_trials_csv(in);
  REQUIRE(back.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(same_record(recs[i], back[i]));
  std::istringstream in2(text);
  CHECK(trials_csv(parse_trials_csv(in2)) == text);

  // header tampering is rejected
  std::string bad = text;
  bad[0] = 'X';
  std::istringstream inb(bad);
  CHECK_THROWS(parse_trials_csv(inb));
  // truncated row is rejected
  std::string shortrow = text;
  shortrow.resize(shortrow.find_last_of(','));
  shortrow += "\n";
  std::istringstream ins(shortrow);
  CHECK_THROWS(parse_trials_csv(ins));
}

TEST_CASE("summary csv round trip") {
  SweepSummary s;
  s.scenario_id = 2;
  s.num_paths = 7;
  s.est_num_paths = 5;
  s.shape_m = 5.0;
  s.velocity_kmh = 60.0;
  s.snr_db = 10.0;
  s.trials = 100;
  s.rmse_d0 = 17.345678901234567;
  s.rmse_d0_baseline = 40.1;
  s.nrmse_nu1 = 0.07123;
  s.nrmse_count = 93;
  s.rcrb_d0 = std::nan("");
  s.nrcrb_nu1 = std::nan("");
  s.failures = 1;
  const std::string text = summary_csv({s});
  std::istringstream in(text);
  const auto back = parse_summary_csv(in);
  REQUIRE(back.size() == 1);
  CHECK(summary_csv(back) == text);
  CHECK(back[0].rmse_d0 == s.rmse_d0);
  CHECK(std::isnan(back[0].rcrb_d0));
  CHECK(back[0].nrmse_count == 93);
}

TEST_CASE("zero velocity pins the doppler near zero") {
  std::istringstream in(
      "n_sub = 32\n"
      "num_paths = 2\n"
      "tap_max = 8\n"
      "velocity_kmh = 0\n"
      "snr_db = 25\n"
      "trials = 3\n"
      "seed = 11\n");
  const auto grid = expand_grid(parse_config(in));
  for (int t = 0; t < 3; ++t) {
    const TrialRecord r = run_trial(grid[0], t);
    CHECK(r.nu1_true == 0.0);
    CHECK(std::abs(r.nu1_hat) < 0.02);
    CHECK(r.vlos_true == 0.0);
  }
}

TEST_CASE("emit_outputs writes the full file set with a stable manifest") {
  namespace fs = std::filesystem;
  const fs::path dir =
      fs::temp_directory_path() / "afdmsense_test_outputs_XXXX";
  fs::remove_all(dir);
  const SweepConfig cfg = tiny_sweep();
  SweepOptions opts;
  opts.jobs = 2;
  opts.with_crb = false;
  const SweepResult res = run_sweep(cfg, opts);
  emit_outputs(cfg, res, dir.string());
  CHECK(fs::exists(dir / "trials.csv"));
  CHECK(fs::exists(dir / "summary.csv"));
  CHECK(fs::exists(dir / "run_manifest"));
  CHECK(fs::exists(dir / "plot_rmse_d0.svg"));
  CHECK(fs::exists(dir / "plot_nrmse_nu1.svg"));

  const std::string trials = slurp(dir / "trials.csv");
  CHECK(trials == trials_csv(res.records));
  std::istringstream tin(trials);
  CHECK(parse_trials_csv(tin).size() == res.records.size());

  const std::string manifest = slurp(dir / "run_manifest");
  CHECK(manifest.find("# run_manifest v1") == 0);
  CHECK(manifest.find("n_sub = 32") != std::string::npos);
  CHECK(manifest.find("total_trials = 24") != std::string::npos);
  // timestamp is the last line; everything above is reproducible
  const auto cut = manifest.rfind("timestamp");
  REQUIRE(cut != std::string::npos);
  const std::string head = manifest.substr(0, cut);

  const fs::path dir2 = fs::temp_directory_path() / "afdmsense_test_out2";
  fs::remove_all(dir2);
  emit_outputs(cfg, res, dir2.string());
  const std::string manifest2 = slurp(dir2 / "run_manifest");
  CHECK(manifest2.substr(0, cut) == head);
  CHECK(slurp(dir2 / "trials.csv") == trials);

  const std::string svg = slurp(dir / "plot_rmse_d0.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);

  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST_CASE("missing-path estimation still yields finite estimates") {
  std::istringstream in(
      "n_sub = 32\n"
      "num_paths = 4\n"
      "est_num_paths = 2\n"
      "tap_max = 10\n"
      "snr_db = 20\n"
      "trials = 4\n"
      "seed = 7\n");
  const auto grid = expand_grid(parse_config(in));
  for (int t = 0; t < 4; ++t) {
    const TrialRecord r = run_trial(grid[0], t);
    CHECK(std::isfinite(r.d0_hat));
    CHECK(std::isfinite(r.nu1_hat));
  }
}

}  // TEST_SUITE
