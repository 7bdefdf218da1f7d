#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "afdmsense/config.hpp"

namespace afdmsense {

// One Monte-Carlo trial. Serialized to trials.csv with the columns exactly
// in declaration order.
struct TrialRecord {
  int scenario_id = 0;
  int trial_index = 0;
  double d0_true = 0.0;
  double d0_hat = 0.0;
  double d0_hat_baseline = 0.0;
  double nu1_true = 0.0;
  double nu1_hat = 0.0;
  double vlos_true = 0.0;
  double vlos_hat = 0.0;
  bool converged = false;
  int em_iters = 0;
  int ec_iters_total = 0;
  double fixed_point_residual = 0.0;
  int clamp_count = 0;
};

// Per-grid-point aggregate. trials counts the records that entered the RMSE
// columns; failed trials (and, optionally, non-converged ones) are excluded
// from both the estimator and baseline columns so the comparison stays
// paired. nrmse_nu1 averages the squared relative error
// (nu1_hat - nu1_true)/nu1_true over trials with |nu1_true| > 1e-6;
// nrmse_count reports how many entered. rcrb_d0/nrcrb_nu1 are filled for
// shape_m = 1 grid points only (NaN otherwise), averaged over crb_draws
// path-geometry draws as sqrt(mean CRB) and sqrt(mean CRB/nu1^2).
struct SweepSummary {
  int scenario_id = 0;
  int num_paths = 0;
  int est_num_paths = 0;
  double shape_m = 0.0;
  double velocity_kmh = 0.0;
  double snr_db = 0.0;
  int trials = 0;
  double rmse_d0 = 0.0;
  double rmse_d0_baseline = 0.0;
  double nrmse_nu1 = 0.0;
  int nrmse_count = 0;
  double rcrb_d0 = 0.0;
  double nrcrb_nu1 = 0.0;
  int failures = 0;  // trials whose estimator threw (excluded from RMSE)
};

struct SweepOptions {
  int jobs = 0;          // worker threads; 0 = hardware concurrency
  bool with_crb = true;  // compute RCRB overlays for shape_m = 1 points
  bool exclude_nonconverged = false;  // drop non-converged trials from RMSE
};

struct SweepResult {
  std::vector<TrialRecord> records;     // grid-point major, trial minor
  std::vector<SweepSummary> summaries;  // one per grid point
  int failures = 0;
};

// Run one trial of a grid point. Streams: the pilot comes from
// child(geom_key, 0) of the config seed and trial i from
// child(geom_key, 1 + i), so trials are independent of execution order and
// points differing only in SNR or est_num_paths see identical channels.
// Estimator exceptions are recorded (NaN estimate, converged = false), not
// thrown.
TrialRecord run_trial(const GridPoint& gp, int trial_idx);

// Aggregate records of one grid point (all must share its scenario_id).
SweepSummary summarize(const GridPoint& gp,
                       const std::vector<TrialRecord>& records,
                       bool exclude_nonconverged = false);

// Root-CRB overlay for a shape_m = 1 grid point, averaged over
// scn.crb_draws geometry draws taken from the same streams as the trials.
// Returns {rcrb_d0, nrcrb_nu1}.
std::pair<double, double> rcrb_overlay(const GridPoint& gp);

// Full grid execution with a worker pool; records land in deterministic
// (scenario_id, trial_index) order regardless of scheduling.
SweepResult run_sweep(const SweepConfig& cfg, const SweepOptions& opts = {});

std::string trials_csv(const std::vector<TrialRecord>& records);
std::string summary_csv(const std::vector<SweepSummary>& summaries);

// Inverse of trials_csv (header validated); round-trips bit-exactly.
std::vector<TrialRecord> parse_trials_csv(std::istream& in);

// Inverse of summary_csv (header validated); round-trips bit-exactly.
std::vector<SweepSummary> parse_summary_csv(std::istream& in);

// Write plot_rmse_d0.svg and plot_nrmse_nu1.svg for these summaries.
void emit_plots(const std::vector<SweepSummary>& summaries,
                const std::string& out_dir);

// Write trials.csv, summary.csv, run_manifest, and per-metric SVG plots
// into out_dir (created if absent). The manifest ends with an isolated
// timestamp line; everything above it is reproducible.
void emit_outputs(const SweepConfig& cfg, const SweepResult& res,
                  const std::string& out_dir);

}  // namespace afdmsense
