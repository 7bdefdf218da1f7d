#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "afdmsense/config.hpp"
#include "afdmsense/harness.hpp"

namespace {

int cmd_sweep(const std::string& cfg_path, const std::string& out_dir,
              int trials, std::uint64_t seed, bool seed_set, int jobs) {
  afdmsense::SweepConfig cfg = afdmsense::load_config(cfg_path);
  if (trials > 0) cfg.base.trials = trials;
  if (seed_set) cfg.base.seed = seed;
  afdmsense::SweepOptions opts;
  opts.jobs = jobs;
  const afdmsense::SweepResult res = afdmsense::run_sweep(cfg, opts);
  afdmsense::emit_outputs(cfg, res, out_dir);
  std::cout << afdmsense::summary_csv(res.summaries);
  std::cout << "# " << res.summaries.size() << " grid points, "
            << res.records.size() << " trials, " << res.failures
            << " failures; outputs in " << out_dir << "\n";
  return 0;
}

int cmd_trial(const std::string& cfg_path, int trial_index, int scenario_id) {
  const afdmsense::SweepConfig cfg = afdmsense::load_config(cfg_path);
  const auto grid = afdmsense::expand_grid(cfg);
  if (scenario_id < 0 || scenario_id >= static_cast<int>(grid.size()))
    throw std::runtime_error("scenario id out of range (grid has " +
                             std::to_string(grid.size()) + " points)");
  const afdmsense::TrialRecord r =
      afdmsense::run_trial(grid[static_cast<std::size_t>(scenario_id)],
                           trial_index);
  char buf[40];
  const auto f = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  std::cout << "scenario_id = " << r.scenario_id << "\n"
            << "trial_index = " << r.trial_index << "\n"
            << "d0_true = " << f(r.d0_true) << "\n"
            << "d0_hat = " << f(r.d0_hat) << "\n"
            << "d0_hat_baseline = " << f(r.d0_hat_baseline) << "\n"
            << "nu1_true = " << f(r.nu1_true) << "\n"
            << "nu1_hat = " << f(r.nu1_hat) << "\n"
            << "vlos_true = " << f(r.vlos_true) << "\n"
            << "vlos_hat = " << f(r.vlos_hat) << "\n"
            << "converged = " << (r.converged ? 1 : 0) << "\n"
            << "em_iters = " << r.em_iters << "\n"
            << "ec_iters_total = " << r.ec_iters_total << "\n"
            << "fixed_point_residual = " << f(r.fixed_point_residual) << "\n"
            << "clamp_count = " << r.clamp_count << "\n";
  return 0;
}

int cmd_crb(const std::string& cfg_path) {
  const afdmsense::SweepConfig cfg = afdmsense::load_config(cfg_path);
  const auto grid = afdmsense::expand_grid(cfg);
  char buf[40];
  const auto f = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  bool any = false;
  std::cout << "scenario_id,num_paths,shape_m,velocity_kmh,snr_db,rcrb_d0,"
               "nrcrb_nu1\n";
  for (const auto& gp : grid) {
    if (gp.scn.shape_m != 1.0) continue;
    any = true;
    const auto [rc_d0, rc_nu] = afdmsense::rcrb_overlay(gp);
    std::cout << gp.scenario_id << ',' << gp.scn.num_paths << ','
              << f(gp.scn.shape_m) << ',' << f(gp.scn.velocity_kmh) << ','
              << f(gp.scn.snr_db) << ',' << f(rc_d0) << ',' << f(rc_nu)
              << "\n";
  }
  if (!any)
    std::cout << "# no shape_m = 1 grid points; the bound is only computed "
                 "for the Gaussian-path case\n";
  return 0;
}

int cmd_plot(const std::string& summary_path, const std::string& out_dir) {
  std::ifstream in(summary_path);
  if (!in)
    throw std::runtime_error("cannot open summary file: " + summary_path);
  const auto summaries = afdmsense::parse_summary_csv(in);
  afdmsense::emit_plots(summaries, out_dir);
  std::cout << "wrote " << out_dir << "/plot_rmse_d0.svg and "
            << out_dir << "/plot_nrmse_nu1.svg\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AFDM delay-Doppler sensing simulator"};
  app.require_subcommand(1);

  std::string cfg_path;
  std::string out_dir;
  std::string summary_path;
  int trials = 0;
  std::uint64_t seed = 0;
  int jobs = 0;
  int trial_index = 0;
  int scenario_id = 0;

  auto* sweep = app.add_subcommand(
      "sweep", "Run the Monte-Carlo grid and write CSV, manifest, and plots");
  sweep->add_option("--config", cfg_path, "scenario config file")->required();
  sweep->add_option("--out", out_dir, "output directory")->required();
  sweep->add_option("--trials", trials, "override trials per grid point");
  auto* seed_opt = sweep->add_option("--seed", seed, "override RNG seed");
  sweep->add_option("--jobs", jobs, "worker threads (default: all cores)");

  auto* trial = app.add_subcommand("trial", "Run a single trial and print it");
  trial->add_option("--config", cfg_path, "scenario config file")->required();
  trial->add_option("--trial-index", trial_index, "trial index")->required();
  trial->add_option("--scenario-id", scenario_id,
                    "grid point to run (default 0)");

  auto* crb = app.add_subcommand(
      "crb", "Print RCRB overlays for the shape_m = 1 grid points");
  crb->add_option("--config", cfg_path, "scenario config file")->required();

  auto* plot = app.add_subcommand("plot", "Re-render plots from summary.csv");
  plot->add_option("--summary", summary_path, "summary.csv path")->required();
  plot->add_option("--out", out_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed())
      return cmd_sweep(cfg_path, out_dir, trials, seed,
                       seed_opt->count() > 0, jobs);
    if (trial->parsed()) return cmd_trial(cfg_path, trial_index, scenario_id);
    if (crb->parsed()) return cmd_crb(cfg_path);
    if (plot->parsed()) return cmd_plot(summary_path, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
