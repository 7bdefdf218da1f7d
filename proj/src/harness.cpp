#include "afdmsense/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

#include "afdmsense/afdm.hpp"
#include "afdmsense/baseline.hpp"
#include "afdmsense/channel.hpp"
#include "afdmsense/crb.hpp"
#include "afdmsense/estimator.hpp"
#include "afdmsense/sensing.hpp"
#include "afdmsense/svgplot.hpp"

namespace afdmsense {

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr const char* kTrialsHeader =
    "scenario_id,trial_index,d0_true,d0_hat,d0_hat_baseline,nu1_true,nu1_hat,"
    "vlos_true,vlos_hat,converged,em_iters,ec_iters_total,"
    "fixed_point_residual,clamp_count";
constexpr const char* kSummaryHeader =
    "scenario_id,num_paths,est_num_paths,shape_m,velocity_kmh,snr_db,trials,"
    "rmse_d0,rmse_d0_baseline,nrmse_nu1,nrmse_count,rcrb_d0,nrcrb_nu1,"
    "failures";
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string f17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int pool_size(int jobs) {
  if (jobs > 0) return jobs;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Run fn(k) for k in [0, count) on a pool; first exception rethrown.
template <typename F>
void parallel_for(std::size_t count, int jobs, F fn) {
  const int threads = std::min<std::size_t>(pool_size(jobs), count);
  if (threads <= 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= count) return;
      try {
        fn(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace

TrialRecord run_trial(const GridPoint& gp, int trial_idx) {
  const ScenarioConfig& scn = gp.scn;
  scn.validate();
  if (trial_idx < 0 || trial_idx >= scn.trials)
    throw std::invalid_argument("run_trial: trial index out of range");

  const AfdmConfig cfg = scn.resolved_afdm();
  Rng root(scn.seed);
  Rng pilot_rng = root.child(gp.geom_key, 0);
  const CVec pilot = generate_pilot(cfg.n_sub, pilot_rng);
  Rng rng = root.child(gp.geom_key, 1 + static_cast<std::uint64_t>(trial_idx));

  const PathSet ps = generate_paths(scn, rng);
  const CVec pilot_time = idaft(pilot, cfg);
  const double noise_var = calibrate_noise(scn.snr_db, ps, pilot_time, cfg);
  const Observation obs = synthesize_received(ps, pilot, noise_var, cfg, rng);

  const int l_est = scn.effective_est_paths();
  std::vector<int> taps(static_cast<std::size_t>(l_est));
  RVec exps(l_est);
  for (int i = 0; i < l_est; ++i) {
    taps[static_cast<std::size_t>(i)] = ps.paths[static_cast<std::size_t>(i)].tap;
    exps(i) = ps.paths[static_cast<std::size_t>(i)].fading_exp;
  }

  TrialRecord rec;
  rec.scenario_id = gp.scenario_id;
  rec.trial_index = trial_idx;
  rec.d0_true = scn.d0_true;
  rec.nu1_true = ps.paths[0].doppler;
  rec.vlos_true = scn.velocity_mps() * std::cos(ps.paths[0].angle);

  try {
    const PilotOperator op = build_pilot_operator(obs.pilot_time, taps, cfg);
    const LinearizedModel model = linearize(op, RVec::Zero(l_est));
    EstimatorPriors priors;
    priors.shape_m = scn.shape_m;
    priors.g0 = scn.g0;
    priors.fading_exps = exps;
    priors.rel_dists = tap_rel_distances(taps, cfg);
    const SensingEstimate est =
        estimate(obs.y_af, model, priors, obs.noise_var, scn.solver);
    rec.d0_hat = est.d0;
    rec.nu1_hat = est.nu(0);
    rec.vlos_hat = est.los_radial_velocity;
    rec.converged = est.converged;
    rec.em_iters = est.em_iters;
    rec.ec_iters_total = est.ec_iters_total;
    rec.fixed_point_residual = est.fixed_point_residual;
    rec.clamp_count = est.clamp_count;
  } catch (const std::exception&) {
    rec.d0_hat = kNan;
    rec.nu1_hat = kNan;
    rec.vlos_hat = kNan;
    rec.converged = false;
  }

  RssMeasurement meas;
  meas.total_power = obs.y_af.squaredNorm() / cfg.n_sub;
  meas.noise_var = obs.noise_var;
  RssRangeBounds bounds;
  bounds.lower = scn.solver.d0_lower;
  bounds.upper = scn.solver.d0_upper;
  rec.d0_hat_baseline =
      rss_nakagami_range(meas, scn.shape_m, scn.fading_exp_los, scn.g0, bounds)
          .d0;
  return rec;
}

SweepSummary summarize(const GridPoint& gp,
                       const std::vector<TrialRecord>& records,
                       bool exclude_nonconverged) {
  if (records.empty()) throw std::invalid_argument("summarize: no records");
  SweepSummary s;
  s.scenario_id = gp.scenario_id;
  s.num_paths = gp.scn.num_paths;
  s.est_num_paths = gp.scn.effective_est_paths();
  s.shape_m = gp.scn.shape_m;
  s.velocity_kmh = gp.scn.velocity_kmh;
  s.snr_db = gp.scn.snr_db;
  s.rcrb_d0 = kNan;
  s.nrcrb_nu1 = kNan;

  double se_d0 = 0.0;
  double se_base = 0.0;
  double se_nu = 0.0;
  for (const auto& r : records) {
    if (r.scenario_id != gp.scenario_id)
      throw std::invalid_argument("summarize: record from another scenario");
    if (!std::isfinite(r.d0_hat)) {
      ++s.failures;
      continue;
    }
    if (exclude_nonconverged && !r.converged) continue;
    ++s.trials;
    se_d0 += (r.d0_hat - r.d0_true) * (r.d0_hat - r.d0_true);
    se_base +=
        (r.d0_hat_baseline - r.d0_true) * (r.d0_hat_baseline - r.d0_true);
    if (std::abs(r.nu1_true) > 1e-6 && std::isfinite(r.nu1_hat)) {
      const double rel = (r.nu1_hat - r.nu1_true) / r.nu1_true;
      se_nu += rel * rel;
      ++s.nrmse_count;
    }
  }
  s.rmse_d0 = s.trials > 0 ? std::sqrt(se_d0 / s.trials) : kNan;
  s.rmse_d0_baseline = s.trials > 0 ? std::sqrt(se_base / s.trials) : kNan;
  s.nrmse_nu1 = s.nrmse_count > 0 ? std::sqrt(se_nu / s.nrmse_count) : kNan;
  return s;
}

std::pair<double, double> rcrb_overlay(const GridPoint& gp) {
  const ScenarioConfig& scn = gp.scn;
  scn.validate();
  const AfdmConfig cfg = scn.resolved_afdm();
  Rng root(scn.seed);
  Rng pilot_rng = root.child(gp.geom_key, 0);
  const CVec pilot = generate_pilot(cfg.n_sub, pilot_rng);
  const CVec pilot_time = idaft(pilot, cfg);

  const int draws = scn.crb_draws;
  std::vector<double> crb_d0(static_cast<std::size_t>(draws), kNan);
  std::vector<double> crb_nu(static_cast<std::size_t>(draws), kNan);
  for (int i = 0; i < draws; ++i) {
    Rng rng = root.child(gp.geom_key, 1 + static_cast<std::uint64_t>(i));
    const PathSet ps = generate_paths(scn, rng);
    const CrbInputs in = crb_inputs_for(scn, ps, pilot_time);
    const CrbResult r = crb(in);
    crb_d0[static_cast<std::size_t>(i)] = r.crb_d0;
    const double nu1 = ps.paths[0].doppler;
    if (std::abs(nu1) > 1e-6)
      crb_nu[static_cast<std::size_t>(i)] = r.crb_nu1 / (nu1 * nu1);
  }

  double acc_d0 = 0.0;
  double acc_nu = 0.0;
  int cnt_d0 = 0;
  int cnt_nu = 0;
  for (int i = 0; i < draws; ++i) {
    if (std::isfinite(crb_d0[static_cast<std::size_t>(i)])) {
      acc_d0 += crb_d0[static_cast<std::size_t>(i)];
      ++cnt_d0;
    }
    if (std::isfinite(crb_nu[static_cast<std::size_t>(i)])) {
      acc_nu += crb_nu[static_cast<std::size_t>(i)];
      ++cnt_nu;
    }
  }
  return {cnt_d0 > 0 ? std::sqrt(acc_d0 / cnt_d0) : kNan,
          cnt_nu > 0 ? std::sqrt(acc_nu / cnt_nu) : kNan};
}

SweepResult run_sweep(const SweepConfig& cfg, const SweepOptions& opts) {
  const std::vector<GridPoint> grid = expand_grid(cfg);
  if (grid.empty()) throw std::invalid_argument("run_sweep: empty grid");

  std::vector<std::size_t> offset(grid.size(), 0);
  std::size_t total = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    offset[g] = total;
    total += static_cast<std::size_t>(grid[g].scn.trials);
  }

  SweepResult res;
  res.records.resize(total);
  struct Item {
    std::size_t g;
    int trial;
  };
  std::vector<Item> items;
  items.reserve(total);
  for (std::size_t g = 0; g < grid.size(); ++g)
    for (int t = 0; t < grid[g].scn.trials; ++t) items.push_back({g, t});

  parallel_for(items.size(), opts.jobs, [&](std::size_t k) {
    const Item& it = items[k];
    res.records[offset[it.g] + static_cast<std::size_t>(it.trial)] =
        run_trial(grid[it.g], it.trial);
  });

  res.summaries.resize(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto first = res.records.begin() + static_cast<std::ptrdiff_t>(offset[g]);
    const std::vector<TrialRecord> chunk(
        first, first + grid[g].scn.trials);
    res.summaries[g] = summarize(grid[g], chunk, opts.exclude_nonconverged);
    res.failures += res.summaries[g].failures;
  }

  if (opts.with_crb) {
    std::vector<std::size_t> crb_points;
    for (std::size_t g = 0; g < grid.size(); ++g)
      if (grid[g].scn.shape_m == 1.0) crb_points.push_back(g);
    parallel_for(crb_points.size(), opts.jobs, [&](std::size_t k) {
      const std::size_t g = crb_points[k];
      const auto [rc_d0, rc_nu] = rcrb_overlay(grid[g]);
      res.summaries[g].rcrb_d0 = rc_d0;
      res.summaries[g].nrcrb_nu1 = rc_nu;
    });
  }
  return res;
}

std::string trials_csv(const std::vector<TrialRecord>& records) {
  std::ostringstream os;
  os << "# trials.csv schema v1 (afdmsense " << kVersion << ")\n";
  os << "# d0_hat_baseline: reimplemented RSS-Nakagami baseline, not "
        "bit-faithful to the cited method\n";
  os << kTrialsHeader << "\n";
  for (const auto& r : records) {
    os << r.scenario_id << ',' << r.trial_index << ',' << f17(r.d0_true) << ','
       << f17(r.d0_hat) << ',' << f17(r.d0_hat_baseline) << ','
       << f17(r.nu1_true) << ',' << f17(r.nu1_hat) << ',' << f17(r.vlos_true)
       << ',' << f17(r.vlos_hat) << ',' << (r.converged ? 1 : 0) << ','
       << r.em_iters << ',' << r.ec_iters_total << ','
       << f17(r.fixed_point_residual) << ',' << r.clamp_count << "\n";
  }
  return os.str();
}

std::string summary_csv(const std::vector<SweepSummary>& summaries) {
  std::ostringstream os;
  os << "# summary.csv schema v1 (afdmsense " << kVersion << ")\n";
  os << "# rmse_d0_baseline: reimplemented RSS-Nakagami baseline, not "
        "bit-faithful to the cited method\n";
  os << "# rcrb columns populated for shape_m = 1 grid points only\n";
  os << kSummaryHeader << "\n";
  for (const auto& s : summaries) {
    os << s.scenario_id << ',' << s.num_paths << ',' << s.est_num_paths << ','
       << f17(s.shape_m) << ',' << f17(s.velocity_kmh) << ',' << f17(s.snr_db)
       << ',' << s.trials << ',' << f17(s.rmse_d0) << ','
       << f17(s.rmse_d0_baseline) << ',' << f17(s.nrmse_nu1) << ','
       << s.nrmse_count << ',' << f17(s.rcrb_d0) << ',' << f17(s.nrcrb_nu1)
       << ',' << s.failures << "\n";
  }
  return os.str();
}

std::vector<TrialRecord> parse_trials_csv(std::istream& in) {
  std::vector<TrialRecord> out;
  std::string line;
  bool header_seen = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != kTrialsHeader)
        throw std::runtime_error("trials.csv: unexpected header at line " +
                                 std::to_string(lineno));
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 14)
      throw std::runtime_error("trials.csv: wrong column count at line " +
                               std::to_string(lineno));
    TrialRecord r;
    try {
      r.scenario_id = std::stoi(cells[0]);
      r.trial_index = std::stoi(cells[1]);
      r.d0_true = std::stod(cells[2]);
      r.d0_hat = std::stod(cells[3]);
      r.d0_hat_baseline = std::stod(cells[4]);
      r.nu1_true = std::stod(cells[5]);
      r.nu1_hat = std::stod(cells[6]);
      r.vlos_true = std::stod(cells[7]);
      r.vlos_hat = std::stod(cells[8]);
      r.converged = std::stoi(cells[9]) != 0;
      r.em_iters = std::stoi(cells[10]);
      r.ec_iters_total = std::stoi(cells[11]);
      r.fixed_point_residual = std::stod(cells[12]);
      r.clamp_count = std::stoi(cells[13]);
    } catch (const std::exception&) {
      throw std::runtime_error("trials.csv: parse error at line " +
                               std::to_string(lineno));
    }
    out.push_back(r);
  }
  if (!header_seen) throw std::runtime_error("trials.csv: missing header");
  return out;
}

std::vector<SweepSummary> parse_summary_csv(std::istream& in) {
  std::vector<SweepSummary> out;
  std::string line;
  bool header_seen = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != kSummaryHeader)
        throw std::runtime_error("summary.csv: unexpected header at line " +
                                 std::to_string(lineno));
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 14)
      throw std::runtime_error("summary.csv: wrong column count at line " +
                               std::to_string(lineno));
    SweepSummary s;
    try {
      s.scenario_id = std::stoi(cells[0]);
      s.num_paths = std::stoi(cells[1]);
      s.est_num_paths = std::stoi(cells[2]);
      s.shape_m = std::stod(cells[3]);
      s.velocity_kmh = std::stod(cells[4]);
      s.snr_db = std::stod(cells[5]);
      s.trials = std::stoi(cells[6]);
      s.rmse_d0 = std::stod(cells[7]);
      s.rmse_d0_baseline = std::stod(cells[8]);
      s.nrmse_nu1 = std::stod(cells[9]);
      s.nrmse_count = std::stoi(cells[10]);
      s.rcrb_d0 = std::stod(cells[11]);
      s.nrcrb_nu1 = std::stod(cells[12]);
      s.failures = std::stoi(cells[13]);
    } catch (const std::exception&) {
      throw std::runtime_error("summary.csv: parse error at line " +
                               std::to_string(lineno));
    }
    out.push_back(s);
  }
  if (!header_seen) throw std::runtime_error("summary.csv: missing header");
  return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
  os << body;
  os.flush();
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Build the per-figure series: one line per combination of the non-x keys.
struct PlotBundle {
  std::vector<PlotSeries> main;      // estimator metric
  std::vector<PlotSeries> baseline;  // RSS metric (rmse plot only)
  std::vector<PlotSeries> bound;     // RCRB overlay
  std::string x_label;
};

PlotBundle build_series(const std::vector<SweepSummary>& sums, bool rmse) {
  PlotBundle out;
  std::vector<double> snrs, vels;
  std::vector<int> ls, lests;
  std::vector<double> ms;
  for (const auto& s : sums) {
    if (std::find(snrs.begin(), snrs.end(), s.snr_db) == snrs.end())
      snrs.push_back(s.snr_db);
    if (std::find(vels.begin(), vels.end(), s.velocity_kmh) == vels.end())
      vels.push_back(s.velocity_kmh);
    if (std::find(ls.begin(), ls.end(), s.num_paths) == ls.end())
      ls.push_back(s.num_paths);
    if (std::find(lests.begin(), lests.end(), s.est_num_paths) == lests.end())
      lests.push_back(s.est_num_paths);
    if (std::find(ms.begin(), ms.end(), s.shape_m) == ms.end())
      ms.push_back(s.shape_m);
  }
  const bool x_is_vel = snrs.size() <= 1 && vels.size() > 1;
  out.x_label = x_is_vel ? "velocity [km/h]" : "SNR [dB]";

  auto key_label = [&](const SweepSummary& s) {
    std::string label = "L=" + std::to_string(s.num_paths);
    if (ms.size() > 1) label += " m=" + std::string(f17(s.shape_m)).substr(0, 4);
    if (lests.size() > 1) label += " Lest=" + std::to_string(s.est_num_paths);
    if (vels.size() > 1 && !x_is_vel)
      label += " v=" + std::string(f17(s.velocity_kmh)).substr(0, 4);
    if (snrs.size() > 1 && x_is_vel)
      label += " snr=" + std::string(f17(s.snr_db)).substr(0, 4);
    return label;
  };

  auto push = [](std::vector<PlotSeries>& dst, const std::string& label,
                 double x, double y, bool dashed) {
    for (auto& s : dst)
      if (s.label == label) {
        s.x.push_back(x);
        s.y.push_back(y);
        return;
      }
    PlotSeries s;
    s.label = label;
    s.dashed = dashed;
    s.x.push_back(x);
    s.y.push_back(y);
    dst.push_back(std::move(s));
  };

  for (const auto& s : sums) {
    const double x = x_is_vel ? s.velocity_kmh : s.snr_db;
    const std::string label = key_label(s);
    if (rmse) {
      push(out.main, label, x, s.rmse_d0, false);
      push(out.baseline, "RSS " + label, x, s.rmse_d0_baseline, false);
      if (std::isfinite(s.rcrb_d0))
        push(out.bound, "RCRB " + label, x, s.rcrb_d0, true);
    } else {
      push(out.main, label, x, s.nrmse_nu1, false);
      if (std::isfinite(s.nrcrb_nu1))
        push(out.bound, "NRCRB " + label, x, s.nrcrb_nu1, true);
    }
  }
  return out;
}

}  // namespace

void emit_plots(const std::vector<SweepSummary>& summaries,
                const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec && !fs::is_directory(dir))
    throw std::runtime_error("cannot create output directory: " + out_dir +
                             " (" + ec.message() + ")");
  {
    PlotBundle b = build_series(summaries, true);
    std::vector<PlotSeries> all = b.main;
    all.insert(all.end(), b.baseline.begin(), b.baseline.end());
    all.insert(all.end(), b.bound.begin(), b.bound.end());
    write_file(dir / "plot_rmse_d0.svg",
               render_line_plot("Range RMSE", b.x_label, "RMSE(d0) [m]", all,
                                true));
  }
  {
    PlotBundle b = build_series(summaries, false);
    std::vector<PlotSeries> all = b.main;
    all.insert(all.end(), b.bound.begin(), b.bound.end());
    write_file(dir / "plot_nrmse_nu1.svg",
               render_line_plot("Doppler NRMSE", b.x_label, "NRMSE(nu1)", all,
                                true));
  }
}

void emit_outputs(const SweepConfig& cfg, const SweepResult& res,
                  const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec && !fs::is_directory(dir))
    throw std::runtime_error("cannot create output directory: " + out_dir +
                             " (" + ec.message() + ")");

  write_file(dir / "trials.csv", trials_csv(res.records));
  write_file(dir / "summary.csv", summary_csv(res.summaries));

  std::size_t total = res.records.size();
  std::ostringstream mf;
  mf << "# run_manifest v1\n";
  mf << "code_version = afdmsense " << kVersion << "\n";
  mf << "grid_points = " << res.summaries.size() << "\n";
  mf << "total_trials = " << total << "\n";
  mf << "failures = " << res.failures << "\n";
  mf << serialize_config(cfg);
  mf << "# volatile fields below this line are excluded from reproducibility "
        "comparisons\n";
  mf << "timestamp = " << utc_timestamp() << "\n";
  write_file(dir / "run_manifest", mf.str());

  emit_plots(res.summaries, out_dir);
}

}  // namespace afdmsense
