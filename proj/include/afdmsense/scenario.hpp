#ifndef AFDMSENSE_SCENARIO_HPP
#define AFDMSENSE_SCENARIO_HPP

#include <cstdint>

#include "afdmsense/afdm.hpp"

namespace afdmsense {

/** Solver tolerances and stabilization knobs for the EM-EC estimator. */
struct SolverOptions {
  double eps1 = 1e-3;        // EC stop: ||lq_new - lq_old||^2 / ||lq_new||^2
  double eps2 = 1e-3;        // EM stop: (d0_new - d0)^2 / d0_new^2
  int max_iter_ec = 1000;
  int max_iter_em = 1000;
  double damping = 1.0;      // exponential damping on natural-param updates
  bool relinearize = false;  // re-expand the Taylor model at the current nu
  double lambda_min = 1e-8;  // precision clamp range
  double lambda_max = 1e8;
  double d0_init = 10.0;     // meters
  double d0_lower = 0.1;     // search bounds, meters
  double d0_upper = 1e5;
};

/**
 * One Monte-Carlo scenario. Defaults reproduce the reference parameter
 * table: N=512, f_c=90 GHz, delta_f=15 kHz, G0=1, d0=100 m, n_los=2.19,
 * n_nlos=3.19, taps drawn from {1..20}.
 */
struct ScenarioConfig {
  AfdmConfig afdm;
  int num_paths = 3;         // L, LoS included
  int est_num_paths = 0;     // L_est <= L known to the estimator; 0 = all
  double shape_m = 1.0;      // Nakagami shape
  double g0 = 1.0;           // composite gain constant G0
  double d0_true = 100.0;    // LoS distance, meters
  double velocity_kmh = 60.0;
  double snr_db = 20.0;
  double fading_exp_los = 2.19;
  double fading_exp_nlos = 3.19;
  int tap_min = 1;           // NLoS tap range, inclusive
  int tap_max = 20;
  int trials = 100;
  std::uint64_t seed = 1;
  SolverOptions solver;
  int crb_draws = 100;       // geometry draws averaged for RCRB overlays

  void validate() const;

  /** Velocity in m/s. */
  double velocity_mps() const { return velocity_kmh / 3.6; }

  /** Largest |nu| this scenario can produce (used by the c1 heuristic). */
  double max_doppler_norm() const {
    return afdm.doppler_norm(velocity_mps());
  }

  /** Copy of afdm with c1 resolved (heuristic applied if c1 < 0). */
  AfdmConfig resolved_afdm() const {
    AfdmConfig out = afdm;
    out.c1 = afdm.resolved_c1(max_doppler_norm());
    return out;
  }

  /** Effective number of paths known to the estimator. */
  int effective_est_paths() const {
    return est_num_paths > 0 ? est_num_paths : num_paths;
  }
};

}  // namespace afdmsense

#endif
