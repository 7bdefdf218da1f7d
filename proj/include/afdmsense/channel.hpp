#ifndef AFDMSENSE_CHANNEL_HPP
#define AFDMSENSE_CHANNEL_HPP

#include <vector>

#include "afdmsense/rng.hpp"
#include "afdmsense/scenario.hpp"
#include "afdmsense/types.hpp"

namespace afdmsense {

/** One propagation path of the delay-Doppler channel. */
struct Path {
  cplx gain;            // h_i
  int tap = 0;          // l_i, integer delay tap
  double rel_distance = 0.0;  // d_i = c tau_i, meters (0 for LoS)
  double delay = 0.0;   // tau_i = l_i / (N delta_f), seconds
  double doppler = 0.0; // nu_i, subcarrier-normalized
  double angle = 0.0;   // theta_i, radians
  double power = 0.0;   // Omega_i = E[|h_i|^2]
  double fading_exp = 0.0;  // n_i
};

/** Channel realization: LoS first, then NLoS ordered by increasing tap. */
struct PathSet {
  std::vector<Path> paths;
  int num_paths = 0;   // L
  double d0 = 0.0;     // LoS distance, meters
  double shape_m = 1.0;
  double g0 = 1.0;
  double velocity = 0.0;  // m/s
};

/** Dense channel matrices plus the per-path band bookkeeping. */
struct ChannelMatrices {
  CMat h_t;                    // time-domain H_t
  CMat h_af;                   // A_af H_t A_af^H
  std::vector<CMat> per_path;  // H_i = A_af Delta_{nu_i} Pi^{l_i} A_af^H
  std::vector<int> band_centers;  // loc_i = [2 N c1 l_i]_N
};

/** Received affine-domain observation with its pilot. */
struct Observation {
  CVec y_af;
  double noise_var = 0.0;
  CVec pilot_affine;  // x
  CVec pilot_time;    // s = A_af^H x
};

/** 3GPP-style power law Omega(d) = G0 (d0 + d)^{-n}. */
double path_power(double g0, double d0, double rel_distance, double fading_exp);

/**
 * Draw a channel realization: LoS path at tap 0 with exponent n_los, L-1
 * NLoS taps uniform without replacement over [tap_min, tap_max], angles
 * uniform over [0, 2pi), gains Nakagami-m with the power-law Omega_i.
 * Throws if L-1 exceeds the number of available distinct taps.
 */
PathSet generate_paths(const ScenarioConfig& scn, Rng& rng);

/**
 * Time-domain channel H_t = sum_i h_i Delta_{nu_i} Pi^{l_i} with
 * Delta_nu = diag(e^{-j 2 pi nu n / N}), n = 0..N-1.
 */
CMat build_time_channel(const PathSet& ps, const AfdmConfig& cfg);

/** Affine-domain channel, per-path components, and band centers. */
ChannelMatrices effective_affine_channel(const PathSet& ps,
                                         const AfdmConfig& cfg);

/**
 * y_af = A_af H_t A_af^H x + n with n ~ CN(0, noise_var I) drawn from rng.
 */
Observation synthesize_received(const PathSet& ps, const CVec& pilot_affine,
                                double noise_var, const AfdmConfig& cfg,
                                Rng& rng);

}  // namespace afdmsense

#endif
