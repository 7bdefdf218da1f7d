#ifndef AFDMSENSE_AFDM_HPP
#define AFDMSENSE_AFDM_HPP

#include "afdmsense/types.hpp"

namespace afdmsense {

/**
 * AFDM waveform parameters.
 *
 * c1 and c2 are the chirp slopes of the DAFT basis; c1 = c2 = 0 degenerates
 * to plain OFDM. A negative c1 means "auto": the harness resolves it with
 * the resolvability heuristic c1 = (2(nu_max_int + k_v) + 1) / (2N).
 */
struct AfdmConfig {
  int n_sub = 512;        // N, number of chirp subcarriers
  double c1 = -1.0;       // chirp slope; < 0 requests the heuristic default
  double c2 = 0.0;        // second chirp parameter
  double delta_f = 15e3;  // chirp subcarrier spacing, Hz
  double f_c = 90e9;      // carrier frequency, Hz
  double c_light = 3e8;   // propagation speed, m/s
  int k_v = 2;            // Doppler sensitivity threshold

  /** Throws std::invalid_argument on out-of-range fields. */
  void validate() const;

  /** Resolvability heuristic for c1 given the largest expected |nu|. */
  double resolved_c1(double nu_max) const;

  /** Normalized Doppler for a radial speed in m/s: v f_c / (c delta_f). */
  double doppler_norm(double radial_speed) const;
};

/**
 * Dense DAFT matrix A_af = Lambda_{c2} F Lambda_{c1} with
 * Lambda_c = diag(e^{-j 2 pi c n^2}) and F the unitary DFT. Unitary.
 */
CMat build_daft_matrix(const AfdmConfig& cfg);

/**
 * Inverse transform s = A_af^H x,
 *   s_n = N^{-1/2} sum_m exp(+j 2 pi (c1 n^2 + n m / N + c2 m^2)) x_m.
 */
CVec idaft(const CVec& x, const AfdmConfig& cfg);

/** Forward transform y_af = A_af s (affine-domain projection). */
CVec daft(const CVec& s, const AfdmConfig& cfg);

/**
 * Cyclic delay: (Pi^l v)[k] = v[(k - l) mod N]. Accepts 0 <= l <= N
 * (l = N is the identity rotation).
 */
CVec cyclic_shift(const CVec& v, int l);

}  // namespace afdmsense

#endif
