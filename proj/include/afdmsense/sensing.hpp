#ifndef AFDMSENSE_SENSING_HPP
#define AFDMSENSE_SENSING_HPP

#include <utility>
#include <vector>

#include "afdmsense/channel.hpp"
#include "afdmsense/types.hpp"

namespace afdmsense {

/**
 * Doppler steering vector and its derivative:
 *   r_n  = e^{-j 2 pi nu n / N}
 *   dr_n = (-j 2 pi n / N) e^{-j 2 pi nu n / N}
 */
std::pair<CVec, CVec> steering(double nu, int n_sub);

/**
 * The known-pilot measurement operator S = A_af [diag(Pi^{l_1} s), ...]
 * kept in factored form: the DAFT matrix plus the per-path shifted pilots.
 * Column i of "S R(nu)" is A_af (p_i .* r(nu_i)) with p_i = Pi^{l_i} s.
 */
struct PilotOperator {
  AfdmConfig cfg;
  CMat daft;            // A_af
  CMat shifted_pilots;  // N x L, column i = Pi^{l_i} s
  std::vector<int> delay_taps;

  Eigen::Index n() const { return daft.rows(); }
  Eigen::Index num_paths() const { return shifted_pilots.cols(); }

  /** A_af (p_i .* r(nu)). */
  CVec steered_column(int i, double nu) const;

  /** A_af (p_i .* dr(nu)), the nu_i derivative of the column above. */
  CVec steered_deriv_column(int i, double nu) const;

  /** N x L matrix with columns steered_column(i, nu[i]) ("S R(nu)"). */
  CMat steered(const RVec& nu) const;

  /** S R(nu) h without materializing S. */
  CVec apply(const RVec& nu, const CVec& h) const;

  /** Full N x (N L) S matrix; test and inspection use only. */
  CMat dense_s() const;
};

/** Build the factored S from a time-domain pilot and the known taps. */
PilotOperator build_pilot_operator(const CVec& pilot_time,
                                   const std::vector<int>& delay_taps,
                                   const AfdmConfig& cfg);

/**
 * First-order Taylor model around the expansion point nu_tilde:
 *   y ~ (a_tilde + b_tilde diag(nu - nu_tilde)) h + n
 * with a_tilde col i = A_af (p_i .* r(nu_tilde_i)) and b_tilde col i the
 * steered derivative column. At nu_tilde = 0 this is the bilinear model
 * with a(0) = 1 and b(0)_n = -j 2 pi n / N.
 */
struct LinearizedModel {
  PilotOperator op;
  CMat a_tilde;          // N x L
  CMat b_tilde;          // N x L
  RVec expansion_point;  // nu_tilde

  /** (a_tilde + b_tilde diag(nu - nu_tilde)) h. */
  CVec predict(const RVec& nu, const CVec& h) const;

  /** Effective mixing matrix Delta(nu) = a_tilde + b_tilde diag(nu - nu_tilde). */
  CMat delta(const RVec& nu) const;
};

LinearizedModel linearize(const PilotOperator& op, const RVec& expansion_point);

/**
 * Noise power for a target SNR: sigma_n^2 = P_rx / 10^{snr/10} with
 * P_rx = (1/N) sum_i Omega_i ||column_i||^2, the expectation of the received
 * signal power per sample over the path gains (analytic in Omega, not a
 * per-realization quantity).
 */
double calibrate_noise(double snr_db, const PathSet& ps, const CVec& pilot_time,
                       const AfdmConfig& cfg);

/** Unit-modulus affine-domain pilot with iid uniform phases. */
CVec generate_pilot(int n_sub, Rng& rng);

}  // namespace afdmsense

#endif
