#ifndef AFDMSENSE_ESTIMATOR_HPP
#define AFDMSENSE_ESTIMATOR_HPP

#include <vector>

#include "afdmsense/scenario.hpp"
#include "afdmsense/sensing.hpp"
#include "afdmsense/types.hpp"

namespace afdmsense {

/**
 * Natural parameters of a factorized complex exponential-family tilt,
 * exp(2 Re(eta_i^* h_i) - lambda_i |h_i|^2) per component.
 */
struct NaturalParams {
  CVec eta;
  RVec lambda;
};

/** First and second moments per component: E[h_i], E[|h_i|^2]. */
struct MomentPair {
  CVec mean;
  RVec second;
};

/**
 * Expectation-consistent belief state over the path gains. lambda_q stays
 * exactly lambda_r + lambda_s (both parts) after every half-step; mu and
 * sigma are the joint tilted-Gaussian moments of the final r-step. When the
 * state comes out of ec_loop, the natural parameters refer to the rescaled
 * gains h / sqrt(Omega) while mu and sigma are physical-gain moments.
 */
struct EcState {
  NaturalParams lr;  // likelihood-site tilt (r-belief)
  NaturalParams ls;  // prior-site tilt (s-belief)
  NaturalParams lq;  // matched belief, lq = lr + ls
  CVec mu;           // mu_t
  CMat sigma;        // Sigma_t, full L x L covariance
  int iters = 0;
  int clamp_count = 0;
  bool converged = false;
  double residual = 0.0;  // squared relative moment gap at exit
};

/**
 * Moments of the Gaussian-tilted likelihood site,
 *   precision P = diag(lambda_r) + Delta^H Delta / noise_var,
 *   mean = P^{-1} (Delta^H y / noise_var + eta_r),
 * with the full covariance P^{-1} returned.
 */
void r_site_moments(const CVec& y, const CMat& delta, double noise_var,
                    const NaturalParams& lr, CVec& mu, CMat& sigma);

/**
 * Moments of the tilted Nakagami prior site for one component. With
 * xi = Omega |eta_s|^2 / (m + lambda_s Omega):
 *   E[h]     = m Omega eta_s / (m + lambda_s Omega) * 1F1(m+1;2;xi)/1F1(m;1;xi)
 *   E[|h|^2] = m Omega       / (m + lambda_s Omega) * 1F1(m+1;1;xi)/1F1(m;1;xi)
 * The second moment drops the eta factor of the first (real, positive).
 */
void s_site_moments(double shape_m, double omega, cplx eta_s, double lambda_s,
                    cplx& mean, double& second);

/**
 * Cancellation-free variance of the tilted Nakagami site. Derived from the
 * contiguous relations 1F1(m+1;1;x) = 1F1(m;1;x) + x 1F1(m+1;2;x) and
 * 1F1(m;1;x) - m 1F1(m+1;2;x) = (1-m) 1F1(m;2;x):
 *   var = base * (1 - (m-1) xi R2 R3),  base = m Omega / (m + lambda Omega),
 *   R2 = 1F1(m+1;2;xi)/1F1(m;1;xi),  R3 = 1F1(m;2;xi)/1F1(m;1;xi),
 * which avoids the xi-fold cancellation of second - |mean|^2 under strong
 * tilts. At m = 1 it is exactly Omega / (1 + lambda Omega).
 */
double s_site_variance(double shape_m, double omega, cplx eta_s,
                       double lambda_s);

/** r-step of the EC iteration: match lq to the r-site, set ls = lq - lr. */
void ec_r_step(EcState& st, const CVec& y, const CMat& delta, double noise_var,
               const SolverOptions& opts);

/** s-step of the EC iteration: match lq to the s-site, set lr = lq - ls. */
void ec_s_step(EcState& st, const RVec& omega, double shape_m,
               const SolverOptions& opts);

/**
 * Alternate r/s steps until ||lq_new - lq_old||^2 / ||lq_new||^2 < eps1 or
 * max_iter_ec. The iteration runs on the rescaled gains h / sqrt(Omega)
 * (unit-power prior, scale-free precision clamps); mu and sigma in the
 * returned state are mapped back to the physical gains, and the fixed-point
 * residual is the squared relative gap between r-site and s-site moments in
 * the rescaled coordinates.
 */
EcState ec_loop(const CVec& y, const CMat& delta, double noise_var,
                const RVec& omega, double shape_m, const SolverOptions& opts);

/**
 * M-step range update: argmin over d0 of
 *   sum_i [ ln Omega_i(d0) + q_i / Omega_i(d0) ],
 * Omega_i(d0) = G0 (d0 + d_i)^{-n_i}, q_i = |mu_i|^2 + sigma_ii. The
 * objective is strictly convex for n_i >= 1; solved by bisection on the
 * derivative to |delta d0| < 1e-6 d0.
 */
double update_d0(const RVec& q, const RVec& rel_dists, const RVec& fading_exps,
                 double g0, double lower, double upper);

/**
 * M-step Doppler update nu = P^{-1} gamma with
 *   P     = Re{ (mu mu^H + Sigma) .* (B~^T conj(B~)) }
 *   gamma = Re{ diag(mu^*) B~^H (y - A~ mu) - diag(B~^H A~ Sigma) }.
 * Falls back to a ridge-regularized solve when P is singular; the flag
 * reports that regularization fired.
 */
RVec update_nu(const CVec& mu, const CMat& sigma, const CMat& a_tilde,
               const CMat& b_tilde, const CVec& y, bool* ridge_flagged = nullptr);

/** Joint estimate and diagnostics returned by the full EM-EC run. */
struct SensingEstimate {
  double d0 = 0.0;
  RVec nu;
  double los_radial_velocity = 0.0;  // v cos(theta_1), m/s
  bool converged = false;
  int em_iters = 0;
  int ec_iters_total = 0;
  double fixed_point_residual = 0.0;
  int clamp_count = 0;
};

/** Optional per-iteration trace for diagnostics and tests. */
struct EstimateTrace {
  std::vector<double> d0;
  std::vector<double> surrogate;  // EM auxiliary objective, frozen moments
  std::vector<RVec> nu;
  bool ridge_flagged = false;
};

/** Per-path prior knowledge available to the estimator. */
struct EstimatorPriors {
  double shape_m = 1.0;
  double g0 = 1.0;
  RVec fading_exps;  // n_i per estimated path
  RVec rel_dists;    // d_i per estimated path, d_1 = 0
};

/**
 * Full EM-EC joint estimator: EC inner loop for the gain posterior, then
 * the d0 and nu updates, iterated until (d0_new - d0)^2 / d0_new^2 < eps2
 * or max_iter_em. Deterministic; no randomness inside.
 */
SensingEstimate estimate(const CVec& y_af, const LinearizedModel& model,
                         const EstimatorPriors& priors, double noise_var,
                         const SolverOptions& opts,
                         EstimateTrace* trace = nullptr);

/** LoS radial velocity from the normalized Doppler: nu1 c delta_f / f_c. */
double los_radial_velocity(double nu1, const AfdmConfig& cfg);

/** Relative distances d_i for integer taps: d_i = c l_i / (N delta_f). */
RVec tap_rel_distances(const std::vector<int>& taps, const AfdmConfig& cfg);

}  // namespace afdmsense

#endif
