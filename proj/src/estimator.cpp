#include "afdmsense/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "afdmsense/special.hpp"

namespace afdmsense {

namespace {

// Stack a natural-parameter vector as reals for the convergence norm.
RVec pack(const NaturalParams& p) {
  const auto l = p.eta.size();
  RVec v(3 * l);
  v.segment(0, l) = p.eta.real();
  v.segment(l, l) = p.eta.imag();
  v.segment(2 * l, l) = p.lambda;
  return v;
}

double clamp_counted(double x, double lo, double hi, int& count) {
  if (x < lo) {
    ++count;
    return lo;
  }
  if (x > hi) {
    ++count;
    return hi;
  }
  return x;
}

// Shared core of the r-step: precision = diag(lambda_r) + gram, where
// gram = Delta^H Delta / noise_var and rhs0 = Delta^H y / noise_var.
// Returns false when the joint precision is not positive definite, which
// can happen transiently once the prior site carries negative precision.
bool try_r_moments(const CMat& gram, const CVec& rhs0, const NaturalParams& lr,
                   CVec& mu, CMat& sigma) {
  CMat prec = gram;
  prec.diagonal() += lr.lambda.cast<cplx>();
  Eigen::LLT<CMat> llt(prec);
  if (llt.info() != Eigen::Success) return false;
  const auto l = gram.rows();
  sigma = llt.solve(CMat::Identity(l, l));
  mu = llt.solve(rhs0 + lr.eta);
  return true;
}

struct MatchResult {
  NaturalParams site;  // lq candidate from the matched moments
};

// Per-component moment matching: lambda = 1/var, eta = mean/var, with the
// variance floor and precision range clamps counted.
NaturalParams match_marginals(const CVec& mean, const RVec& var,
                              const SolverOptions& opts, int& clamps) {
  const auto l = mean.size();
  NaturalParams out;
  out.eta.resize(l);
  out.lambda.resize(l);
  for (Eigen::Index i = 0; i < l; ++i) {
    const double v = clamp_counted(var(i), 1.0 / opts.lambda_max,
                                   1.0 / opts.lambda_min, clamps);
    out.lambda(i) = 1.0 / v;
    out.eta(i) = mean(i) / v;
  }
  return out;
}

void damp_towards(NaturalParams& dst, const NaturalParams& proposal,
                  double rho) {
  if (rho >= 1.0) {
    dst = proposal;
    return;
  }
  dst.eta = rho * proposal.eta + (1.0 - rho) * dst.eta;
  dst.lambda = rho * proposal.lambda + (1.0 - rho) * dst.lambda;
}

// Sites are quotient objects and may legitimately carry negative precision:
// a ring-shaped prior (Nakagami m > 1) under an off-center tilt spreads mass
// tangentially, and a Gaussian can only report that as negative curvature.
// Pinning sites positive freezes the iteration short of its fixed point, so
// each site is range-clamped and the consumer enforces its own validity
// domain: the r-step recovers positive definiteness by shrinking negative
// parts, the s-step tilt needs m + lambda*omega > 0 at the update site.
void clamp_lambda(RVec& lam, const RVec& lower, double upper, int& clamps) {
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    lam(i) = clamp_counted(lam(i), lower(i), upper, clamps);
}

// s-site moments for the whole vector.
void s_moments_all(const NaturalParams& ls, const RVec& omega, double shape_m,
                   CVec& mean, RVec& second) {
  const auto l = omega.size();
  mean.resize(l);
  second.resize(l);
  for (Eigen::Index i = 0; i < l; ++i) {
    cplx m_i;
    double q_i;
    s_site_moments(shape_m, omega(i), ls.eta(i), ls.lambda(i), m_i, q_i);
    mean(i) = m_i;
    second(i) = q_i;
  }
}

RVec stack_moments(const CVec& mean, const RVec& second) {
  const auto l = mean.size();
  RVec g(3 * l);
  g.segment(0, l) = mean.real();
  g.segment(l, l) = mean.imag();
  g.segment(2 * l, l) = second;
  return g;
}

// r-step against precomputed Gram factors; shared by ec_r_step and ec_loop.
void r_step_from_gram(EcState& st, const CMat& gram, const CVec& rhs0,
                      const SolverOptions& opts) {
  CVec mu;
  CMat sigma;
  r_moments_from_gram(gram, rhs0, st.lr, mu, sigma);
  st.mu = mu;
  st.sigma = sigma;
  const RVec var = sigma.diagonal().real();
  const NaturalParams lq_prop = match_marginals(mu, var, opts, st.clamp_count);
  NaturalParams ls_prop;
  ls_prop.eta = lq_prop.eta - st.lr.eta;
  ls_prop.lambda = lq_prop.lambda - st.lr.lambda;
  damp_towards(st.ls, ls_prop, opts.damping);
  clamp_lambda(st.ls.lambda, opts, st.clamp_count, "ls");
  st.lq.eta = st.lr.eta + st.ls.eta;
  st.lq.lambda = st.lr.lambda + st.ls.lambda;
}

}  // namespace

void r_site_moments(const CVec& y, const CMat& delta, double noise_var,
                    const NaturalParams& lr, CVec& mu, CMat& sigma) {
  if (noise_var <= 0.0)
    throw std::invalid_argument("r_site_moments: noise_var must be positive");
  const CMat gram = delta.adjoint() * delta / noise_var;
  const CVec rhs0 = delta.adjoint() * y / noise_var;
  r_moments_from_gram(gram, rhs0, lr, mu, sigma);
}

void s_site_moments(double shape_m, double omega, cplx eta_s, double lambda_s,
                    cplx& mean, double& second) {
  if (shape_m < 0.5)
    throw std::domain_error("s_site_moments: shape_m must be >= 0.5");
  if (omega <= 0.0)
    throw std::domain_error("s_site_moments: omega must be positive");
  const double denom = shape_m + lambda_s * omega;
  if (denom <= 0.0)
    throw std::domain_error("s_site_moments: invalid tilt, m + lambda*omega <= 0");
  const double xi = omega * std::norm(eta_s) / denom;
  const double base = shape_m * omega / denom;
  mean = base * eta_s * hyp1f1_ratio(shape_m + 1.0, 2.0, shape_m, 1.0, xi);
  second = base * hyp1f1_ratio(shape_m + 1.0, 1.0, shape_m, 1.0, xi);
}

double s_site_variance(double shape_m, double omega, cplx eta_s,
                       double lambda_s) {
  if (shape_m < 0.5)
    throw std::domain_error("s_site_variance: shape_m must be >= 0.5");
  if (omega <= 0.0)
    throw std::domain_error("s_site_variance: omega must be positive");
  const double denom = shape_m + lambda_s * omega;
  if (denom <= 0.0)
    throw std::domain_error(
        "s_site_variance: invalid tilt, m + lambda*omega <= 0");
  const double xi = omega * std::norm(eta_s) / denom;
  const double base = shape_m * omega / denom;
  // Evaluating second - |mean|^2 directly cancels xi-fold under strong tilts
  // and can even go negative in double precision. The contiguous relations
  //   1F1(m+1;1;x) = 1F1(m;1;x) + x 1F1(m+1;2;x)
  //   1F1(m;1;x) - m 1F1(m+1;2;x) = (1-m) 1F1(m;2;x)
  // collapse the difference to a form whose bracket stays in [1/m, 1] for
  // m >= 1, losing at most an m-fold digit margin instead.
  if (shape_m == 1.0) return base;
  const double r2 = hyp1f1_ratio(shape_m + 1.0, 2.0, shape_m, 1.0, xi);
  const double r3 = hyp1f1_ratio(shape_m, 2.0, shape_m, 1.0, xi);
  return base * (1.0 - (shape_m - 1.0) * xi * r2 * r3);
}

void ec_r_step(EcState& st, const CVec& y, const CMat& delta, double noise_var,
               const SolverOptions& opts) {
  if (noise_var <= 0.0)
    throw std::invalid_argument("ec_r_step: noise_var must be positive");
  const CMat gram = delta.adjoint() * delta / noise_var;
  const CVec rhs0 = delta.adjoint() * y / noise_var;
  r_step_from_gram(st, gram, rhs0, opts);
}

void ec_s_step(EcState& st, const RVec& omega, double shape_m,
               const SolverOptions& opts) {
  CVec mean;
  RVec second;
  s_moments_all(st.ls, omega, shape_m, mean, second);
  RVec var(omega.size());
  for (Eigen::Index i = 0; i < omega.size(); ++i)
    var(i) = s_site_variance(shape_m, omega(i), st.ls.eta(i), st.ls.lambda(i));
  const NaturalParams lq_prop = match_marginals(mean, var, opts, st.clamp_count);
  NaturalParams lr_prop;
  lr_prop.eta = lq_prop.eta - st.ls.eta;
  lr_prop.lambda = lq_prop.lambda - st.ls.lambda;
  damp_towards(st.lr, lr_prop, opts.damping);
  clamp_lambda(st.lr.lambda, opts, st.clamp_count, "lr");
  st.lq.eta = st.lr.eta + st.ls.eta;
  st.lq.lambda = st.lr.lambda + st.ls.lambda;
}

EcState ec_loop(const CVec& y, const CMat& delta, double noise_var,
                const RVec& omega, double shape_m, const SolverOptions& opts) {
  if (noise_var <= 0.0)
    throw std::invalid_argument("ec_loop: noise_var must be positive");
  const auto l = delta.cols();
  if (omega.size() != l)
    throw std::invalid_argument("ec_loop: omega length mismatch");
  for (Eigen::Index i = 0; i < l; ++i)
    if (!(omega(i) > 0.0))
      throw std::invalid_argument("ec_loop: omega must be positive");

  // Iterate on the rescaled gains h' = h / sqrt(Omega), which makes the
  // prior unit-power Nakagami with the same shape. Path powers span many
  // decades (a far tap can sit 9+ orders below the LoS power), and in raw
  // coordinates the precision window [lambda_min, lambda_max] pins healthy
  // weak-path precisions against lambda_max, biasing the posterior second
  // moments the M-step consumes. After rescaling the clamps act on
  // scale-free precisions and only fire on genuine degeneracies. The
  // returned lr/ls/lq refer to the rescaled coordinates; mu and sigma are
  // mapped back to the physical gains.
  const RVec w = omega.cwiseSqrt();
  const CVec wc = w.cast<cplx>();
  const CMat delta_n = delta * wc.asDiagonal();
  const RVec omega_n = RVec::Ones(l);

  EcState st;
  st.lr.eta = CVec::Zero(l);
  st.lr.lambda = RVec::Ones(l);
  st.ls = st.lr;
  st.lq.eta = CVec::Zero(l);
  st.lq.lambda = 2.0 * RVec::Ones(l);

  const CMat gram = delta_n.adjoint() * delta_n / noise_var;
  const CVec rhs0 = delta_n.adjoint() * y / noise_var;

  RVec lq_prev = pack(st.lq);
  for (int iter = 1; iter <= opts.max_iter_ec; ++iter) {
    st.iters = iter;
    r_step_from_gram(st, gram, rhs0, opts);
    ec_s_step(st, omega_n, shape_m, opts);

    const RVec lq_now = pack(st.lq);
    const double num = (lq_now - lq_prev).squaredNorm();
    const double den = lq_now.squaredNorm();
    lq_prev = lq_now;
    if (den > 0.0 && num / den < opts.eps1) {
      st.converged = true;
      break;
    }
  }

  // Final r evaluation so mu/sigma reflect the exit parameters, plus the
  // fixed-point residual between the two site beliefs (both in rescaled
  // coordinates, so the residual weighs every path equally).
  CVec mu;
  CMat sigma;
  r_moments_from_gram(gram, rhs0, st.lr, mu, sigma);
  const RVec r_second = mu.cwiseAbs2() + sigma.diagonal().real();
  CVec s_mean;
  RVec s_second;
  s_moments_all(st.ls, omega_n, shape_m, s_mean, s_second);
  const RVec g_r = stack_moments(mu, r_second);
  const RVec g_s = stack_moments(s_mean, s_second);
  const double scale = g_r.squaredNorm();
  st.residual = scale > 0.0 ? (g_r - g_s).squaredNorm() / scale
                            : (g_r - g_s).squaredNorm();
  st.mu = mu.cwiseProduct(wc);
  st.sigma = wc.asDiagonal() * sigma * wc.asDiagonal();
  return st;
}

double update_d0(const RVec& q, const RVec& rel_dists, const RVec& fading_exps,
                 double g0, double lower, double upper) {
  const auto l = q.size();
  if (rel_dists.size() != l || fading_exps.size() != l)
    throw std::invalid_argument("update_d0: length mismatch");
  if (!(lower > 0.0) || !(upper > lower))
    throw std::invalid_argument("update_d0: bounds invalid");
  for (Eigen::Index i = 0; i < l; ++i)
    if (q(i) <= 0.0) throw std::invalid_argument("update_d0: q must be positive");

  // Objective f(d) = sum_i [ln Omega_i + q_i/Omega_i]; each term is convex
  // in d for n_i >= 1, so the derivative is increasing and bisection finds
  // the unique interior minimum.
  const auto deriv = [&](double d) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < l; ++i) {
      const double dd = d + rel_dists(i);
      acc += fading_exps(i) *
             (-1.0 / dd + q(i) / g0 * std::pow(dd, fading_exps(i) - 1.0));
    }
    return acc;
  };

  double lo = lower;
  double hi = upper;
  if (deriv(lo) >= 0.0) return lo;
  if (deriv(hi) <= 0.0) return hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo < 1e-6 * mid) return mid;
    (deriv(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

RVec update_nu(const CVec& mu, const CMat& sigma, const CMat& a_tilde,
               const CMat& b_tilde, const CVec& y, bool* ridge_flagged) {
  const auto l = mu.size();
  const CMat second = mu * mu.adjoint() + sigma;
  const CMat btb = b_tilde.transpose() * b_tilde.conjugate();
  const RMat p = second.cwiseProduct(btb).real();
  const CVec resid = y - a_tilde * mu;
  const RVec gamma =
      (mu.conjugate().asDiagonal() * (b_tilde.adjoint() * resid) -
       (b_tilde.adjoint() * a_tilde * sigma).diagonal())
          .real();

  if (ridge_flagged) *ridge_flagged = false;
  Eigen::LDLT<RMat> ldlt(p);
  if (ldlt.info() == Eigen::Success) {
    const RVec nu = ldlt.solve(gamma);
    if ((p * nu - gamma).norm() <= 1e-8 * (gamma.norm() + 1.0) && nu.allFinite())
      return nu;
  }
  // Singular or ill-conditioned P: ridge escalation.
  double ridge = 1e-14 * (p.trace() / l + 1.0);
  for (int attempt = 0; attempt < 20; ++attempt) {
    RMat pr = p;
    pr.diagonal().array() += ridge;
    Eigen::LDLT<RMat> reg(pr);
    if (reg.info() == Eigen::Success) {
      const RVec nu = reg.solve(gamma);
      if (nu.allFinite()) {
        if (ridge_flagged) *ridge_flagged = true;
        return nu;
      }
    }
    ridge *= 10.0;
  }
  throw std::runtime_error("update_nu: singular P, ridge escalation failed");
}

double los_radial_velocity(double nu1, const AfdmConfig& cfg) {
  return nu1 * cfg.c_light * cfg.delta_f / cfg.f_c;
}

RVec tap_rel_distances(const std::vector<int>& taps, const AfdmConfig& cfg) {
  RVec d(static_cast<Eigen::Index>(taps.size()));
  const double tap_dist = cfg.c_light / (cfg.n_sub * cfg.delta_f);
  for (std::size_t i = 0; i < taps.size(); ++i)
    d(static_cast<Eigen::Index>(i)) = taps[i] * tap_dist;
  return d;
}

namespace {

RVec omega_law(double d0, const RVec& rel_dists, const RVec& exps, double g0) {
  RVec w(rel_dists.size());
  for (Eigen::Index i = 0; i < w.size(); ++i)
    w(i) = g0 * std::pow(d0 + rel_dists(i), -exps(i));
  return w;
}

// EM auxiliary objective with frozen moments, up to theta-independent terms:
// -(1/sigma^2)[||y - Delta mu||^2 + tr(Delta Sigma Delta^H)]
//   - m sum_i [ln Omega_i(d0) + q_i / Omega_i(d0)]
double em_surrogate(const CVec& y, const CMat& delta, const CVec& mu,
                    const CMat& sigma, const RVec& q, const RVec& omega,
                    double shape_m, double noise_var) {
  const double fit = (y - delta * mu).squaredNorm() +
                     (delta * sigma).cwiseProduct(delta.conjugate()).sum().real();
  double prior = 0.0;
  for (Eigen::Index i = 0; i < q.size(); ++i)
    prior += std::log(omega(i)) + q(i) / omega(i);
  return -fit / noise_var - shape_m * prior;
}

}  // namespace

SensingEstimate estimate(const CVec& y_af, const LinearizedModel& model,
                         const EstimatorPriors& priors, double noise_var,
                         const SolverOptions& opts, EstimateTrace* trace) {
  const auto l = model.a_tilde.cols();
  if (priors.fading_exps.size() != l || priors.rel_dists.size() != l)
    throw std::invalid_argument("estimate: prior length mismatch");
  if (noise_var <= 0.0)
    throw std::invalid_argument("estimate: noise_var must be positive");

  LinearizedModel local = model;  // owned copy in case of re-linearization
  double d0 = opts.d0_init;
  RVec nu = RVec::Zero(l);
  RVec omega = omega_law(d0, priors.rel_dists, priors.fading_exps, priors.g0);

  SensingEstimate out;
  out.nu = nu;

  for (int iter = 1; iter <= opts.max_iter_em; ++iter) {
    out.em_iters = iter;
    const CMat delta = local.delta(nu);
    const EcState ec =
        ec_loop(y_af, delta, noise_var, omega, priors.shape_m, opts);
    out.ec_iters_total += ec.iters;
    out.clamp_count += ec.clamp_count;
    out.fixed_point_residual = ec.residual;

    const RVec q = ec.mu.cwiseAbs2() + ec.sigma.diagonal().real();
    const double d0_new = update_d0(q, priors.rel_dists, priors.fading_exps,
                                    priors.g0, opts.d0_lower, opts.d0_upper);

    // Doppler update in the expansion-0 form: fold the Taylor center into
    // the effective A so that the solved nu is absolute.
    const CMat a_eff =
        local.a_tilde - local.b_tilde * local.expansion_point.asDiagonal();
    bool ridge = false;
    nu = update_nu(ec.mu, ec.sigma, a_eff, local.b_tilde, y_af, &ridge);

    const RVec omega_new =
        omega_law(d0_new, priors.rel_dists, priors.fading_exps, priors.g0);
    if (trace) {
      trace->d0.push_back(d0_new);
      trace->nu.push_back(nu);
      trace->ridge_flagged = trace->ridge_flagged || ridge;
      trace->surrogate.push_back(em_surrogate(y_af, local.delta(nu), ec.mu,
                                              ec.sigma, q, omega_new,
                                              priors.shape_m, noise_var));
    }

    const double step = (d0_new - d0) * (d0_new - d0) / (d0_new * d0_new);
    d0 = d0_new;
    omega = omega_new;
    if (opts.relinearize) local = linearize(local.op, nu);
    if (step < opts.eps2) {
      out.converged = true;
      break;
    }
  }

  out.d0 = d0;
  out.nu = nu;
  out.los_radial_velocity = los_radial_velocity(nu(0), local.op.cfg);
  return out;
}

}  // namespace afdmsense
