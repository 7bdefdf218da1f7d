#include "afdmsense/crb.hpp"

#include <cmath>
#include <stdexcept>

#include "afdmsense/estimator.hpp"

namespace afdmsense {

void CrbInputs::validate() const {
  const auto l = static_cast<Eigen::Index>(op.delay_taps.size());
  if (l < 1) throw std::invalid_argument("CrbInputs: no paths");
  if (nu.size() != l || fading_exps.size() != l)
    throw std::invalid_argument("CrbInputs: length mismatch");
  if (!(d0 > 0.0)) throw std::invalid_argument("CrbInputs: d0 must be positive");
  if (!(g0 > 0.0)) throw std::invalid_argument("CrbInputs: g0 must be positive");
  if (!(noise_var > 0.0))
    throw std::invalid_argument("CrbInputs: noise_var must be positive");
}

namespace {

RVec omega_vector(const CrbInputs& in) {
  const RVec d = tap_rel_distances(in.op.delay_taps, in.op.cfg);
  RVec w(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i)
    w(i) = path_power(in.g0, in.d0, d(i), in.fading_exps(i));
  return w;
}

RVec omega_d0_derivative(const CrbInputs& in) {
  const RVec d = tap_rel_distances(in.op.delay_taps, in.op.cfg);
  RVec dw(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i)
    dw(i) = -in.fading_exps(i) * in.g0 *
            std::pow(in.d0 + d(i), -in.fading_exps(i) - 1.0);
  return dw;
}

}  // namespace

CMat build_upsilon(const CrbInputs& in) {
  in.validate();
  const auto l = in.nu.size();
  const auto n = in.op.n();
  const RVec omega = omega_vector(in);
  CMat ups = CMat::Zero(n, n);
  for (Eigen::Index i = 0; i < l; ++i) {
    const CVec u = in.op.steered_column(static_cast<int>(i), in.nu(i));
    ups.noalias() += omega(i) * (u * u.adjoint());
  }
  ups.diagonal().array() += in.noise_var;
  return ups;
}

RMat fim(const CrbInputs& in) {
  in.validate();
  const auto l = in.nu.size();
  const auto n = in.op.n();
  const RVec omega = omega_vector(in);
  const RVec domega = omega_d0_derivative(in);

  // Every derivative of Upsilon is a sum of outer products of the steering
  // columns u_i and their Doppler derivatives du_i, so every trace in
  // FIM_{ij} = tr(Upsilon^{-1} dUps_j Upsilon^{-1} dUps_i) reduces to entries
  // of the small Gram matrix M = V^H Upsilon^{-1} V with V = [u | du], via
  // tr(Ups^{-1} x y^H Ups^{-1} p q^H) = M(y,p) M(q,x). One Cholesky solve.
  CMat v(n, 2 * l);
  for (Eigen::Index i = 0; i < l; ++i) {
    v.col(i) = in.op.steered_column(static_cast<int>(i), in.nu(i));
    v.col(l + i) = in.op.steered_deriv_column(static_cast<int>(i), in.nu(i));
  }

  CMat ups = CMat::Zero(n, n);
  for (Eigen::Index i = 0; i < l; ++i)
    ups.noalias() += omega(i) * (v.col(i) * v.col(i).adjoint());
  ups.diagonal().array() += in.noise_var;

  Eigen::LLT<CMat> llt(ups);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("fim: Upsilon is singular");
  const CMat m = v.adjoint() * llt.solve(v);

  const auto uu = [&](Eigen::Index a, Eigen::Index b) { return m(a, b); };
  const auto ud = [&](Eigen::Index a, Eigen::Index b) { return m(a, l + b); };
  const auto dd = [&](Eigen::Index a, Eigen::Index b) {
    return m(l + a, l + b);
  };

  RMat f = RMat::Zero(l + 1, l + 1);
  double f00 = 0.0;
  for (Eigen::Index i = 0; i < l; ++i)
    for (Eigen::Index j = 0; j < l; ++j)
      f00 += domega(i) * domega(j) * std::norm(uu(i, j));
  f(0, 0) = f00;

  for (Eigen::Index a = 0; a < l; ++a) {
    double f0a = 0.0;
    for (Eigen::Index i = 0; i < l; ++i)
      f0a += 2.0 * domega(i) * omega(a) * (ud(i, a) * uu(a, i)).real();
    f(0, a + 1) = f0a;
    f(a + 1, 0) = f0a;
  }

  for (Eigen::Index a = 0; a < l; ++a)
    for (Eigen::Index b = a; b < l; ++b) {
      const double fab =
          2.0 * omega(a) * omega(b) *
          (ud(a, b) * ud(b, a) + uu(a, b) * dd(b, a)).real();
      f(a + 1, b + 1) = fab;
      f(b + 1, a + 1) = fab;
    }
  return f;
}

CrbResult crb(const CrbInputs& in) {
  const RMat f = fim(in);
  const auto k = f.rows();
  CrbResult out;

  Eigen::LDLT<RMat> ldlt(f);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
    const RMat inv = ldlt.solve(RMat::Identity(k, k));
    const RMat resid = f * inv - RMat::Identity(k, k);
    if (resid.norm() < 1e-6 * std::sqrt(static_cast<double>(k)) &&
        inv.allFinite() && inv(0, 0) > 0.0 && inv(1, 1) > 0.0) {
      out.crb_d0 = inv(0, 0);
      out.crb_nu1 = inv(1, 1);
      return out;
    }
  }

  // Moore-Penrose fallback for a singular FIM.
  Eigen::SelfAdjointEigenSolver<RMat> eig(f);
  const RVec ev = eig.eigenvalues();
  const double cutoff = 1e-12 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  RVec inv_ev = RVec::Zero(k);
  for (Eigen::Index i = 0; i < k; ++i)
    if (ev(i) > cutoff) inv_ev(i) = 1.0 / ev(i);
  const RMat pinv =
      eig.eigenvectors() * inv_ev.asDiagonal() * eig.eigenvectors().transpose();
  out.crb_d0 = pinv(0, 0);
  out.crb_nu1 = pinv(1, 1);
  out.pseudo_inverse = true;
  return out;
}

CrbInputs crb_inputs_for(const ScenarioConfig& scn, const PathSet& ps,
                         const CVec& pilot_time) {
  const AfdmConfig cfg = scn.resolved_afdm();
  CrbInputs in;
  std::vector<int> taps(ps.paths.size());
  in.nu.resize(static_cast<Eigen::Index>(ps.paths.size()));
  in.fading_exps.resize(static_cast<Eigen::Index>(ps.paths.size()));
  for (std::size_t i = 0; i < ps.paths.size(); ++i) {
    taps[i] = ps.paths[i].tap;
    in.nu(static_cast<Eigen::Index>(i)) = ps.paths[i].doppler;
    in.fading_exps(static_cast<Eigen::Index>(i)) = ps.paths[i].fading_exp;
  }
  in.op = build_pilot_operator(pilot_time, taps, cfg);
  in.d0 = ps.d0;
  in.g0 = ps.g0;
  in.noise_var = calibrate_noise(scn.snr_db, ps, pilot_time, cfg);
  return in;
}

}  // namespace afdmsense
