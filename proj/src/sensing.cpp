#include "afdmsense/sensing.hpp"

#include <cmath>
#include <stdexcept>

#include "afdmsense/afdm.hpp"

namespace afdmsense {

std::pair<CVec, CVec> steering(double nu, int n_sub) {
  CVec r(n_sub);
  CVec dr(n_sub);
  for (int k = 0; k < n_sub; ++k) {
    const double ph = -2.0 * kPi * nu * k / n_sub;
    const cplx e{std::cos(ph), std::sin(ph)};
    r(k) = e;
    dr(k) = cplx{0.0, -2.0 * kPi * k / n_sub} * e;
  }
  return {r, dr};
}

CVec PilotOperator::steered_column(int i, double nu) const {
  const auto [r, dr] = steering(nu, cfg.n_sub);
  return daft * shifted_pilots.col(i).cwiseProduct(r);
}

CVec PilotOperator::steered_deriv_column(int i, double nu) const {
  const auto [r, dr] = steering(nu, cfg.n_sub);
  return daft * shifted_pilots.col(i).cwiseProduct(dr);
}

CMat PilotOperator::steered(const RVec& nu) const {
  if (nu.size() != num_paths())
    throw std::invalid_argument("PilotOperator::steered: nu length mismatch");
  CMat u(n(), num_paths());
  for (int i = 0; i < num_paths(); ++i) u.col(i) = steered_column(i, nu(i));
  return u;
}

CVec PilotOperator::apply(const RVec& nu, const CVec& h) const {
  if (h.size() != num_paths())
    throw std::invalid_argument("PilotOperator::apply: h length mismatch");
  CVec acc = CVec::Zero(n());
  for (int i = 0; i < num_paths(); ++i) acc += steered_column(i, nu(i)) * h(i);
  return acc;
}

CMat PilotOperator::dense_s() const {
  const auto rows = n();
  const auto l = num_paths();
  CMat s(rows, rows * l);
  for (Eigen::Index i = 0; i < l; ++i)
    s.middleCols(i * rows, rows) =
        daft * shifted_pilots.col(i).asDiagonal();
  return s;
}

PilotOperator build_pilot_operator(const CVec& pilot_time,
                                   const std::vector<int>& delay_taps,
                                   const AfdmConfig& cfg) {
  cfg.validate();
  if (pilot_time.size() != cfg.n_sub)
    throw std::invalid_argument("build_pilot_operator: pilot length mismatch");
  if (delay_taps.empty())
    throw std::invalid_argument("build_pilot_operator: no delay taps");
  for (int tap : delay_taps)
    if (tap < 0 || tap >= cfg.n_sub)
      throw std::invalid_argument("build_pilot_operator: tap out of range");

  PilotOperator op;
  op.cfg = cfg;
  op.daft = build_daft_matrix(cfg);
  op.delay_taps = delay_taps;
  op.shifted_pilots.resize(cfg.n_sub, static_cast<Eigen::Index>(delay_taps.size()));
  for (std::size_t i = 0; i < delay_taps.size(); ++i)
    op.shifted_pilots.col(static_cast<Eigen::Index>(i)) =
        cyclic_shift(pilot_time, delay_taps[i]);
  return op;
}

CVec LinearizedModel::predict(const RVec& nu, const CVec& h) const {
  return delta(nu) * h;
}

CMat LinearizedModel::delta(const RVec& nu) const {
  if (nu.size() != expansion_point.size())
    throw std::invalid_argument("LinearizedModel::delta: nu length mismatch");
  return a_tilde + b_tilde * (nu - expansion_point).asDiagonal();
}

LinearizedModel linearize(const PilotOperator& op, const RVec& expansion_point) {
  if (expansion_point.size() != op.num_paths())
    throw std::invalid_argument("linearize: expansion point length mismatch");
  LinearizedModel m;
  m.op = op;
  m.expansion_point = expansion_point;
  m.a_tilde.resize(op.n(), op.num_paths());
  m.b_tilde.resize(op.n(), op.num_paths());
  for (int i = 0; i < op.num_paths(); ++i) {
    m.a_tilde.col(i) = op.steered_column(i, expansion_point(i));
    m.b_tilde.col(i) = op.steered_deriv_column(i, expansion_point(i));
  }
  return m;
}

double calibrate_noise(double snr_db, const PathSet& ps, const CVec& pilot_time,
                       const AfdmConfig& cfg) {
  cfg.validate();
  if (!std::isfinite(snr_db))
    throw std::invalid_argument("calibrate_noise: snr_db must be finite");
  // |r(nu)_n| = 1, so every steered column has energy ||s||^2 exactly.
  const double col_energy = pilot_time.squaredNorm();
  double p_rx = 0.0;
  for (const Path& p : ps.paths) p_rx += p.power * col_energy;
  p_rx /= cfg.n_sub;
  return p_rx / std::pow(10.0, snr_db / 10.0);
}

CVec generate_pilot(int n_sub, Rng& rng) {
  CVec x(n_sub);
  for (int k = 0; k < n_sub; ++k) {
    const double ph = rng.uniform(0.0, 2.0 * kPi);
    x(k) = cplx{std::cos(ph), std::sin(ph)};
  }
  return x;
}

}  // namespace afdmsense
