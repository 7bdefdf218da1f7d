#include "afdmsense/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace afdmsense {

double path_power(double g0, double d0, double rel_distance,
                  double fading_exp) {
  if (g0 <= 0.0) throw std::invalid_argument("path_power: g0 must be positive");
  if (d0 + rel_distance <= 0.0)
    throw std::invalid_argument("path_power: distance must be positive");
  return g0 * std::pow(d0 + rel_distance, -fading_exp);
}

void ScenarioConfig::validate() const {
  afdm.validate();
  if (num_paths < 1)
    throw std::invalid_argument("ScenarioConfig: num_paths must be >= 1");
  if (est_num_paths < 0 || est_num_paths > num_paths)
    throw std::invalid_argument(
        "ScenarioConfig: est_num_paths must be in [0, num_paths]");
  if (shape_m < 0.5)
    throw std::invalid_argument("ScenarioConfig: shape_m must be >= 0.5");
  if (g0 <= 0.0) throw std::invalid_argument("ScenarioConfig: g0 must be positive");
  if (d0_true <= 0.0)
    throw std::invalid_argument("ScenarioConfig: d0_true must be positive");
  if (velocity_kmh < 0.0)
    throw std::invalid_argument("ScenarioConfig: velocity_kmh must be >= 0");
  if (fading_exp_los <= 0.0 || fading_exp_nlos <= 0.0)
    throw std::invalid_argument("ScenarioConfig: fading exponents must be positive");
  if (tap_min < 1 || tap_max < tap_min || tap_max >= afdm.n_sub)
    throw std::invalid_argument("ScenarioConfig: bad tap range");
  if (num_paths - 1 > tap_max - tap_min + 1)
    throw std::invalid_argument(
        "ScenarioConfig: not enough distinct taps for the NLoS paths");
  if (trials < 1) throw std::invalid_argument("ScenarioConfig: trials must be >= 1");
  if (solver.eps1 <= 0.0 || solver.eps2 <= 0.0 || solver.max_iter_ec < 1 ||
      solver.max_iter_em < 1)
    throw std::invalid_argument("ScenarioConfig: bad solver tolerances");
  if (solver.damping <= 0.0 || solver.damping > 1.0)
    throw std::invalid_argument("ScenarioConfig: damping must be in (0, 1]");
  if (solver.d0_lower <= 0.0 || solver.d0_upper <= solver.d0_lower)
    throw std::invalid_argument("ScenarioConfig: bad d0 bounds");
}

PathSet generate_paths(const ScenarioConfig& scn, Rng& rng) {
  scn.validate();
  const int l = scn.num_paths;
  const double v = scn.velocity_mps();

  PathSet ps;
  ps.num_paths = l;
  ps.d0 = scn.d0_true;
  ps.shape_m = scn.shape_m;
  ps.g0 = scn.g0;
  ps.velocity = v;
  ps.paths.reserve(l);

  // NLoS taps: uniform draw without replacement, kept sorted so that
  // missing-path mode can drop the largest-delay paths from the back.
  std::vector<int> pool(scn.tap_max - scn.tap_min + 1);
  std::iota(pool.begin(), pool.end(), scn.tap_min);
  std::vector<int> taps;
  taps.push_back(0);  // LoS
  for (int i = 0; i < l - 1; ++i) {
    const auto pick = static_cast<std::size_t>(
        rng.uniform(0.0, static_cast<double>(pool.size())));
    taps.push_back(pool[pick]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  std::sort(taps.begin() + 1, taps.end());

  const double tap_dist = scn.afdm.c_light / (scn.afdm.n_sub * scn.afdm.delta_f);
  for (int i = 0; i < l; ++i) {
    Path p;
    p.tap = taps[i];
    p.delay = taps[i] / (scn.afdm.n_sub * scn.afdm.delta_f);
    p.rel_distance = taps[i] * tap_dist;
    p.fading_exp = i == 0 ? scn.fading_exp_los : scn.fading_exp_nlos;
    p.angle = rng.uniform(0.0, 2.0 * kPi);
    p.doppler = scn.afdm.doppler_norm(v * std::cos(p.angle));
    p.power = path_power(scn.g0, scn.d0_true, p.rel_distance, p.fading_exp);
    p.gain = sample_nakagami_gain(scn.shape_m, p.power, rng);
    ps.paths.push_back(p);
  }
  return ps;
}

namespace {

void check_taps(const PathSet& ps, const AfdmConfig& cfg) {
  for (const Path& p : ps.paths)
    if (p.tap < 0 || p.tap >= cfg.n_sub)
      throw std::invalid_argument("channel: tap out of range");
}

}  // namespace

CMat build_time_channel(const PathSet& ps, const AfdmConfig& cfg) {
  cfg.validate();
  check_taps(ps, cfg);
  const int n = cfg.n_sub;
  CMat h = CMat::Zero(n, n);
  for (const Path& p : ps.paths) {
    for (int k = 0; k < n; ++k) {
      const double ph = -2.0 * kPi * p.doppler * k / n;
      h(k, (k - p.tap + n) % n) += p.gain * cplx{std::cos(ph), std::sin(ph)};
    }
  }
  return h;
}

ChannelMatrices effective_affine_channel(const PathSet& ps,
                                         const AfdmConfig& cfg) {
  cfg.validate();
  check_taps(ps, cfg);
  const int n = cfg.n_sub;
  const CMat a = build_daft_matrix(cfg);

  ChannelMatrices out;
  out.h_t = build_time_channel(ps, cfg);
  out.h_af = a * out.h_t * a.adjoint();
  out.per_path.reserve(ps.paths.size());
  out.band_centers.reserve(ps.paths.size());
  for (const Path& p : ps.paths) {
    CMat ht_i = CMat::Zero(n, n);
    for (int k = 0; k < n; ++k) {
      const double ph = -2.0 * kPi * p.doppler * k / n;
      ht_i(k, (k - p.tap + n) % n) = cplx{std::cos(ph), std::sin(ph)};
    }
    out.per_path.push_back(a * ht_i * a.adjoint());
    const long loc = std::lround(2.0 * n * cfg.c1 * p.tap);
    out.band_centers.push_back(static_cast<int>(((loc % n) + n) % n));
  }
  return out;
}

Observation synthesize_received(const PathSet& ps, const CVec& pilot_affine,
                                double noise_var, const AfdmConfig& cfg,
                                Rng& rng) {
  cfg.validate();
  if (noise_var <= 0.0)
    throw std::invalid_argument("synthesize_received: noise_var must be positive");
  if (pilot_affine.size() != cfg.n_sub)
    throw std::invalid_argument("synthesize_received: pilot length mismatch");

  const CMat a = build_daft_matrix(cfg);
  const CMat h_t = build_time_channel(ps, cfg);

  Observation obs;
  obs.pilot_affine = pilot_affine;
  obs.pilot_time = a.adjoint() * pilot_affine;
  obs.noise_var = noise_var;
  obs.y_af = a * (h_t * obs.pilot_time);
  const double sigma = std::sqrt(noise_var);
  for (Eigen::Index k = 0; k < obs.y_af.size(); ++k)
    obs.y_af(k) += sigma * rng.complex_normal();
  return obs;
}

}  // namespace afdmsense
