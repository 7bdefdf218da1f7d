#include "afdmsense/afdm.hpp"

#include <cmath>
#include <stdexcept>

namespace afdmsense {

void AfdmConfig::validate() const {
  if (n_sub < 2) throw std::invalid_argument("AfdmConfig: n_sub must be >= 2");
  if (delta_f <= 0.0)
    throw std::invalid_argument("AfdmConfig: delta_f must be positive");
  if (f_c <= 0.0) throw std::invalid_argument("AfdmConfig: f_c must be positive");
  if (c_light <= 0.0)
    throw std::invalid_argument("AfdmConfig: c_light must be positive");
  if (k_v < 0) throw std::invalid_argument("AfdmConfig: k_v must be >= 0");
}

double AfdmConfig::resolved_c1(double nu_max) const {
  if (c1 >= 0.0) return c1;
  const int nu_max_int = static_cast<int>(std::ceil(std::abs(nu_max)));
  return (2.0 * (nu_max_int + k_v) + 1.0) / (2.0 * n_sub);
}

double AfdmConfig::doppler_norm(double radial_speed) const {
  return radial_speed * f_c / (c_light * delta_f);
}

namespace {

cplx unit_phase(double turns) {
  // e^{-j 2 pi turns}; reduce first so large n^2 c arguments keep precision
  const double t = turns - std::floor(turns);
  return {std::cos(2.0 * kPi * t), -std::sin(2.0 * kPi * t)};
}

}  // namespace

CMat build_daft_matrix(const AfdmConfig& cfg) {
  cfg.validate();
  if (cfg.c1 < 0.0)
    throw std::invalid_argument("build_daft_matrix: c1 is unresolved (auto)");
  const int n = cfg.n_sub;
  const double c1 = cfg.c1;
  CMat a(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int row = 0; row < n; ++row) {
    const double row2 = static_cast<double>(row) * row;
    for (int col = 0; col < n; ++col) {
      const double col2 = static_cast<double>(col) * col;
      const double turns = cfg.c2 * row2 +
                           static_cast<double>(row) * col / n + c1 * col2;
      a(row, col) = scale * unit_phase(turns);
    }
  }
  return a;
}

CVec idaft(const CVec& x, const AfdmConfig& cfg) {
  cfg.validate();
  if (x.size() != cfg.n_sub)
    throw std::invalid_argument("idaft: length mismatch");
  return build_daft_matrix(cfg).adjoint() * x;
}

CVec daft(const CVec& s, const AfdmConfig& cfg) {
  cfg.validate();
  if (s.size() != cfg.n_sub)
    throw std::invalid_argument("daft: length mismatch");
  return build_daft_matrix(cfg) * s;
}

CVec cyclic_shift(const CVec& v, int l) {
  const auto n = v.size();
  if (l < 0 || l > n) throw std::invalid_argument("cyclic_shift: tap out of range");
  CVec out(n);
  const Eigen::Index shift = l % n;
  for (Eigen::Index k = 0; k < n; ++k) out(k) = v((k - shift + n) % n);
  return out;
}

}  // namespace afdmsense
