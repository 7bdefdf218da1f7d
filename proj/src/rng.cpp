#include "afdmsense/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace afdmsense {

std::uint64_t Rng::mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

std::uint64_t Rng::next_u64() {
  state_ += kGolden;
  return mix(state_);
}

Rng Rng::child(std::uint64_t scenario, std::uint64_t trial) const {
  Rng c(0);
  c.state_ = mix(state_ + kGolden * (scenario + 1));
  c.state_ = mix(c.state_ + kGolden * (trial + 1));
  return c;
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) { return a + (b - a) * uniform(); }

double Rng::normal() {
  // Box-Muller; 1 - u keeps the log argument strictly positive.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

cplx Rng::complex_normal() {
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-std::log(u1));
  return {r * std::cos(2.0 * kPi * u2), r * std::sin(2.0 * kPi * u2)};
}

double Rng::gamma(double shape) {
  if (shape <= 0.0) throw std::domain_error("gamma: shape must be positive");
  if (shape < 1.0) {
    const double g = gamma(shape + 1.0);
    const double u = 1.0 - uniform();
    return g * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = 1.0 - uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

cplx sample_nakagami_gain(double m, double omega, Rng& rng) {
  if (m < 0.5) throw std::domain_error("sample_nakagami_gain: m must be >= 0.5");
  if (omega <= 0.0)
    throw std::domain_error("sample_nakagami_gain: omega must be positive");
  const double power = rng.gamma(m) * (omega / m);
  const double phase = rng.uniform(-kPi, kPi);
  return std::sqrt(power) * cplx{std::cos(phase), std::sin(phase)};
}

}  // namespace afdmsense
