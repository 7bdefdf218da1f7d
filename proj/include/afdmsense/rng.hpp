#ifndef AFDMSENSE_RNG_HPP
#define AFDMSENSE_RNG_HPP

#include <cstdint>

#include "afdmsense/types.hpp"

namespace afdmsense {

/**
 * Deterministic splittable random generator (SplitMix64 core).
 *
 * The state advances by a fixed odd constant and each output is a bijective
 * mix of the counter, so streams are pure functions of (key, draw index).
 * Child streams for (scenario, trial) pairs are derived by re-keying, which
 * keeps parallel sweeps free of sequence coupling. Value semantics; no
 * platform-dependent behavior.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(mix(seed ^ kGolden)) {}

  /** Independent reproducible stream for a (scenario, trial) pair. */
  Rng child(std::uint64_t scenario, std::uint64_t trial) const;

  std::uint64_t next_u64();

  /** Uniform on [0, 1) with 53-bit resolution. */
  double uniform();

  /** Uniform on [a, b). */
  double uniform(double a, double b);

  /** Standard normal via Box-Muller (two uniforms per call). */
  double normal();

  /** Circular complex normal CN(0, 1). */
  cplx complex_normal();

  /**
   * Gamma(shape, scale 1) via the Marsaglia-Tsang squeeze method;
   * shapes in (0, 1) use the Gamma(shape+1) boost with a uniform power.
   */
  double gamma(double shape);

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
  static std::uint64_t mix(std::uint64_t z);

  std::uint64_t state_;
};

/**
 * Complex Nakagami-m fading gain: |h|^2 ~ Gamma(m, Omega/m) and uniform
 * phase, so E[|h|^2] = Omega. Requires m >= 0.5 and Omega > 0.
 */
cplx sample_nakagami_gain(double m, double omega, Rng& rng);

}  // namespace afdmsense

#endif
