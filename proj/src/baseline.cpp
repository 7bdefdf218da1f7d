#include "afdmsense/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace afdmsense {

RssEstimate rss_nakagami_range(const RssMeasurement& meas, double shape_m,
                               double n1, double g0,
                               const RssRangeBounds& bounds) {
  if (meas.total_power < 0.0)
    throw std::invalid_argument("rss_nakagami_range: total_power negative");
  if (meas.noise_var <= 0.0)
    throw std::invalid_argument("rss_nakagami_range: noise_var must be positive");
  if (shape_m < 0.5)
    throw std::invalid_argument("rss_nakagami_range: shape_m must be >= 0.5");
  if (n1 <= 0.0 || g0 <= 0.0)
    throw std::invalid_argument("rss_nakagami_range: n1 and g0 must be positive");
  if (!(bounds.lower > 0.0) || !(bounds.upper > bounds.lower))
    throw std::invalid_argument("rss_nakagami_range: bounds invalid");

  RssEstimate out;
  const double excess = meas.total_power - meas.noise_var;
  if (excess <= meas.noise_var * 1e-12) {
    out.d0 = bounds.upper;
    out.degenerate = true;
    return out;
  }
  const double d0 = std::pow(g0 / excess, 1.0 / n1);
  out.d0 = std::clamp(d0, bounds.lower, bounds.upper);
  return out;
}

}  // namespace afdmsense
