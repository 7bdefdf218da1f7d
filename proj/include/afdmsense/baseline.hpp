#pragma once

#include "afdmsense/types.hpp"

namespace afdmsense {

// Aggregate received-power measurement for RSS ranging.
struct RssMeasurement {
  double total_power = 0.0;  // ||y_af||^2 / N
  double noise_var = 0.0;
};

struct RssRangeBounds {
  double lower = 0.1;   // meters
  double upper = 1e5;   // meters
};

struct RssEstimate {
  double d0 = 0.0;
  bool degenerate = false;  // no positive excess power; upper bound returned
};

// Moment-inversion range estimate under a single-path Nakagami aggregate
// model with mean power g0 d0^{-n1} + noise_var:
//   d0_hat = (g0 / (P - noise_var))^{1/n1}.
// The shape parameter does not move the moment-matched optimum but is
// validated for interface consistency. Reimplemented baseline; the cited
// method's internals are not public, so outputs are labeled accordingly.
RssEstimate rss_nakagami_range(const RssMeasurement& meas, double shape_m,
                               double n1, double g0,
                               const RssRangeBounds& bounds = RssRangeBounds{});

}  // namespace afdmsense
