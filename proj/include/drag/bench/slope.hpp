#pragma once

#include "drag/types.hpp"

#include <span>

namespace drag::bench {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double r_squared = 0.0;
  Index points = 0;
};

/// Least-squares fit of ln(value) against ln(t) over checkpoints with
/// t_lo <= t <= t_hi. Needs at least five points, all with value > 0.
SlopeFit fit_loglog_slope(std::span<const double> t, std::span<const double> values, double t_lo,
                          double t_hi);

}  // namespace drag::bench
