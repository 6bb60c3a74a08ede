#include "drag/bench/slope.hpp"

#include <cmath>
#include <vector>

namespace drag::bench {

SlopeFit fit_loglog_slope(std::span<const double> t, std::span<const double> values, double t_lo,
                          double t_hi) {
  require(t.size() == values.size(), ErrorCode::DimensionMismatch, "t and values differ in length");
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi) continue;
    require(std::isfinite(values[i]) && values[i] > 0.0, ErrorCode::InvalidArgument,
            "nonpositive metric value inside the slope window");
    xs.push_back(std::log(t[i]));
    ys.push_back(std::log(values[i]));
  }
  require(xs.size() >= 5, ErrorCode::InsufficientPoints, "slope fit needs at least 5 checkpoints");

  const auto n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  require(sxx > 0.0, ErrorCode::InsufficientPoints, "slope window has a single distinct t");

  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.points = static_cast<Index>(xs.size());
  return fit;
}

}  // namespace drag::bench
