#include "drag/estimators.hpp"

#include <cmath>

namespace drag {

TransportAssignment map_estimate(const Potential& g, const DiscreteMeasure& target,
                                 const Eigen::Ref<const Vector>& x) {
  const Index j = c_transform(g, target, x).index;
  return {j, target.point(j)};
}

Vector entropic_map_estimate(const Potential& g, const DiscreteMeasure& target,
                             const Eigen::Ref<const Vector>& x, double eps) {
  const SoftAssignment assignment = chi(x, g, eps, target);
  return target.points() * assignment.probs;
}

McEstimate ot_cost_estimate(const Potential& g, const SourceSpec& source,
                            const DiscreteMeasure& target, Index n_mc, const RngStream& rng) {
  require(source.dim() == target.dim(), ErrorCode::DimensionMismatch, "source/target dimension");
  require(g.size() == target.size(), ErrorCode::DimensionMismatch, "potential length differs from M");
  const double linear = g.values().dot(target.weights());
  const Vector& gv = g.values();
  return monte_carlo_mean(source, rng, n_mc, [&](const Eigen::Ref<const Vector>& x) {
    return detail::hard_transform(x, gv, target).value + linear;
  });
}

double potential_error_centered(const Potential& g, const Potential& g_star) {
  require(g.size() == g_star.size(), ErrorCode::DimensionMismatch, "potential lengths differ");
  const Vector diff = g.values() - g_star.values();
  return (diff.array() - diff.mean()).matrix().squaredNorm();
}

McEstimate map_error_lp(const Potential& g, const IndexMap& truth_map, const SourceSpec& source,
                        const DiscreteMeasure& target, Index n_mc, double p, const RngStream& rng) {
  require(std::isfinite(p) && p >= 1.0, ErrorCode::InvalidArgument, "p must be >= 1");
  require(source.dim() == target.dim(), ErrorCode::DimensionMismatch, "source/target dimension");
  require(g.size() == target.size(), ErrorCode::DimensionMismatch, "potential length differs from M");
  const Vector& gv = g.values();
  return monte_carlo_mean(source, rng, n_mc, [&](const Eigen::Ref<const Vector>& x) {
    const Index estimated = detail::hard_transform(x, gv, target).index;
    const Index truth = truth_map(x);
    if (estimated == truth) return 0.0;
    return std::pow((target.point(estimated) - target.point(truth)).norm(), p);
  });
}

double sampled_transform_gap(const Potential& g, const Potential& g_star,
                             const SourceSpec& source, const DiscreteMeasure& target, Index n,
                             const RngStream& rng) {
  require(g.size() == target.size() && g_star.size() == target.size(), ErrorCode::DimensionMismatch,
          "potential length differs from M");
  // Compare modulo the additive gauge: both potentials centered first.
  const Vector a = g.centered().values();
  const Vector b = g_star.centered().values();
  auto parts = map_chunks<double>(n, rng, [&](Index, RngStream& chunk_rng, Index count) {
    PointSet xs(source.dim(), count);
    sample_into(source, chunk_rng, xs);
    double worst = 0.0;
    for (Index i = 0; i < count; ++i) {
      const double gap = detail::hard_transform(xs.col(i), a, target).value -
                         detail::hard_transform(xs.col(i), b, target).value;
      worst = std::max(worst, std::abs(gap));
    }
    return worst;
  });
  double worst = 0.0;
  for (double v : parts) worst = std::max(worst, v);
  return worst;
}

}  // namespace drag
