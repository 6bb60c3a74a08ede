#pragma once

#include "drag/measures.hpp"
#include "drag/monte_carlo.hpp"
#include "drag/semidual.hpp"

#include <functional>

namespace drag {

/// Laguerre cell of a source point and the target point it is sent to.
struct TransportAssignment {
  Index index = 0;  // 0-based
  Vector point;
};

/// Index-valued transport map, e.g. an oracle's true map.
using IndexMap = std::function<Index(const Eigen::Ref<const Vector>&)>;

/// T(g)(x) = y_{j*}, j* the c-transform argmin (smallest index on ties).
TransportAssignment map_estimate(const Potential& g, const DiscreteMeasure& target,
                                 const Eigen::Ref<const Vector>& x);

/// Barycentric projection sum_j chi_j(x, g, eps) y_j.
Vector entropic_map_estimate(const Potential& g, const DiscreteMeasure& target,
                             const Eigen::Ref<const Vector>& x, double eps);

/// Monte Carlo estimate of int g^c dmu + sum_j w_j g_j. Equal to minus the
/// eps = 0 semi-dual estimate on the same stream.
McEstimate ot_cost_estimate(const Potential& g, const SourceSpec& source,
                            const DiscreteMeasure& target, Index n_mc, const RngStream& rng);

/// Squared norm of the difference after removing each argument's mean.
double potential_error_centered(const Potential& g, const Potential& g_star);

/// Monte Carlo estimate of E |y_{j_hat(X)} - y_{j*(X)}|^p.
McEstimate map_error_lp(const Potential& g, const IndexMap& truth_map, const SourceSpec& source,
                        const DiscreteMeasure& target, Index n_mc, double p, const RngStream& rng);

/// Largest sampled |g^c(x) - g*^c(x)| over n draws, both potentials centered;
/// a diagnostic stand-in for a sup-norm potential-function error.
double sampled_transform_gap(const Potential& g, const Potential& g_star,
                             const SourceSpec& source, const DiscreteMeasure& target, Index n,
                             const RngStream& rng);

}  // namespace drag
