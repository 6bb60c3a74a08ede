#pragma once

#include "drag/measures.hpp"
#include "drag/monte_carlo.hpp"
#include "drag/types.hpp"

namespace drag {

/// Dual values g_j at the target points. Defined up to an additive constant.
class Potential {
public:
  Potential() = default;
  explicit Potential(Vector values);
  static Potential zeros(Index m) { return Potential(Vector::Zero(m)); }

  Index size() const noexcept { return values_.size(); }
  const Vector& values() const noexcept { return values_; }
  Vector& values() noexcept { return values_; }
  double operator[](Index j) const { return values_[j]; }

  /// Copy with the coordinate mean removed.
  Potential centered() const;

private:
  Vector values_;
};

/// Normalized soft assignment chi over the target points.
struct SoftAssignment {
  Vector probs;
};

struct CTransform {
  double value = 0.0;
  Index index = 0;  // 0-based; smallest index among ties
};

/// Hard c-transform min_j [1/2 |x - y_j|^2 - g_j] with its argmin.
CTransform c_transform(const Potential& g, const DiscreteMeasure& target,
                       const Eigen::Ref<const Vector>& x);

/// Soft-min -eps * ln sum_j w_j exp((g_j - 1/2 |x - y_j|^2) / eps), eps > 0.
double entropic_c_transform(const Potential& g, const DiscreteMeasure& target,
                            const Eigen::Ref<const Vector>& x, double eps);

/// Dispatches to the hard transform at eps == 0.
double ceps_transform(const Potential& g, const DiscreteMeasure& target,
                      const Eigen::Ref<const Vector>& x, double eps);

SoftAssignment chi(const Eigen::Ref<const Vector>& x, const Potential& g, double eps,
                   const DiscreteMeasure& target);

/// chi - w, the gradient in g of h_eps(x, g).
Vector stochastic_grad(const Eigen::Ref<const Vector>& x, const Potential& g, double eps,
                       const DiscreteMeasure& target);

/// h_eps(x, g) = -g^{c,eps}(x) - <g, w>.
double h_value(const Eigen::Ref<const Vector>& x, const Potential& g, double eps,
               const DiscreteMeasure& target);

/// Monte Carlo estimate of H_eps(g) = E[h_eps(X, g)].
McEstimate semidual_value_mc(const Potential& g, double eps, const SourceSpec& source,
                             const DiscreteMeasure& target, Index n_mc, const RngStream& rng);

/// Deterministic approximation of grad H_eps(g) for a one-dimensional
/// U([delta, 1 + delta]) source on n_grid trapezoid intervals. At eps == 0 the
/// interval containing a cell boundary is split at the exact crossing point,
/// so jumps of the indicator do not cost O(1/n_grid) accuracy.
Vector grad_quadrature_1d(const Potential& g, double eps, const SourceSpec& source,
                          const DiscreteMeasure& target, Index n_grid);

namespace detail {

/// Writes scores s_j = (g_j - 1/2 |x - y_j|^2) / eps + ln w_j into `scores`
/// and returns ln sum_j exp(s_j), evaluated after subtracting max_j s_j.
/// When probs is non-null it receives exp(s_j - lse), i.e. chi.
double log_partition(const Eigen::Ref<const Vector>& x, const Vector& g, double eps,
                     const DiscreteMeasure& target, Vector& scores, Vector* probs);

/// accum += scale * (chi(x, g, eps) - w). At eps == 0, chi is the one-hot
/// indicator of the hard argmin.
void add_gradient(const Eigen::Ref<const Vector>& x, const Vector& g, double eps,
                  const DiscreteMeasure& target, double scale, Vector& scratch,
                  Eigen::Ref<Vector> accum);

CTransform hard_transform(const Eigen::Ref<const Vector>& x, const Vector& g,
                          const DiscreteMeasure& target);

}  // namespace detail

}  // namespace drag
