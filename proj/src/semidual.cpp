#include "drag/semidual.hpp"

#include <cmath>
#include <limits>

namespace drag {

Potential::Potential(Vector values) : values_(std::move(values)) {
  require(values_.allFinite(), ErrorCode::NonFinite, "potential entries must be finite");
}

Potential Potential::centered() const {
  Potential out;
  out.values_ = values_.array() - values_.mean();
  return out;
}

namespace {

inline double half_sqdist(const Eigen::Ref<const Vector>& x, const DiscreteMeasure& target, Index j) {
  const double* y = target.points().col(j).data();
  double acc = 0.0;
  for (Index r = 0; r < x.size(); ++r) {
    const double diff = x[r] - y[r];
    acc += diff * diff;
  }
  return 0.5 * acc;
}

void check_dims(const Eigen::Ref<const Vector>& x, const Vector& g, const DiscreteMeasure& target) {
  require(x.size() == target.dim(), ErrorCode::DimensionMismatch, "point dimension differs from target");
  require(g.size() == target.size(), ErrorCode::DimensionMismatch, "potential length differs from M");
}

void check_eps(double eps) {
  require(std::isfinite(eps) && eps > 0.0, ErrorCode::InvalidArgument, "eps must be > 0");
}

// Two-pass soft-min without scratch storage.
double soft_min(const Eigen::Ref<const Vector>& x, const Vector& g, double eps,
                const DiscreteMeasure& target) {
  const Vector& logw = target.log_weights();
  double top = -std::numeric_limits<double>::infinity();
  for (Index j = 0; j < g.size(); ++j) {
    top = std::max(top, (g[j] - half_sqdist(x, target, j)) / eps + logw[j]);
  }
  double sum = 0.0;
  for (Index j = 0; j < g.size(); ++j) {
    sum += std::exp((g[j] - half_sqdist(x, target, j)) / eps + logw[j] - top);
  }
  return -eps * (top + std::log(sum));
}

}  // namespace

namespace detail {

CTransform hard_transform(const Eigen::Ref<const Vector>& x, const Vector& g,
                          const DiscreteMeasure& target) {
  CTransform best{half_sqdist(x, target, 0) - g[0], 0};
  for (Index j = 1; j < g.size(); ++j) {
    const double v = half_sqdist(x, target, j) - g[j];
    if (v < best.value) best = {v, j};
  }
  return best;
}

double log_partition(const Eigen::Ref<const Vector>& x, const Vector& g, double eps,
                     const DiscreteMeasure& target, Vector& scores, Vector* probs) {
  const Index m = g.size();
  scores.resize(m);
  const Vector& logw = target.log_weights();
  double top = -std::numeric_limits<double>::infinity();
  for (Index j = 0; j < m; ++j) {
    scores[j] = (g[j] - half_sqdist(x, target, j)) / eps + logw[j];
    top = std::max(top, scores[j]);
  }
  double sum = 0.0;
  if (probs != nullptr) {
    probs->resize(m);
    for (Index j = 0; j < m; ++j) sum += ((*probs)[j] = std::exp(scores[j] - top));
    *probs /= sum;
  } else {
    for (Index j = 0; j < m; ++j) sum += std::exp(scores[j] - top);
  }
  return top + std::log(sum);
}

void add_gradient(const Eigen::Ref<const Vector>& x, const Vector& g, double eps,
                  const DiscreteMeasure& target, double scale, Vector& scratch,
                  Eigen::Ref<Vector> accum) {
  const Vector& w = target.weights();
  if (eps == 0.0) {
    const Index j = hard_transform(x, g, target).index;
    accum.noalias() -= scale * w;
    accum[j] += scale;
    return;
  }
  const Index m = g.size();
  scratch.resize(m);
  const Vector& logw = target.log_weights();
  double top = -std::numeric_limits<double>::infinity();
  for (Index j = 0; j < m; ++j) {
    scratch[j] = (g[j] - half_sqdist(x, target, j)) / eps + logw[j];
    top = std::max(top, scratch[j]);
  }
  double sum = 0.0;
  for (Index j = 0; j < m; ++j) sum += (scratch[j] = std::exp(scratch[j] - top));
  const double norm = scale / sum;
  for (Index j = 0; j < m; ++j) accum[j] += norm * scratch[j] - scale * w[j];
}

}  // namespace detail

CTransform c_transform(const Potential& g, const DiscreteMeasure& target,
                       const Eigen::Ref<const Vector>& x) {
  check_dims(x, g.values(), target);
  return detail::hard_transform(x, g.values(), target);
}

double entropic_c_transform(const Potential& g, const DiscreteMeasure& target,
                            const Eigen::Ref<const Vector>& x, double eps) {
  check_eps(eps);
  check_dims(x, g.values(), target);
  return soft_min(x, g.values(), eps, target);
}

double ceps_transform(const Potential& g, const DiscreteMeasure& target,
                      const Eigen::Ref<const Vector>& x, double eps) {
  require(std::isfinite(eps) && eps >= 0.0, ErrorCode::InvalidArgument, "eps must be >= 0");
  check_dims(x, g.values(), target);
  return eps == 0.0 ? detail::hard_transform(x, g.values(), target).value
                    : soft_min(x, g.values(), eps, target);
}

SoftAssignment chi(const Eigen::Ref<const Vector>& x, const Potential& g, double eps,
                   const DiscreteMeasure& target) {
  check_eps(eps);
  check_dims(x, g.values(), target);
  SoftAssignment out;
  Vector scores;
  detail::log_partition(x, g.values(), eps, target, scores, &out.probs);
  return out;
}

Vector stochastic_grad(const Eigen::Ref<const Vector>& x, const Potential& g, double eps,
                       const DiscreteMeasure& target) {
  check_eps(eps);
  check_dims(x, g.values(), target);
  Vector grad = Vector::Zero(g.size());
  Vector scratch;
  detail::add_gradient(x, g.values(), eps, target, 1.0, scratch, grad);
  return grad;
}

double h_value(const Eigen::Ref<const Vector>& x, const Potential& g, double eps,
               const DiscreteMeasure& target) {
  return -ceps_transform(g, target, x, eps) - g.values().dot(target.weights());
}

McEstimate semidual_value_mc(const Potential& g, double eps, const SourceSpec& source,
                             const DiscreteMeasure& target, Index n_mc, const RngStream& rng) {
  require(source.dim() == target.dim(), ErrorCode::DimensionMismatch, "source/target dimension");
  require(g.size() == target.size(), ErrorCode::DimensionMismatch, "potential length differs from M");
  require(std::isfinite(eps) && eps >= 0.0, ErrorCode::InvalidArgument, "eps must be >= 0");
  const double linear = g.values().dot(target.weights());
  const Vector& gv = g.values();
  return monte_carlo_mean(source, rng, n_mc, [&](const Eigen::Ref<const Vector>& x) {
    const double transform =
        eps == 0.0 ? detail::hard_transform(x, gv, target).value : soft_min(x, gv, eps, target);
    return -transform - linear;
  });
}

Vector grad_quadrature_1d(const Potential& g, double eps, const SourceSpec& source,
                          const DiscreteMeasure& target, Index n_grid) {
  const auto* interval = std::get_if<UniformShiftedInterval>(&source.kind());
  require(interval != nullptr && target.dim() == 1, ErrorCode::InvalidArgument,
          "grad_quadrature_1d needs a 1D shifted-interval source and a 1D target");
  require(g.size() == target.size(), ErrorCode::DimensionMismatch, "potential length differs from M");
  require(n_grid >= 1000, ErrorCode::InvalidArgument, "n_grid must be >= 1000");
  require(std::isfinite(eps) && eps >= 0.0, ErrorCode::InvalidArgument, "eps must be >= 0");

  const Index m = g.size();
  if (m == 1) return Vector::Zero(1);  // the single cell holds all mass
  const Vector& gv = g.values();
  const double lo = interval->delta;
  const double h = 1.0 / static_cast<double>(n_grid);
  auto node = [&](Index i) { return lo + static_cast<double>(i) * h; };

  // Cell masses; the uniform density on a unit-length interval is 1.
  Vector mass = Vector::Zero(m);
  Vector x(1);
  if (eps > 0.0) {
    Vector scores;
    Vector probs;
    for (Index i = 0; i <= n_grid; ++i) {
      x[0] = node(i);
      detail::log_partition(x, gv, eps, target, scores, &probs);
      const double weight = (i == 0 || i == n_grid) ? 0.5 * h : h;
      mass.noalias() += weight * probs;
    }
  } else {
    const auto& y = target.points();
    x[0] = node(0);
    Index left = detail::hard_transform(x, gv, target).index;
    for (Index i = 0; i < n_grid; ++i) {
      const double a = node(i);
      const double b = node(i + 1);
      x[0] = b;
      const Index right = detail::hard_transform(x, gv, target).index;
      if (right == left) {
        mass[left] += b - a;
      } else {
        const double y0 = y(0, left);
        const double y1 = y(0, right);
        double cross = 0.5 * (a + b);
        if (y1 != y0) cross = 0.5 * (y0 + y1) + (gv[left] - gv[right]) / (y1 - y0);
        cross = std::clamp(cross, a, b);
        mass[left] += cross - a;
        mass[right] += b - cross;
      }
      left = right;
    }
  }
  return mass - target.weights();
}

}  // namespace drag
