#pragma once

#include "drag/rng.hpp"
#include "drag/types.hpp"

#include <filesystem>
#include <optional>
#include <variant>

namespace drag {

/// Finite target measure: sum_j w_j delta_{y_j}.
///
/// Points are stored column-wise (d x M). Weights are strictly positive and
/// sum to one within 1e-12; log-weights and the minimum weight are cached.
class DiscreteMeasure {
public:
  /// Validates without renormalizing. When radius_hint is absent the largest
  /// point norm is used.
  DiscreteMeasure(PointSet points, Vector weights, std::optional<double> radius_hint = {});

  /// Rescales the weights to sum to one before validation.
  static DiscreteMeasure normalized(PointSet points, Vector weights,
                                    std::optional<double> radius_hint = {});

  Index size() const noexcept { return points_.cols(); }
  Index dim() const noexcept { return points_.rows(); }
  const PointSet& points() const noexcept { return points_; }
  auto point(Index j) const { return points_.col(j); }
  const Vector& weights() const noexcept { return weights_; }
  const Vector& log_weights() const noexcept { return log_weights_; }
  double w_min() const noexcept { return w_min_; }
  double radius_hint() const noexcept { return radius_hint_; }

private:
  PointSet points_;
  Vector weights_;
  Vector log_weights_;
  double w_min_ = 0.0;
  double radius_hint_ = 0.0;
};

struct UniformBox {
  Vector lo;
  Vector hi;
};

/// U([delta, 1 + delta]) in dimension one.
struct UniformShiftedInterval {
  double delta = 0.0;
};

struct UniformBall {
  double radius = 1.0;
  Index dim = 1;
};

using SourceKind = std::variant<UniformBox, UniformShiftedInterval, UniformBall>;

/// Absolutely continuous source with support inside B(0, radius_bound).
class SourceSpec {
public:
  static SourceSpec uniform_box(Vector lo, Vector hi, double holder_alpha = 1.0);
  static SourceSpec uniform_shifted_interval(double delta, double holder_alpha = 1.0);
  static SourceSpec uniform_ball(double radius, Index dim, double holder_alpha = 1.0);

  const SourceKind& kind() const noexcept { return kind_; }
  Index dim() const noexcept { return dim_; }
  double radius_bound() const noexcept { return radius_bound_; }
  /// Metadata only; nothing in the solver depends on it.
  double holder_alpha() const noexcept { return holder_alpha_; }
  bool contains(const Eigen::Ref<const Vector>& x) const;

private:
  SourceSpec(SourceKind kind, Index dim, double radius_bound, double holder_alpha);

  SourceKind kind_;
  Index dim_;
  double radius_bound_;
  double holder_alpha_;
};

/// Fills every column of `out` with an independent draw from `source`.
void sample_into(const SourceSpec& source, RngStream& rng, Eigen::Ref<PointSet> out);

PointSet sample_batch(const SourceSpec& source, RngStream& rng, Index n);

/// Reads a point-cloud CSV: d coordinates then a weight per row, '#' lines
/// ignored. Weights summing to one within 1e-6 are renormalized.
DiscreteMeasure load_discrete_measure(const std::filesystem::path& path);

void save_discrete_measure(const DiscreteMeasure& measure, const std::filesystem::path& path);

}  // namespace drag
