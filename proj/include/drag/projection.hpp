#pragma once

#include "drag/measures.hpp"
#include "drag/semidual.hpp"

#include <string>

namespace drag {

/// Axis-aligned box for projected steps, one of
///   Cinf = [0, 2 R^2]^M, or
///   Cu   = {g : g_anchor = 0, |g_j| <= R |y_anchor - y_j|}.
/// Euclidean projection onto either is coordinate clipping.
class ProjectionSet {
public:
  enum class Kind { Cinf, Cu };

  static ProjectionSet cinf(double radius, Index m);
  static ProjectionSet cu(double radius, const DiscreteMeasure& target, Index anchor = 0);

  Kind kind() const noexcept { return kind_; }
  double radius() const noexcept { return radius_; }
  /// 0-based anchor; only meaningful for Cu.
  Index anchor() const noexcept { return anchor_; }
  const Vector& lower() const noexcept { return lower_; }
  const Vector& upper() const noexcept { return upper_; }
  Index size() const noexcept { return lower_.size(); }

  bool contains(const Vector& g) const;
  /// sup ||g - g'|| over the set.
  double diameter() const;

  /// In-place clip, for the solver's hot loop.
  void project_inplace(Eigen::Ref<Vector> g) const;

private:
  ProjectionSet(Kind kind, double radius, Index anchor, Vector lower, Vector upper);

  Kind kind_;
  double radius_;
  Index anchor_;
  Vector lower_;
  Vector upper_;
};

Potential project(const ProjectionSet& set, const Potential& g);

std::string to_string(ProjectionSet::Kind kind);

}  // namespace drag
