#include "drag/projection.hpp"

#include <cmath>

namespace drag {

ProjectionSet::ProjectionSet(Kind kind, double radius, Index anchor, Vector lower, Vector upper)
    : kind_(kind), radius_(radius), anchor_(anchor), lower_(std::move(lower)), upper_(std::move(upper)) {}

ProjectionSet ProjectionSet::cinf(double radius, Index m) {
  require(std::isfinite(radius) && radius > 0.0, ErrorCode::InvalidArgument, "radius must be > 0");
  require(m >= 1, ErrorCode::InvalidArgument, "M must be >= 1");
  return ProjectionSet(Kind::Cinf, radius, 0, Vector::Zero(m),
                       Vector::Constant(m, 2.0 * radius * radius));
}

ProjectionSet ProjectionSet::cu(double radius, const DiscreteMeasure& target, Index anchor) {
  require(std::isfinite(radius) && radius > 0.0, ErrorCode::InvalidArgument, "radius must be > 0");
  require(anchor >= 0 && anchor < target.size(), ErrorCode::InvalidArgument, "anchor out of range");
  const Index m = target.size();
  Vector upper(m);
  for (Index j = 0; j < m; ++j) {
    upper[j] = radius * (target.point(anchor) - target.point(j)).norm();
  }
  upper[anchor] = 0.0;
  Vector lower = -upper;
  return ProjectionSet(Kind::Cu, radius, anchor, std::move(lower), std::move(upper));
}

bool ProjectionSet::contains(const Vector& g) const {
  return g.size() == size() && (g.array() >= lower_.array()).all() &&
         (g.array() <= upper_.array()).all();
}

double ProjectionSet::diameter() const { return (upper_ - lower_).norm(); }

void ProjectionSet::project_inplace(Eigen::Ref<Vector> g) const {
  g = g.cwiseMax(lower_).cwiseMin(upper_);
}

Potential project(const ProjectionSet& set, const Potential& g) {
  require(g.size() == set.size(), ErrorCode::DimensionMismatch, "potential length differs from set");
  Vector out = g.values();
  set.project_inplace(out);
  return Potential(std::move(out));
}

std::string to_string(ProjectionSet::Kind kind) {
  return kind == ProjectionSet::Kind::Cinf ? "cinf" : "cu";
}

}  // namespace drag
