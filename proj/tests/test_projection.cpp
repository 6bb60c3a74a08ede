#include "drag/projection.hpp"

#include <doctest.h>

#include <cmath>

using namespace drag;

namespace {

DiscreteMeasure line_target(std::initializer_list<double> ys) {
  PointSet pts(1, static_cast<Index>(ys.size()));
  Index j = 0;
  for (double y : ys) pts(0, j++) = y;
  return DiscreteMeasure::normalized(pts, Vector::Ones(pts.cols()));
}

Vector random_vector(RngStream& rng, Index n, double scale) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = scale * (2.0 * rng.uniform() - 1.0);
  return v;
}

}  // namespace

TEST_CASE("Cinf clips to the nonnegative box") {
  const auto set = ProjectionSet::cinf(1.0, 2);
  Vector g(2);
  g << -1.0, 3.0;
  const auto p = project(set, Potential(g));
  CHECK(p[0] == 0.0);
  CHECK(p[1] == 2.0);
  CHECK(set.contains(p.values()));
  CHECK(!set.contains(g));
  CHECK(set.diameter() == doctest::Approx(2.0 * std::sqrt(2.0)));
}

TEST_CASE("Cu pins the anchor and bounds by distance") {
  const auto target = line_target({0.0, 0.5});
  const auto set = ProjectionSet::cu(1.0, target);
  Vector g(2);
  g << 0.3, 0.8;
  const auto p = project(set, Potential(g));
  CHECK(p[0] == 0.0);
  CHECK(p[1] == 0.5);
  CHECK(set.upper()[1] == 0.5);
  CHECK(set.lower()[1] == -0.5);
}

TEST_CASE("Cu with a non-default anchor") {
  const auto target = line_target({0.0, 0.5, 2.0});
  const auto set = ProjectionSet::cu(2.0, target, 1);
  CHECK(set.anchor() == 1);
  CHECK(set.upper()[0] == 1.0);
  CHECK(set.upper()[1] == 0.0);
  CHECK(set.upper()[2] == 3.0);
  CHECK_THROWS_AS(ProjectionSet::cu(2.0, target, 3), Error);
}

TEST_CASE("projection is idempotent and non-expansive") {
  RngStream rng(2, 0);
  const auto target = line_target({0.1, 0.4, 0.5, 0.9, 1.3});
  for (const auto& set : {ProjectionSet::cinf(1.0, 5), ProjectionSet::cu(1.3, target)}) {
    for (int pair = 0; pair < 1000; ++pair) {
      const Potential g(random_vector(rng, 5, 3.0));
      const Potential h(random_vector(rng, 5, 3.0));
      const auto pg = project(set, g);
      const auto ph = project(set, h);
      CHECK(set.contains(pg.values()));
      CHECK(project(set, pg).values() == pg.values());
      CHECK((pg.values() - ph.values()).norm() <= (g.values() - h.values()).norm() + 1e-15);
    }
  }
}

TEST_CASE("kind names") {
  CHECK(to_string(ProjectionSet::Kind::Cinf) == "cinf");
  CHECK(to_string(ProjectionSet::Kind::Cu) == "cu");
}
