#include "drag/measures.hpp"
#include "drag/monte_carlo.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace drag;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& contents) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << contents;
  return path;
}

ErrorCode load_error(const std::string& contents) {
  const auto path = write_temp("drag_measure_bad.csv", contents);
  try {
    load_discrete_measure(path);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a load error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("rng streams are reproducible and independent") {
  RngStream a(7, 3), b(7, 3), c(7, 4);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    differs |= u != c.uniform();
  }
  CHECK(differs);
  CHECK(a.split(5).uniform() == b.split(5).uniform());
  CHECK(a.split(5).uniform() != a.split(6).uniform());
}

TEST_CASE("uniform sampler moments") {
  RngStream rng(1, 0);
  double sum = 0.0, sum_sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    sum += u;
    sum_sq += u * u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(sum_sq / n == doctest::Approx(1.0 / 3.0).epsilon(0.01));
}

TEST_CASE("discrete measure validation") {
  PointSet pts(1, 2);
  pts << 0.0, 1.0;
  const DiscreteMeasure ok(pts, Vector::Constant(2, 0.5));
  CHECK(ok.w_min() == 0.5);
  CHECK(ok.radius_hint() == 1.0);
  CHECK(ok.log_weights()[0] == doctest::Approx(std::log(0.5)));

  auto code_of = [&](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  CHECK(code_of([&] { DiscreteMeasure(pts, Vector::Constant(3, 1.0 / 3)); }) ==
        ErrorCode::DimensionMismatch);
  Vector neg(2);
  neg << 1.5, -0.5;
  CHECK(code_of([&] { DiscreteMeasure(pts, neg); }) == ErrorCode::NonpositiveWeight);
  CHECK(code_of([&] { DiscreteMeasure(pts, Vector::Constant(2, 0.6)); }) == ErrorCode::WeightSum);
  CHECK(code_of([&] { DiscreteMeasure(pts, Vector::Constant(2, 0.5), 0.5); }) ==
        ErrorCode::InvalidArgument);

  const auto renorm = DiscreteMeasure::normalized(pts, Vector::Constant(2, 3.0));
  CHECK(renorm.weights()[1] == 0.5);
}

TEST_CASE("single point measure") {
  PointSet pts(3, 1);
  pts << 0.1, 0.2, 0.3;
  const DiscreteMeasure m(pts, Vector::Ones(1));
  CHECK(m.size() == 1);
  CHECK(m.w_min() == 1.0);
}

TEST_CASE("sources stay inside their support") {
  RngStream rng(3, 0);
  const auto box = SourceSpec::uniform_box(Vector::Zero(4), Vector::Ones(4));
  const auto interval = SourceSpec::uniform_shifted_interval(0.5);
  const auto ball = SourceSpec::uniform_ball(1.0, 2);
  CHECK(box.radius_bound() == doctest::Approx(2.0));
  CHECK(interval.radius_bound() == 1.5);
  for (const auto* s : {&box, &interval, &ball}) {
    const PointSet xs = sample_batch(*s, rng, 2000);
    for (Index i = 0; i < xs.cols(); ++i) CHECK(s->contains(xs.col(i)));
  }
}

TEST_CASE("uniform ball is uniform in radius^d") {
  // P(|X| <= 1/2) = 2^-d for U(B(0,1)).
  RngStream rng(9, 0);
  const auto ball = SourceSpec::uniform_ball(1.0, 3);
  const PointSet xs = sample_batch(ball, rng, 100000);
  double inner = 0.0;
  for (Index i = 0; i < xs.cols(); ++i) inner += xs.col(i).norm() <= 0.5 ? 1.0 : 0.0;
  CHECK(inner / 100000.0 == doctest::Approx(0.125).epsilon(0.05));
}

TEST_CASE("point cloud CSV round trip and errors") {
  const auto path = write_temp("drag_measure_ok.csv",
                               "# x y w\n0.0, 0.5, 0.25\n1.0,0.5,0.75\n\n");
  const auto m = load_discrete_measure(path);
  CHECK(m.size() == 2);
  CHECK(m.dim() == 2);
  CHECK(m.weights()[1] == 0.75);

  const auto out = std::filesystem::temp_directory_path() / "drag_measure_rt.csv";
  save_discrete_measure(m, out);
  const auto back = load_discrete_measure(out);
  CHECK(back.points() == m.points());
  CHECK(back.weights() == m.weights());

  CHECK(load_error("0.0,abc,0.5\n1,1,0.5\n") == ErrorCode::MalformedRow);
  CHECK(load_error("0.0,0.5\n1,1,0.5\n") == ErrorCode::DimensionMismatch);
  CHECK(load_error("0.0,1.0\n1,0\n") == ErrorCode::NonpositiveWeight);
  CHECK(load_error("0.0,0.5\n1,0.6\n") == ErrorCode::WeightSum);
  CHECK_THROWS_AS(load_discrete_measure("/nonexistent/file.csv"), Error);
}

TEST_CASE("Monte Carlo is independent of the worker count") {
  const auto box = SourceSpec::uniform_box(Vector::Zero(2), Vector::Ones(2));
  const RngStream rng(11, 0);
  auto f = [](const Eigen::Ref<const Vector>& x) { return x.squaredNorm(); };
  ::setenv("DRAG_THREADS", "1", 1);
  const auto one = monte_carlo_mean(box, rng, 100000, f);
  ::setenv("DRAG_THREADS", "4", 1);
  const auto four = monte_carlo_mean(box, rng, 100000, f);
  ::unsetenv("DRAG_THREADS");
  CHECK(one.estimate == four.estimate);
  CHECK(one.std_error == four.std_error);
  CHECK(one.estimate == doctest::Approx(2.0 / 3.0).epsilon(0.01));
}
