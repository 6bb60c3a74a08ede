#include "drag/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace drag;

TEST_CASE("Example 3 closed form") {
  const auto truth = example3_truth(4, 0.5);
  const Potential anchored = truth.anchored(0);
  const double expected[] = {0.0, -3.0 / 32.0, -6.0 / 32.0, -9.0 / 32.0};
  for (Index k = 0; k < 4; ++k) CHECK(anchored[k] == doctest::Approx(expected[k]).epsilon(1e-14));
  CHECK(std::abs(truth.g_star.values().sum()) <= 1e-15);
  REQUIRE(truth.true_cost.has_value());
  CHECK(*truth.true_cost == doctest::Approx(7.0 / 96.0).epsilon(1e-14));
  CHECK(truth.provenance.kind == "analytic");

  Vector x(1);
  x << 0.62;
  CHECK(truth.true_map(x) == 0);
  x << 1.0;
  CHECK(truth.true_map(x) == 1);
  x << 1.5;
  CHECK(truth.true_map(x) == 3);
  x << 0.5;
  CHECK(truth.true_map(x) == 0);
}

TEST_CASE("Example 1 closed form") {
  const auto truth = example1_truth(100, 10);
  CHECK(truth.g_star.values().isZero());
  CHECK(*truth.true_cost == doctest::Approx(1.0 / 240000.0 + 9.0 / 24.0).epsilon(1e-14));
  const auto target = example1_target(100, 10);
  CHECK(target.point(0)[0] == 0.005);
  CHECK(target.point(99)[0] == 0.995);
  CHECK(target.point(5)[3] == 0.5);
  Vector x = Vector::Constant(10, 0.3);
  x[0] = 0.0123;
  CHECK(truth.true_map(x) == 1);
  CHECK(example1_truth(1, 2).true_cost.value() == doctest::Approx(1.0 / 24.0 + 1.0 / 24.0));
}

TEST_CASE("quantile oracle reproduces Example 3") {
  for (Index m : {Index{1}, Index{2}, Index{10}, Index{1000}}) {
    const auto source = SourceSpec::uniform_shifted_interval(0.5);
    const auto quantile = quantile_oracle_1d(source, example3_target(m, 0.5));
    const auto analytic = example3_truth(m, 0.5);
    CHECK((quantile.g_star.values() - analytic.g_star.values()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::abs(*quantile.true_cost - *analytic.true_cost) <= 1e-12);
  }
}

TEST_CASE("quantile oracle with unequal weights") {
  PointSet pts(1, 2);
  pts << 0.0, 1.0;
  Vector w(2);
  w << 0.25, 0.75;
  const DiscreteMeasure target(pts, w);
  const auto truth = quantile_oracle_1d(SourceSpec::uniform_shifted_interval(0.0), target);
  CHECK(truth.g_star[1] - truth.g_star[0] == doctest::Approx(0.25));
  // Cost: int_0^0.25 x^2/2 + int_0.25^1 (x-1)^2/2 = 1/384 + 27/384.
  CHECK(*truth.true_cost == doctest::Approx(28.0 / 384.0));
  Vector x(1);
  x << 0.2;
  CHECK(truth.true_map(x) == 0);
  x << 0.3;
  CHECK(truth.true_map(x) == 1);

  PointSet unsorted(1, 2);
  unsorted << 1.0, 0.0;
  CHECK_THROWS_AS(quantile_oracle_1d(SourceSpec::uniform_shifted_interval(0.0),
                                     DiscreteMeasure(unsorted, Vector::Constant(2, 0.5))),
                  Error);
}

TEST_CASE("oracle optimum has zero quadrature gradient") {
  for (Index m : {Index{2}, Index{10}, Index{100}}) {
    const auto source = SourceSpec::uniform_shifted_interval(0.5);
    const auto target = example3_target(m, 0.5);
    const auto truth = quantile_oracle_1d(source, target);
    const Vector grad = grad_quadrature_1d(truth.g_star, 0.0, source, target, 1'000'000);
    CHECK(grad.cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("Example 2 construction") {
  Example2Options options;
  options.m = 5;
  options.d = 2;
  options.n_weight_mc = 200000;
  options.n_cost_mc = 100000;
  options.seed = 3;
  const auto built = example2_construct(options);
  CHECK(built.target.size() == 5);
  CHECK(std::abs(built.target.weights().sum() - 1.0) <= 1e-12);
  CHECK(std::abs(built.truth.g_star.values().mean()) <= 1e-15);
  CHECK(built.truth.g_star.values().cwiseAbs().maxCoeff() <= 0.1);
  CHECK(built.truth.provenance.kind == "mc_weights");
  CHECK(built.truth.true_cost.has_value());
  CHECK(built.truth.true_cost_se > 0.0);

  const auto again = example2_construct(options);
  CHECK(again.target.weights() == built.target.weights());
  CHECK(again.truth.g_star.values() == built.truth.g_star.values());

  // Fresh sampling reproduces the cell masses within MC noise.
  const auto source = SourceSpec::uniform_box(Vector::Zero(2), Vector::Ones(2));
  RngStream rng(99, 0);
  const PointSet xs = sample_batch(source, rng, 200000);
  Vector counts = Vector::Zero(5);
  for (Index i = 0; i < xs.cols(); ++i) counts[built.truth.true_map(xs.col(i))] += 1.0;
  counts /= 200000.0;
  for (Index j = 0; j < 5; ++j) {
    const double w = built.target.weights()[j];
    CHECK(std::abs(counts[j] - w) <= 5.0 * std::sqrt(2.0 * w / 200000.0));
  }
}

TEST_CASE("Example 2 in 1D sits at the quadrature noise floor") {
  // With n weight samples the MC weights differ from the true cell masses by
  // O(sqrt(w / n)); the quadrature gradient at g* must be of that size.
  Example2Options options;
  options.m = 3;
  options.d = 1;
  options.n_weight_mc = 1'000'000;
  options.n_cost_mc = 0;
  options.g_range = 0.01;
  // Random 1D supports often leave a cell empty; take the first seed that works.
  std::optional<ConstructedExample> found;
  for (std::uint64_t seed = 0; seed < 50 && !found; ++seed) {
    options.seed = seed;
    try {
      found = example2_construct(options);
    } catch (const Error&) {
    }
  }
  REQUIRE(found.has_value());
  const auto& built = *found;
  const auto source = SourceSpec::uniform_shifted_interval(0.0);
  const Vector grad = grad_quadrature_1d(built.truth.g_star, 0.0, source, built.target, 1'000'000);
  CHECK(grad.cwiseAbs().maxCoeff() <= 5.0 * std::sqrt(0.5 / 1e6));
  CHECK(grad.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("zero-mass cells are rejected after the redraw budget") {
  Example2Options options;
  options.m = 40;
  options.d = 1;
  options.n_weight_mc = 40;
  options.max_redraws = 2;
  options.n_cost_mc = 0;
  try {
    example2_construct(options);
    FAIL("expected ZeroMassCell");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroMassCell);
  }
}

TEST_CASE("ground truth JSON round trip") {
  const auto target = example3_target(6, 0.5);
  const auto truth = example3_truth(6, 0.5);
  const auto j = ground_truth_to_json(target, truth);
  const auto back = ground_truth_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.target.points() == target.points());
  CHECK(back.target.weights() == target.weights());
  CHECK(back.truth.g_star.values() == truth.g_star.values());
  CHECK(*back.truth.true_cost == *truth.true_cost);
  CHECK(back.truth.provenance.kind == "analytic");
  for (double x = 0.51; x < 1.5; x += 0.037) {
    Vector p(1);
    p << x;
    CHECK(back.truth.true_map(p) == truth.true_map(p));
  }
}

TEST_CASE("make_example") {
  ExampleParams params;
  params.m = 10;
  params.d = 3;
  const auto e1 = make_example(1, params);
  CHECK(e1.source.dim() == 3);
  CHECK(e1.target.size() == 10);
  CHECK_THROWS_AS(make_example(3, params), Error);
  params.d = 1;
  const auto e3 = make_example(3, params);
  CHECK(e3.source.radius_bound() == 1.5);
  CHECK_THROWS_AS(make_example(4, params), Error);
}
