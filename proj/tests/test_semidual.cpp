#include "drag/oracles.hpp"
#include "drag/semidual.hpp"

#include <doctest.h>

#include <cmath>

using namespace drag;

namespace {

DiscreteMeasure random_target(RngStream& rng, Index m, Index d) {
  PointSet pts(d, m);
  for (Index j = 0; j < m; ++j)
    for (Index r = 0; r < d; ++r) pts(r, j) = rng.uniform();
  Vector w(m);
  for (Index j = 0; j < m; ++j) w[j] = 0.2 + rng.uniform();
  return DiscreteMeasure::normalized(pts, w);
}

Vector random_vector(RngStream& rng, Index n, double lo, double hi) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = lo + (hi - lo) * rng.uniform();
  return v;
}

DiscreteMeasure two_points_1d(double y0, double y1) {
  PointSet pts(1, 2);
  pts << y0, y1;
  return DiscreteMeasure(pts, Vector::Constant(2, 0.5));
}

}  // namespace

TEST_CASE("hard c-transform picks the smallest index on ties") {
  const auto target = two_points_1d(0.0, 1.0);
  const auto g = Potential::zeros(2);
  Vector x(1);
  x << 0.25;
  auto ct = c_transform(g, target, x);
  CHECK(ct.index == 0);
  CHECK(ct.value == doctest::Approx(0.03125));
  x << 0.5;
  CHECK(c_transform(g, target, x).index == 0);
  x << 0.75;
  CHECK(c_transform(g, target, x).index == 1);
}

TEST_CASE("single point reductions") {
  PointSet pts(2, 1);
  pts << 0.3, 0.7;
  const DiscreteMeasure target(pts, Vector::Ones(1));
  Vector x(2);
  x << 0.1, 0.2;
  const double half_sq = 0.5 * (x - pts.col(0)).squaredNorm();
  for (double g1 : {-2.0, 0.0, 3.5}) {
    const Potential g(Vector::Constant(1, g1));
    CHECK(h_value(x, g, 0.0, target) == doctest::Approx(-half_sq));
    CHECK(h_value(x, g, 0.1, target) == doctest::Approx(-half_sq));
    CHECK(chi(x, g, 1e-3, target).probs[0] == 1.0);
    CHECK(stochastic_grad(x, g, 0.5, target)[0] == 0.0);
  }
}

TEST_CASE("symmetric two point gradient vanishes") {
  const auto target = two_points_1d(0.0, 1.0);
  Vector x(1);
  x << 0.5;
  const Vector grad = stochastic_grad(x, Potential::zeros(2), 0.3, target);
  CHECK(std::abs(grad[0]) < 1e-15);
  CHECK(std::abs(grad[1]) < 1e-15);
}

TEST_CASE("chi normalization holds without overflow") {
  RngStream rng(21, 0);
  const auto target = random_target(rng, 8, 3);
  for (double eps : {1e-8, 1e-4, 1e-1, 1.0, 1e3}) {
    for (int trial = 0; trial < 50; ++trial) {
      const Potential g(random_vector(rng, 8, -10.0, 10.0));
      const Vector x = random_vector(rng, 3, -1.0, 2.0);
      const Vector p = chi(x, g, eps, target).probs;
      CHECK(p.allFinite());
      CHECK(std::abs(p.sum() - 1.0) <= 1e-12);
      const Vector grad = stochastic_grad(x, g, eps, target);
      CHECK(std::abs(grad.sum()) <= 1e-12);
      CHECK(grad.norm() <= 2.0);
      for (Index j = 0; j < 8; ++j) {
        CHECK(grad[j] >= -target.weights()[j] - 1e-15);
        CHECK(grad[j] <= 1.0 - target.weights()[j] + 1e-15);
      }
    }
  }
}

TEST_CASE("stochastic gradient matches central finite differences") {
  RngStream rng(5, 0);
  const auto target = random_target(rng, 5, 2);
  double worst = 0.0;
  for (double eps : {1.0, 0.1, 0.01}) {
    for (int trial = 0; trial < 100; ++trial) {
      const Vector gv = random_vector(rng, 5, -0.5, 0.5);
      const Vector x = random_vector(rng, 2, 0.0, 1.0);
      const Vector an = stochastic_grad(x, Potential(gv), eps, target);
      for (Index j = 0; j < 5; ++j) {
        const double h = 1e-5 * std::max(1.0, std::abs(gv[j]));
        Vector up = gv, dn = gv;
        up[j] += h;
        dn[j] -= h;
        const double fd = (h_value(x, Potential(up), eps, target) -
                            h_value(x, Potential(dn), eps, target)) /
                          (2.0 * h);
        const double rel = std::abs(fd - an[j]) / std::max(std::abs(an[j]), target.w_min());
        worst = std::max(worst, rel);
      }
    }
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("soft transform approaches the hard one") {
  RngStream rng(8, 0);
  const auto target = random_target(rng, 6, 2);
  for (int trial = 0; trial < 20; ++trial) {
    const Potential g(random_vector(rng, 6, -0.2, 0.2));
    const Vector x = random_vector(rng, 2, 0.0, 1.0);
    const double hard = c_transform(g, target, x).value;
    double prev = INFINITY;
    for (double eps : {1.0, 0.1, 0.01, 0.001}) {
      const double gap = std::abs(entropic_c_transform(g, target, x, eps) - hard);
      CHECK(gap < prev);
      prev = gap;
    }
    CHECK(std::abs(entropic_c_transform(g, target, x, 1e-9) - hard) < 1e-6);
    CHECK(ceps_transform(g, target, x, 0.0) == hard);
  }
}

TEST_CASE("constant shifts leave values unchanged") {
  RngStream rng(12, 0);
  const auto target = random_target(rng, 4, 2);
  const Vector gv = random_vector(rng, 4, -1.0, 1.0);
  const Potential g(gv);
  const Potential shifted(Vector(gv.array() + 3.25));
  const auto box = SourceSpec::uniform_box(Vector::Zero(2), Vector::Ones(2));
  for (int trial = 0; trial < 20; ++trial) {
    const Vector x = random_vector(rng, 2, 0.0, 1.0);
    for (double eps : {0.0, 0.05, 1.0}) {
      CHECK(std::abs(h_value(x, g, eps, target) - h_value(x, shifted, eps, target)) <= 1e-12);
      CHECK(std::abs(ceps_transform(g, target, x, eps) - 3.25 -
                     ceps_transform(shifted, target, x, eps)) <= 1e-12);
    }
  }
  const RngStream mc(3, 0);
  const auto a = semidual_value_mc(g, 0.0, box, target, 20000, mc);
  const auto b = semidual_value_mc(shifted, 0.0, box, target, 20000, mc);
  CHECK(std::abs(a.estimate - b.estimate) <= 1e-12);
}

TEST_CASE("c-transform is non-expansive") {
  RngStream rng(13, 0);
  const auto target = random_target(rng, 7, 3);
  int violations = 0;
  for (int pair = 0; pair < 1000; ++pair) {
    const Potential g(random_vector(rng, 7, -1.0, 1.0));
    const Potential h(random_vector(rng, 7, -1.0, 1.0));
    const double sup = (g.values() - h.values()).cwiseAbs().maxCoeff();
    for (int s = 0; s < 100; ++s) {
      const Vector x = random_vector(rng, 3, 0.0, 1.0);
      const double gap = std::abs(c_transform(g, target, x).value - c_transform(h, target, x).value);
      if (gap > sup + 1e-12) ++violations;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("semi-dual value at the Example 3 optimum") {
  const auto target = example3_target(4, 0.5);
  const auto truth = example3_truth(4, 0.5);
  const auto source = SourceSpec::uniform_shifted_interval(0.5);
  const auto est = semidual_value_mc(truth.g_star, 0.0, source, target, 1'000'000, RngStream(4, 0));
  CHECK(std::abs(-est.estimate - 7.0 / 96.0) <= 4.0 * est.std_error);

  // M = 1: -E[1/2 (X - y)^2] with X ~ U[0.5, 1.5], y = 1 is -1/24.
  const auto one = example3_target(1, 0.5);
  const auto single = semidual_value_mc(Potential::zeros(1), 0.0, source, one, 400000, RngStream(4, 1));
  CHECK(std::abs(single.estimate + 1.0 / 24.0) <= 4.0 * single.std_error);
}

TEST_CASE("stochastic gradient is unbiased at the optimum") {
  const auto target = example3_target(4, 0.5);
  const auto truth = example3_truth(4, 0.5);
  const auto source = SourceSpec::uniform_shifted_interval(0.5);
  RngStream rng(31, 0);
  const PointSet xs = sample_batch(source, rng, 100000);
  Vector sum = Vector::Zero(4), sum_sq = Vector::Zero(4);
  for (Index i = 0; i < xs.cols(); ++i) {
    const Vector gr = stochastic_grad(xs.col(i), truth.g_star, 1e-3, target);
    sum += gr;
    sum_sq += gr.cwiseProduct(gr);
  }
  const double n = static_cast<double>(xs.cols());
  for (Index j = 0; j < 4; ++j) {
    const double mean = sum[j] / n;
    const double se = std::sqrt((sum_sq[j] / n - mean * mean) / n);
    CHECK(std::abs(mean) <= 3.0 * se);
  }
}

TEST_CASE("quadrature gradient") {
  const auto source = SourceSpec::uniform_shifted_interval(0.5);
  SUBCASE("vanishes at the oracle optimum") {
    const auto target = example3_target(4, 0.5);
    const auto truth = example3_truth(4, 0.5);
    const Vector grad = grad_quadrature_1d(truth.g_star, 0.0, source, target, 1'000'000);
    CHECK(grad.cwiseAbs().maxCoeff() <= 1e-8);
  }
  SUBCASE("single point is exactly zero") {
    const auto target = example3_target(1, 0.5);
    CHECK(grad_quadrature_1d(Potential(Vector::Constant(1, 0.7)), 0.0, source, target, 1000)[0] == 0.0);
    CHECK(grad_quadrature_1d(Potential::zeros(1), 0.2, source, target, 1000)[0] == 0.0);
  }
  SUBCASE("agrees with Monte Carlo at eps = 0.1") {
    const auto target = example3_target(4, 0.5);
    const Potential g(Vector::LinSpaced(4, 0.0, -0.3));
    const Vector quad = grad_quadrature_1d(g, 0.1, source, target, 100000);
    CHECK(std::abs(quad.sum()) <= 1e-9);
    RngStream rng(41, 0);
    const PointSet xs = sample_batch(source, rng, 1'000'000);
    Vector sum = Vector::Zero(4), sum_sq = Vector::Zero(4);
    for (Index i = 0; i < xs.cols(); ++i) {
      const Vector gr = stochastic_grad(xs.col(i), g, 0.1, target);
      sum += gr;
      sum_sq += gr.cwiseProduct(gr);
    }
    const double n = static_cast<double>(xs.cols());
    for (Index j = 0; j < 4; ++j) {
      const double mean = sum[j] / n;
      const double se = std::sqrt((sum_sq[j] / n - mean * mean) / n);
      CHECK(std::abs(mean - quad[j]) <= 4.0 * se);
    }
  }
  SUBCASE("rejects other sources") {
    const auto target = example3_target(4, 0.5);
    const auto box = SourceSpec::uniform_box(Vector::Zero(1), Vector::Ones(1));
    CHECK_THROWS_AS(grad_quadrature_1d(Potential::zeros(4), 0.0, box, target, 1000), Error);
  }
}

TEST_CASE("invalid regularization is rejected") {
  const auto target = two_points_1d(0.0, 1.0);
  Vector x(1);
  x << 0.3;
  CHECK_THROWS_AS(entropic_c_transform(Potential::zeros(2), target, x, 0.0), Error);
  CHECK_THROWS_AS(ceps_transform(Potential::zeros(2), target, x, -1.0), Error);
}
