#include "drag/oracles.hpp"

#include "drag/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

namespace drag {

Potential GroundTruth::anchored(Index anchor) const {
  require(anchor >= 0 && anchor < g_star.size(), ErrorCode::InvalidArgument, "anchor out of range");
  return Potential(g_star.values().array() - g_star[anchor]);
}

DiscreteMeasure example1_target(Index m, Index d) {
  require(m >= 1 && d >= 1, ErrorCode::InvalidArgument, "example 1 needs M >= 1 and d >= 1");
  PointSet points = PointSet::Constant(d, m, 0.5);
  for (Index j = 0; j < m; ++j) {
    points(0, j) = (static_cast<double>(j) + 0.5) / static_cast<double>(m);
  }
  return DiscreteMeasure(std::move(points), Vector::Constant(m, 1.0 / static_cast<double>(m)),
                         std::sqrt(static_cast<double>(d)));
}

GroundTruth example1_truth(Index m, Index d) {
  require(m >= 1 && d >= 1, ErrorCode::InvalidArgument, "example 1 needs M >= 1 and d >= 1");
  GroundTruth truth;
  truth.g_star = Potential::zeros(m);
  const double md = static_cast<double>(m);
  truth.true_map = [m, md](const Eigen::Ref<const Vector>& x) {
    const auto cell = static_cast<Index>(std::ceil(md * x[0])) - 1;
    return std::clamp<Index>(cell, 0, m - 1);
  };
  truth.true_cost = 1.0 / (24.0 * md * md) + static_cast<double>(d - 1) / 24.0;
  truth.provenance = {"analytic", 0, 0};
  return truth;
}

DiscreteMeasure example3_target(Index m, double delta) {
  require(m >= 1, ErrorCode::InvalidArgument, "example 3 needs M >= 1");
  require(std::isfinite(delta) && delta >= 0.0, ErrorCode::InvalidArgument, "delta must be >= 0");
  PointSet points(1, m);
  for (Index k = 0; k < m; ++k) points(0, k) = static_cast<double>(k + 1) / static_cast<double>(m);
  return DiscreteMeasure(std::move(points), Vector::Constant(m, 1.0 / static_cast<double>(m)),
                         1.0 + delta);
}

GroundTruth example3_truth(Index m, double delta) {
  require(m >= 1, ErrorCode::InvalidArgument, "example 3 needs M >= 1");
  require(std::isfinite(delta) && delta >= 0.0, ErrorCode::InvalidArgument, "delta must be >= 0");
  const double md = static_cast<double>(m);
  const double step = 1.0 / (2.0 * md * md) - delta / md;
  Vector g(m);
  for (Index k = 0; k < m; ++k) g[k] = static_cast<double>(k) * step;

  GroundTruth truth;
  truth.g_star = Potential(g).centered();
  truth.true_map = [m, md, delta](const Eigen::Ref<const Vector>& x) {
    const auto cell = static_cast<Index>(std::ceil(md * (x[0] - delta))) - 1;
    return std::clamp<Index>(cell, 0, m - 1);
  };
  const double lo = delta - 1.0 / md;
  truth.true_cost = (delta * delta * delta - lo * lo * lo) / 6.0 * md;
  truth.provenance = {"analytic", 0, 0};
  return truth;
}

namespace {

// Laguerre-cell sample counts of g under U([0,1]^d), in chunk order.
std::vector<Index> cell_counts(const Vector& g, const SourceSpec& source,
                               const DiscreteMeasure& target, Index n, const RngStream& rng) {
  const Index m = target.size();
  auto parts = map_chunks<std::vector<Index>>(n, rng, [&](Index, RngStream& chunk_rng, Index count) {
    std::vector<Index> local(static_cast<std::size_t>(m), 0);
    PointSet xs(source.dim(), count);
    sample_into(source, chunk_rng, xs);
    for (Index i = 0; i < count; ++i) ++local[static_cast<std::size_t>(detail::hard_transform(xs.col(i), g, target).index)];
    return local;
  });
  std::vector<Index> total(static_cast<std::size_t>(m), 0);
  for (const auto& part : parts)
    for (std::size_t j = 0; j < total.size(); ++j) total[j] += part[j];
  return total;
}

IndexMap laguerre_map(std::shared_ptr<const DiscreteMeasure> target, Vector g) {
  return [target = std::move(target), g = std::move(g)](const Eigen::Ref<const Vector>& x) {
    return detail::hard_transform(x, g, *target).index;
  };
}

}  // namespace

ConstructedExample example2_construct(const Example2Options& options) {
  const Index m = options.m;
  const Index d = options.d;
  require(m >= 1 && d >= 1, ErrorCode::InvalidArgument, "example 2 needs M >= 1 and d >= 1");
  require(options.n_weight_mc >= m, ErrorCode::InvalidArgument, "n_weight_mc must be >= M");
  require(options.g_range >= 0.0, ErrorCode::InvalidArgument, "g_range must be >= 0");
  const SourceSpec source = SourceSpec::uniform_box(Vector::Zero(d), Vector::Ones(d));
  const double radius = std::sqrt(static_cast<double>(d));

  RngStream point_rng(options.seed, 1);
  PointSet points(d, m);
  for (Index j = 0; j < m; ++j)
    for (Index r = 0; r < d; ++r) points(r, j) = point_rng.uniform();
  // Placeholder weights: only the geometry is used for cell counting.
  const DiscreteMeasure geometry(points, Vector::Constant(m, 1.0 / static_cast<double>(m)), radius);

  RngStream potential_rng(options.seed, 2);
  const RngStream weight_rng(options.seed, 3);
  for (int attempt = 0; attempt <= options.max_redraws; ++attempt) {
    Vector g(m);
    for (Index j = 0; j < m; ++j) g[j] = options.g_range * (2.0 * potential_rng.uniform() - 1.0);
    g.array() -= g.mean();

    const auto counts = cell_counts(g, source, geometry, options.n_weight_mc,
                                    weight_rng.split(static_cast<std::uint64_t>(attempt)));
    if (std::any_of(counts.begin(), counts.end(), [](Index c) { return c == 0; })) continue;

    Vector w(m);
    for (Index j = 0; j < m; ++j) {
      w[j] = static_cast<double>(counts[static_cast<std::size_t>(j)]) /
             static_cast<double>(options.n_weight_mc);
    }
    auto target = std::make_shared<const DiscreteMeasure>(DiscreteMeasure::normalized(points, w, radius));

    GroundTruth truth;
    truth.g_star = Potential(g);
    truth.true_map = laguerre_map(target, g);
    truth.provenance = {"mc_weights", options.n_weight_mc, options.seed};
    if (options.n_cost_mc >= 2) {
      const McEstimate cost =
          ot_cost_estimate(truth.g_star, source, *target, options.n_cost_mc, RngStream(options.seed, 4));
      truth.true_cost = cost.estimate;
      truth.true_cost_se = cost.std_error;
    }
    return {*target, std::move(truth)};
  }
  throw Error(ErrorCode::ZeroMassCell, "example 2: a Laguerre cell stayed empty after " +
                                           std::to_string(options.max_redraws) + " redraws");
}

GroundTruth quantile_oracle_1d(const SourceSpec& source, const DiscreteMeasure& target) {
  const auto* interval = std::get_if<UniformShiftedInterval>(&source.kind());
  require(interval != nullptr && target.dim() == 1, ErrorCode::InvalidArgument,
          "quantile oracle needs a 1D shifted-interval source and a 1D target");
  const Index m = target.size();
  const auto y = target.points().row(0);
  for (Index j = 1; j < m; ++j) {
    require(y[j] > y[j - 1], ErrorCode::InvalidArgument, "target points must be strictly increasing");
  }
  const Vector& w = target.weights();

  // Cell boundaries b_0 = delta, b_j = b_{j-1} + w_j on a unit-length support.
  Vector bounds(m + 1);
  bounds[0] = interval->delta;
  for (Index j = 1; j <= m; ++j) bounds[j] = bounds[j - 1] + w[j - 1];
  bounds[m] = interval->delta + 1.0;

  // Indifference at each interior boundary fixes consecutive differences.
  Vector g(m);
  g[0] = 0.0;
  double cost = 0.0;
  for (Index j = 0; j < m; ++j) {
    if (j > 0) {
      const double b = bounds[j];
      g[j] = g[j - 1] + 0.5 * ((b - y[j]) * (b - y[j]) - (b - y[j - 1]) * (b - y[j - 1]));
    }
    const double hi = bounds[j + 1] - y[j];
    const double lo = bounds[j] - y[j];
    cost += (hi * hi * hi - lo * lo * lo) / 6.0;
  }

  GroundTruth truth;
  truth.g_star = Potential(g).centered();
  std::vector<double> interior(bounds.data() + 1, bounds.data() + m);
  truth.true_map = [interior = std::move(interior)](const Eigen::Ref<const Vector>& x) {
    return static_cast<Index>(std::lower_bound(interior.begin(), interior.end(), x[0]) - interior.begin());
  };
  truth.true_cost = cost;
  truth.provenance = {"constructed", 0, 0};
  return truth;
}

Example make_example(int id, const ExampleParams& params) {
  switch (id) {
    case 1: {
      require(params.d >= 1 && params.m >= 1, ErrorCode::InvalidArgument, "example 1 needs d, M >= 1");
      const Index d = params.d;
      return {1, SourceSpec::uniform_box(Vector::Zero(d), Vector::Ones(d)),
              example1_target(params.m, d), example1_truth(params.m, d)};
    }
    case 2: {
      Example2Options options;
      options.m = params.m;
      options.d = params.d;
      options.seed = params.seed;
      options.n_weight_mc = params.n_weight_mc;
      options.g_range = params.g_range;
      auto built = example2_construct(options);
      return {2, SourceSpec::uniform_box(Vector::Zero(params.d), Vector::Ones(params.d)),
              std::move(built.target), std::move(built.truth)};
    }
    case 3: {
      require(params.d == 1, ErrorCode::InvalidArgument, "example 3 is one-dimensional (d must be 1)");
      return {3, SourceSpec::uniform_shifted_interval(params.delta),
              example3_target(params.m, params.delta), example3_truth(params.m, params.delta)};
    }
    default:
      throw Error(ErrorCode::InvalidArgument, "unknown example id " + std::to_string(id));
  }
}

nlohmann::json ground_truth_to_json(const DiscreteMeasure& target, const GroundTruth& truth) {
  nlohmann::json j;
  j["dim"] = target.dim();
  j["radius"] = target.radius_hint();
  auto& points = j["points"] = nlohmann::json::array();
  for (Index c = 0; c < target.size(); ++c) {
    points.push_back(std::vector<double>(target.point(c).begin(), target.point(c).end()));
  }
  j["weights"] = std::vector<double>(target.weights().begin(), target.weights().end());
  j["g_star"] = std::vector<double>(truth.g_star.values().begin(), truth.g_star.values().end());
  j["true_cost"] = truth.true_cost ? nlohmann::json(*truth.true_cost) : nlohmann::json(nullptr);
  j["true_cost_se"] = truth.true_cost_se;
  j["provenance"] = {{"kind", truth.provenance.kind},
                     {"n", truth.provenance.n},
                     {"seed", truth.provenance.seed}};
  return j;
}

ConstructedExample ground_truth_from_json(const nlohmann::json& j) {
  const auto d = j.at("dim").get<Index>();
  const auto rows = j.at("points").get<std::vector<std::vector<double>>>();
  const auto m = static_cast<Index>(rows.size());
  PointSet points(d, m);
  for (Index c = 0; c < m; ++c) {
    require(static_cast<Index>(rows[static_cast<std::size_t>(c)].size()) == d,
            ErrorCode::DimensionMismatch, "ground truth point dimension");
    for (Index r = 0; r < d; ++r) points(r, c) = rows[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)];
  }
  const auto w = j.at("weights").get<std::vector<double>>();
  const auto g = j.at("g_star").get<std::vector<double>>();
  require(static_cast<Index>(w.size()) == m && static_cast<Index>(g.size()) == m,
          ErrorCode::DimensionMismatch, "ground truth vector lengths");
  auto target = std::make_shared<const DiscreteMeasure>(DiscreteMeasure::normalized(
      points, Eigen::Map<const Vector>(w.data(), m), j.at("radius").get<double>()));
  Vector gv = Eigen::Map<const Vector>(g.data(), m);

  GroundTruth truth;
  truth.g_star = Potential(gv);
  truth.true_map = laguerre_map(target, gv);
  if (!j.at("true_cost").is_null()) truth.true_cost = j.at("true_cost").get<double>();
  truth.true_cost_se = j.value("true_cost_se", 0.0);
  const auto& prov = j.at("provenance");
  truth.provenance = {prov.at("kind").get<std::string>(), prov.at("n").get<Index>(),
                      prov.at("seed").get<std::uint64_t>()};
  return {*target, std::move(truth)};
}

}  // namespace drag
