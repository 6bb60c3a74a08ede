#pragma once

#include "drag/estimators.hpp"
#include "drag/measures.hpp"
#include "drag/semidual.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace drag {

struct Provenance {
  std::string kind;  // "analytic" | "constructed" | "mc_weights"
  Index n = 0;
  std::uint64_t seed = 0;
};

/// Known optimum of a semi-discrete problem.
struct GroundTruth {
  Potential g_star;  // mean-centered
  IndexMap true_map;
  std::optional<double> true_cost;
  double true_cost_se = 0.0;  // nonzero when true_cost is itself a Monte Carlo value
  Provenance provenance;

  /// g_star shifted so that coordinate `anchor` is zero.
  Potential anchored(Index anchor = 0) const;
};

/// U([0,1]^d) onto y_j = ((j - 1/2)/M, 1/2, ..., 1/2) with uniform weights.
GroundTruth example1_truth(Index m, Index d);
DiscreteMeasure example1_target(Index m, Index d);

/// U([delta, 1 + delta]) onto {k/M} with uniform weights.
GroundTruth example3_truth(Index m, double delta);
DiscreteMeasure example3_target(Index m, double delta);

struct Example2Options {
  Index m = 30;
  Index d = 10;
  std::uint64_t seed = 0;
  Index n_weight_mc = 10'000'000;
  double g_range = 0.05;  // g* drawn uniform in [-g_range, g_range]^M
  int max_redraws = 10;
  Index n_cost_mc = 1'000'000;
};

struct ConstructedExample {
  DiscreteMeasure target;
  GroundTruth truth;
};

/// Random support in [0,1]^d and random g*; weights are the Monte Carlo
/// masses of the Laguerre cells of g* under U([0,1]^d).
ConstructedExample example2_construct(const Example2Options& options);

/// Monotone rearrangement of U([delta, 1 + delta]) onto a sorted 1D target.
GroundTruth quantile_oracle_1d(const SourceSpec& source, const DiscreteMeasure& target);

struct ExampleParams {
  Index m = 100;
  Index d = 10;
  double delta = 0.5;
  std::uint64_t seed = 0;
  Index n_weight_mc = 10'000'000;
  double g_range = 0.05;
};

struct Example {
  int id = 0;
  SourceSpec source;
  DiscreteMeasure target;
  GroundTruth truth;
};

Example make_example(int id, const ExampleParams& params);

nlohmann::json ground_truth_to_json(const DiscreteMeasure& target, const GroundTruth& truth);

/// Rebuilds target and truth; the map becomes the Laguerre assignment of g*.
ConstructedExample ground_truth_from_json(const nlohmann::json& j);

}  // namespace drag
