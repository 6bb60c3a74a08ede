#pragma once

#include "drag/bench/trace.hpp"
#include "drag/oracles.hpp"
#include "drag/solver.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace drag::bench {

inline constexpr const char* kCodeVersion = "dragot 1.0.0";
inline constexpr const char* kTraceFormat = "drag-trace/1";

enum class SolverKind { Drag, Sgd, Asgd };

std::string to_string(SolverKind kind);
SolverKind solver_kind_from_string(const std::string& name);

/// Checkpoint metric budgets. A zero sample count disables that metric.
struct EvalConfig {
  Index map_mc = 100'000;
  double map_p = 2.0;
  Index cost_mc = 100'000;
  std::uint64_t eval_seed = 20240601;
  int per_decade = 20;
  bool record_wall_time = false;
};

struct ExperimentConfig {
  std::string label = "run";
  int example = 3;
  ExampleParams params{.m = 100, .d = 1};
  SolverKind solver = SolverKind::Drag;
  std::optional<double> gamma1;  // default sqrt(w_min)
  bool scale_gamma1_with_batch = true;
  double a = 0.75;
  double b = 0.75;
  std::string projection = "cu";  // cu | cinf | none
  Index anchor = 0;
  Index batch = 1;
  std::optional<double> omega;
  double fixed_eps = 1.0;  // sgd / asgd only
  Index t_max = 10'000;
  std::uint64_t seed = 0;
  EvalConfig eval;
};

nlohmann::json to_json(const ExperimentConfig& config);
/// Accepts a bare config object or a trace meta object holding one under "config".
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Round(10^{i / per_decade}) for i = 0.. up to t_max, deduplicated, with
/// t_max always included.
std::vector<Index> geometric_schedule(Index t_max, int per_decade);

/// Builds examples once per distinct parameter set (Example 2 is expensive).
class ExampleCache {
public:
  const Example& get(int id, const ExampleParams& params);

private:
  std::map<std::string, Example> cache_;
};

struct RunResult {
  RunTrace trace;
  SolverState final_state;
};

/// Solver configuration as executed: gamma1 default and mini-batch scaling,
/// projection radius, eval schedule.
DragConfig resolve_solver_config(const ExperimentConfig& config, const Example& example);

RunResult run_experiment(const ExperimentConfig& config, const Example& example);
RunResult run_experiment(const ExperimentConfig& config, ExampleCache& cache);

/// Runs and writes `<out_dir>/<label>.csv|json`.
RunResult run_and_write(const ExperimentConfig& config, ExampleCache& cache,
                        const std::filesystem::path& out_dir);

/// Named figure reproductions at configurable scale.
struct FigureOptions {
  Index t_max = 0;  // 0: figure default
  std::vector<std::uint64_t> seeds = {0};
  EvalConfig eval;
  Index example2_weight_mc = 10'000'000;
};

std::vector<ExperimentConfig> figure_configs(const std::string& figure, const FigureOptions& options);

struct SweepGrid {
  std::vector<double> a = {0.75};
  std::vector<double> b = {0.75};
  std::vector<std::optional<double>> gamma1 = {std::nullopt};
  std::vector<std::optional<double>> omega = {std::nullopt};
  std::vector<Index> batch = {1};
};

std::vector<ExperimentConfig> sweep_configs(const ExperimentConfig& base, const SweepGrid& grid);

struct GrowthRow {
  Index m = 0;
  Index t = 0;
  std::uint64_t seed = 0;
  double w_min = 0.0;
  double err_g_sq = 0.0;
  double err_gbar_sq = 0.0;
};

/// For each M, runs DRAG for t = M^2 iterations and records final errors.
std::vector<GrowthRow> m_growth_experiment(int example, const std::vector<Index>& m_list,
                                           const std::vector<std::uint64_t>& seeds,
                                           const ExperimentConfig& base);
std::string growth_csv(const std::vector<GrowthRow>& rows);

struct QuantileRow {
  Vector x;
  int ring = 0;
  Vector mapped;
};

/// Ring index floor(10 |x|) clamped to [0, 9].
int ring_index(const Eigen::Ref<const Vector>& x);

/// Solves DRAG from U(B(0,1)) to the file's measure for t steps, then maps
/// n_samples fresh source points.
std::vector<QuantileRow> mk_quantiles_demo(const std::filesystem::path& target_path, Index t,
                                           std::uint64_t seed, Index n_samples);
std::string quantiles_csv(const std::vector<QuantileRow>& rows);

}  // namespace drag::bench
