#include "drag/bench/experiment.hpp"

#include "drag/estimators.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <set>

namespace drag::bench {

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::Drag: return "drag";
    case SolverKind::Sgd: return "sgd";
    case SolverKind::Asgd: return "asgd";
  }
  return "drag";
}

SolverKind solver_kind_from_string(const std::string& name) {
  if (name == "drag") return SolverKind::Drag;
  if (name == "sgd") return SolverKind::Sgd;
  if (name == "asgd") return SolverKind::Asgd;
  throw Error(ErrorCode::InvalidArgument, "unknown solver '" + name + "'");
}

namespace {

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> optional_from(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

nlohmann::json to_json(const ExperimentConfig& c) {
  return {
      {"label", c.label},
      {"example", c.example},
      {"params",
       {{"M", c.params.m},
        {"d", c.params.d},
        {"delta", c.params.delta},
        {"seed", c.params.seed},
        {"n_weight_mc", c.params.n_weight_mc},
        {"g_range", c.params.g_range}}},
      {"solver", to_string(c.solver)},
      {"gamma1", optional_json(c.gamma1)},
      {"scale_gamma1_with_batch", c.scale_gamma1_with_batch},
      {"a", c.a},
      {"b", c.b},
      {"projection", c.projection},
      {"anchor", c.anchor},
      {"batch", c.batch},
      {"omega", optional_json(c.omega)},
      {"fixed_eps", c.fixed_eps},
      {"t_max", c.t_max},
      {"seed", c.seed},
      {"eval",
       {{"map_mc", c.eval.map_mc},
        {"map_p", c.eval.map_p},
        {"cost_mc", c.eval.cost_mc},
        {"eval_seed", c.eval.eval_seed},
        {"per_decade", c.eval.per_decade},
        {"record_wall_time", c.eval.record_wall_time}}},
  };
}

ExperimentConfig config_from_json(const nlohmann::json& input) {
  const nlohmann::json& j = input.contains("config") ? input.at("config") : input;
  ExperimentConfig c;
  c.label = j.value("label", c.label);
  c.example = j.value("example", c.example);
  if (j.contains("params")) {
    const auto& p = j.at("params");
    c.params.m = p.value("M", c.params.m);
    c.params.d = p.value("d", c.params.d);
    c.params.delta = p.value("delta", c.params.delta);
    c.params.seed = p.value("seed", c.params.seed);
    c.params.n_weight_mc = p.value("n_weight_mc", c.params.n_weight_mc);
    c.params.g_range = p.value("g_range", c.params.g_range);
  }
  c.solver = solver_kind_from_string(j.value("solver", std::string("drag")));
  c.gamma1 = optional_from(j, "gamma1");
  c.scale_gamma1_with_batch = j.value("scale_gamma1_with_batch", c.scale_gamma1_with_batch);
  c.a = j.value("a", c.a);
  c.b = j.value("b", c.b);
  c.projection = j.value("projection", c.projection);
  c.anchor = j.value("anchor", c.anchor);
  c.batch = j.value("batch", c.batch);
  c.omega = optional_from(j, "omega");
  c.fixed_eps = j.value("fixed_eps", c.fixed_eps);
  c.t_max = j.value("t_max", c.t_max);
  c.seed = j.value("seed", c.seed);
  if (j.contains("eval")) {
    const auto& e = j.at("eval");
    c.eval.map_mc = e.value("map_mc", c.eval.map_mc);
    c.eval.map_p = e.value("map_p", c.eval.map_p);
    c.eval.cost_mc = e.value("cost_mc", c.eval.cost_mc);
    c.eval.eval_seed = e.value("eval_seed", c.eval.eval_seed);
    c.eval.per_decade = e.value("per_decade", c.eval.per_decade);
    c.eval.record_wall_time = e.value("record_wall_time", c.eval.record_wall_time);
  }
  return c;
}

std::vector<Index> geometric_schedule(Index t_max, int per_decade) {
  require(t_max >= 1, ErrorCode::InvalidArgument, "t_max must be >= 1");
  require(per_decade >= 1, ErrorCode::InvalidArgument, "per_decade must be >= 1");
  std::set<Index> points;
  for (int i = 0;; ++i) {
    const auto t = static_cast<Index>(std::llround(std::pow(10.0, static_cast<double>(i) / per_decade)));
    if (t > t_max) break;
    points.insert(t);
  }
  points.insert(t_max);
  return {points.begin(), points.end()};
}

const Example& ExampleCache::get(int id, const ExampleParams& params) {
  // Only the fields an example actually reads participate in the key.
  std::string key;
  switch (id) {
    case 1: key = fmt::format("1/{}/{}", params.m, params.d); break;
    case 2:
      key = fmt::format("2/{}/{}/{}/{}/{}", params.m, params.d, params.seed, params.n_weight_mc,
                        params.g_range);
      break;
    default: key = fmt::format("{}/{}/{}/{}", id, params.m, params.d, params.delta); break;
  }
  auto it = cache_.find(key);
  if (it == cache_.end()) it = cache_.emplace(key, make_example(id, params)).first;
  return it->second;
}

DragConfig resolve_solver_config(const ExperimentConfig& config, const Example& example) {
  DragConfig drag;
  double gamma1 = config.gamma1.value_or(std::sqrt(example.target.w_min()));
  if (config.batch > 1 && config.scale_gamma1_with_batch) gamma1 = minibatch_gamma1(gamma1, config.batch);
  drag.gamma1 = gamma1;
  drag.a = config.a;
  drag.b = config.b;
  drag.batch = config.batch;
  drag.omega = config.omega;
  drag.t_max = config.t_max;
  drag.seed = config.seed;
  const double radius = std::max(example.source.radius_bound(), example.target.radius_hint());
  if (config.projection == "cu") {
    drag.projection = ProjectionSet::cu(radius, example.target, config.anchor);
  } else if (config.projection == "cinf") {
    drag.projection = ProjectionSet::cinf(radius, example.target.size());
  } else {
    require(config.projection == "none", ErrorCode::InvalidArgument,
            "projection must be cu, cinf or none");
  }
  drag.eval_schedule = geometric_schedule(config.t_max, config.eval.per_decade);
  return drag;
}

RunResult run_experiment(const ExperimentConfig& config, const Example& example) {
  const DragConfig drag = resolve_solver_config(config, example);
  const auto warnings = config.solver == SolverKind::Drag ? drag.validate() : std::vector<std::string>{};
  for (const auto& w : warnings) std::cerr << "warning [" << config.label << "]: " << w << '\n';

  RunResult result;
  RunTrace& trace = result.trace;
  trace.meta = {
      {"format", kTraceFormat},
      {"code_version", kCodeVersion},
      {"config", to_json(config)},
      {"resolved",
       {{"gamma1", drag.gamma1},
        {"projection_radius", drag.projection ? nlohmann::json(drag.projection->radius())
                                              : nlohmann::json(nullptr)},
        {"M", example.target.size()},
        {"d", example.target.dim()},
        {"w_min", example.target.w_min()},
        {"true_cost", optional_json(example.truth.true_cost)},
        {"true_cost_se", example.truth.true_cost_se},
        {"ground_truth", example.truth.provenance.kind},
        {"checkpoints", drag.eval_schedule.size()},
        {"warnings", warnings}}},
  };

  const Averaging averaging = config.solver == SolverKind::Sgd ? Averaging::None : Averaging::Plain;
  const RngStream map_rng(config.eval.eval_seed, 101);
  const RngStream cost_rng(config.eval.eval_seed, 202);
  const auto start = std::chrono::steady_clock::now();
  const GroundTruth& truth = example.truth;

  auto observer = [&](const SolverState& state) {
    TraceRow row;
    row.t = state.k;
    row.eps = config.solver == SolverKind::Drag ? state.eps : config.fixed_eps;
    row.gamma = state.gamma;
    row.err_g_sq = potential_error_centered(state.g, truth.g_star);
    row.err_gbar_sq = potential_error_centered(state.g_bar, truth.g_star);
    if (state.g_bar_w) {
      row.err_gbar_w_sq = potential_error_centered(Potential(state.g_bar_w->value()), truth.g_star);
    }
    const Potential& estimate = solver_estimate(state, averaging);
    if (config.eval.map_mc >= 2) {
      row.map_err = map_error_lp(estimate, truth.true_map, example.source, example.target,
                                 config.eval.map_mc, config.eval.map_p, map_rng)
                        .estimate;
      row.map_p = config.eval.map_p;
    }
    if (config.eval.cost_mc >= 2) {
      const McEstimate cost =
          ot_cost_estimate(estimate, example.source, example.target, config.eval.cost_mc, cost_rng);
      row.cost_est = cost.estimate;
      row.cost_se = cost.std_error;
      if (truth.true_cost) row.cost_err = std::abs(cost.estimate - *truth.true_cost);
    }
    if (config.eval.record_wall_time) {
      row.wall_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    trace.rows.push_back(row);
  };

  switch (config.solver) {
    case SolverKind::Drag:
      result.final_state = run_drag(drag, example.source, example.target, observer);
      break;
    case SolverKind::Sgd:
    case SolverKind::Asgd:
      result.final_state =
          run_fixed_eps(drag, config.fixed_eps, averaging, example.source, example.target, observer);
      break;
  }
  validate_trace(trace);
  return result;
}

RunResult run_experiment(const ExperimentConfig& config, ExampleCache& cache) {
  return run_experiment(config, cache.get(config.example, config.params));
}

RunResult run_and_write(const ExperimentConfig& config, ExampleCache& cache,
                        const std::filesystem::path& out_dir) {
  RunResult result = run_experiment(config, cache);
  write_trace(result.trace, out_dir, config.label);
  return result;
}

namespace {

ExperimentConfig figure_base(int example, const FigureOptions& options, Index default_t) {
  ExperimentConfig c;
  c.example = example;
  c.eval = options.eval;
  c.t_max = options.t_max > 0 ? options.t_max : default_t;
  c.params.n_weight_mc = options.example2_weight_mc;
  switch (example) {
    case 1: c.params.m = 100; c.params.d = 10; break;
    case 2: c.params.m = 30; c.params.d = 10; break;
    default: c.params.m = 1000; c.params.d = 1; c.params.delta = 0.5; break;
  }
  return c;
}

std::string fmt_value(double v) { return fmt::format("{}", v); }

}  // namespace

std::vector<ExperimentConfig> figure_configs(const std::string& figure, const FigureOptions& options) {
  std::vector<ExperimentConfig> arms;
  if (figure == "fig1" || figure == "fig2") {
    for (int ex : {1, 2, 3}) {
      auto c = figure_base(ex, options, 100'000);
      c.label = fmt::format("{}_ex{}_drag", figure, ex);
      arms.push_back(c);
    }
  } else if (figure == "fig5") {
    for (int ex : {1, 3}) {
      auto c = figure_base(ex, options, 100'000);
      c.params.m = 1000;
      c.omega = 2.0;
      c.label = fmt::format("fig5_ex{}_omega2", ex);
      arms.push_back(c);
    }
  } else if (figure == "fig6") {
    for (Index nb : {Index{1}, Index{16}}) {
      auto c = figure_base(2, options, 10'000);
      c.batch = nb;
      c.label = fmt::format("fig6_ex2_nb{}", nb);
      arms.push_back(c);
    }
  } else if (figure == "fig7") {
    for (double a : {0.0, 0.6, 0.75, 0.9}) {
      auto c = figure_base(2, options, 100'000);
      c.a = a;
      c.label = "fig7a_ex2_a" + fmt_value(a);
      arms.push_back(c);
    }
    for (double b : {0.0, 0.6, 0.75, 0.9}) {
      auto c = figure_base(2, options, 100'000);
      c.b = b;
      c.label = "fig7b_ex2_b" + fmt_value(b);
      arms.push_back(c);
    }
  } else if (figure == "fig8") {
    const double eps = std::pow(10.0, -15.0 / 4.0);
    for (SolverKind kind : {SolverKind::Drag, SolverKind::Sgd, SolverKind::Asgd}) {
      auto c = figure_base(2, options, 100'000);
      c.solver = kind;
      c.fixed_eps = eps;
      c.label = "fig8_ex2_" + to_string(kind);
      arms.push_back(c);
    }
  } else {
    throw Error(ErrorCode::InvalidArgument,
                "unknown figure '" + figure + "' (fig4 is produced by the growth experiment)");
  }

  // Arms of one figure share seeds so they consume identical sample streams.
  std::vector<ExperimentConfig> out;
  for (const auto& arm : arms) {
    for (auto seed : options.seeds) {
      auto c = arm;
      c.seed = seed;
      c.label = fmt::format("{}_s{}", arm.label, seed);
      out.push_back(c);
    }
  }
  return out;
}

std::vector<ExperimentConfig> sweep_configs(const ExperimentConfig& base, const SweepGrid& grid) {
  std::vector<ExperimentConfig> out;
  for (double a : grid.a)
    for (double b : grid.b)
      for (const auto& gamma1 : grid.gamma1)
        for (const auto& omega : grid.omega)
          for (Index nb : grid.batch) {
            auto c = base;
            c.a = a;
            c.b = b;
            c.gamma1 = gamma1;
            c.omega = omega;
            c.batch = nb;
            c.label = fmt::format("{}_a{}_b{}_g{}_w{}_nb{}", base.label, a, b,
                                  gamma1 ? fmt_value(*gamma1) : "auto",
                                  omega ? fmt_value(*omega) : "none", nb);
            out.push_back(c);
          }
  return out;
}

std::vector<GrowthRow> m_growth_experiment(int example, const std::vector<Index>& m_list,
                                           const std::vector<std::uint64_t>& seeds,
                                           const ExperimentConfig& base) {
  require(example == 1 || example == 3, ErrorCode::InvalidArgument, "growth experiment uses example 1 or 3");
  require(!m_list.empty(), ErrorCode::InvalidArgument, "M list is empty");
  for (std::size_t i = 1; i < m_list.size(); ++i) {
    require(m_list[i] > m_list[i - 1], ErrorCode::InvalidArgument, "M list must be increasing");
  }
  ExampleCache cache;
  std::vector<GrowthRow> rows;
  for (Index m : m_list) {
    for (auto seed : seeds) {
      ExperimentConfig c = base;
      c.example = example;
      c.params.m = m;
      if (example == 3) c.params.d = 1;
      c.t_max = m * m;
      c.seed = seed;
      c.eval.map_mc = 0;
      c.eval.cost_mc = 0;
      c.eval.per_decade = 1;
      const auto& ex = cache.get(example, c.params);
      const auto result = run_experiment(c, ex);
      const auto& last = result.trace.rows.back();
      rows.push_back({m, last.t, seed, ex.target.w_min(), last.err_g_sq, last.err_gbar_sq});
    }
  }
  return rows;
}

std::string growth_csv(const std::vector<GrowthRow>& rows) {
  std::string out = "M,t,seed,w_min,err_g_sq,err_gbar_sq\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{}\n", r.m, r.t, r.seed, r.w_min, r.err_g_sq, r.err_gbar_sq);
  }
  return out;
}

int ring_index(const Eigen::Ref<const Vector>& x) {
  const auto ring = static_cast<int>(std::floor(10.0 * x.norm()));
  return std::clamp(ring, 0, 9);
}

std::vector<QuantileRow> mk_quantiles_demo(const std::filesystem::path& target_path, Index t,
                                           std::uint64_t seed, Index n_samples) {
  require(t >= 1, ErrorCode::InvalidArgument, "t must be >= 1");
  require(n_samples >= 1, ErrorCode::InvalidArgument, "sample count must be >= 1");
  const DiscreteMeasure target = load_discrete_measure(target_path);
  const SourceSpec source = SourceSpec::uniform_ball(1.0, target.dim());
  DragConfig config = DragConfig::defaults(source, target);
  config.t_max = t;
  config.seed = seed;
  const SolverState state = run_drag(config, source, target);

  RngStream rng(seed, 7);
  const PointSet xs = sample_batch(source, rng, n_samples);
  std::vector<QuantileRow> rows;
  rows.reserve(static_cast<std::size_t>(n_samples));
  for (Index i = 0; i < n_samples; ++i) {
    const auto assignment = map_estimate(state.g_bar, target, xs.col(i));
    rows.push_back({xs.col(i), ring_index(xs.col(i)), assignment.point});
  }
  return rows;
}

std::string quantiles_csv(const std::vector<QuantileRow>& rows) {
  std::string out;
  if (rows.empty()) return out;
  const Index d = rows.front().x.size();
  for (Index r = 0; r < d; ++r) out += fmt::format("x{},", r + 1);
  out += "ring_index";
  for (Index r = 0; r < d; ++r) out += fmt::format(",y{}", r + 1);
  out += '\n';
  for (const auto& row : rows) {
    for (Index r = 0; r < d; ++r) out += fmt::format("{},", row.x[r]);
    out += fmt::format("{}", row.ring);
    for (Index r = 0; r < d; ++r) out += fmt::format(",{}", row.mapped[r]);
    out += '\n';
  }
  return out;
}

}  // namespace drag::bench
