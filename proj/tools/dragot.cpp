// dragot: semi-discrete optimal transport solver and benchmark harness.

#include "drag/bench/experiment.hpp"
#include "drag/bench/slope.hpp"
#include "drag/bench/trace.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <iostream>

namespace {

using drag::Index;
using namespace drag::bench;

/// Flags that mirror ExperimentConfig; only those given on the command line
/// override the --config file (or the defaults).
struct ConfigFlags {
  std::string config_path;
  std::string label;
  int example = 3;
  Index m = 100;
  Index d = 1;
  double delta = 0.5;
  std::uint64_t example_seed = 0;
  Index n_weight_mc = 10'000'000;
  double g_range = 0.05;
  std::string solver = "drag";
  double gamma1 = 0.0;
  bool no_batch_scaling = false;
  double a = 0.75;
  double b = 0.75;
  std::string projection = "cu";
  Index anchor = 0;
  Index batch = 1;
  double omega = 0.0;
  double eps = 1.0;
  Index t_max = 10'000;
  std::uint64_t seed = 0;
  Index map_mc = 100'000;
  double map_p = 2.0;
  Index cost_mc = 100'000;
  std::uint64_t eval_seed = 20240601;
  int per_decade = 20;
  bool record_time = false;

  std::vector<std::pair<std::string, CLI::Option*>> options;

  void attach(CLI::App& app) {
    auto add = [&](const std::string& name, auto& var, const std::string& help) {
      options.emplace_back(name, app.add_option(name, var, help));
    };
    app.add_option("--config", config_path, "JSON config file or trace meta")->check(CLI::ExistingFile);
    add("--label", label, "Output file stem");
    add("--example", example, "Example id (1, 2 or 3)");
    add("--M", m, "Number of target points");
    add("--d", d, "Dimension");
    add("--delta", delta, "Example 3 source shift");
    add("--example-seed", example_seed, "Example 2 construction seed");
    add("--n-weight-mc", n_weight_mc, "Example 2 weight Monte Carlo samples");
    add("--g-range", g_range, "Example 2 potential range");
    add("--solver", solver, "drag | sgd | asgd");
    add("--gamma1", gamma1, "Initial step (default sqrt(w_min))");
    options.emplace_back("--no-batch-scaling",
                         app.add_flag("--no-batch-scaling", no_batch_scaling,
                                      "Do not multiply gamma1 by sqrt(batch)"));
    add("--a", a, "Regularization exponent");
    add("--b", b, "Step exponent");
    add("--projection", projection, "cu | cinf | none");
    add("--anchor", anchor, "Cu anchor index (0-based)");
    add("--batch", batch, "Mini-batch size");
    add("--omega", omega, "Log-weighted averaging exponent");
    add("--eps", eps, "Fixed regularization for sgd/asgd");
    add("--t-max", t_max, "Iterations");
    add("--seed", seed, "Sampling seed");
    add("--map-mc", map_mc, "Map-error samples per checkpoint (0 disables)");
    add("--map-p", map_p, "Map-error exponent p");
    add("--cost-mc", cost_mc, "Cost samples per checkpoint (0 disables)");
    add("--eval-seed", eval_seed, "Evaluation stream seed");
    add("--per-decade", per_decade, "Checkpoints per decade");
    options.emplace_back("--record-time",
                         app.add_flag("--record-time", record_time, "Fill the wall_ms column"));
  }

  bool given(const std::string& name) const {
    for (const auto& [n, opt] : options)
      if (n == name) return opt->count() > 0;
    return false;
  }

  ExperimentConfig resolve() const {
    ExperimentConfig c;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      c = config_from_json(nlohmann::json::parse(in));
    }
    if (given("--label")) c.label = label;
    if (given("--example")) c.example = example;
    if (given("--M")) c.params.m = m;
    if (given("--d")) c.params.d = d;
    else if (config_path.empty() && c.example != 3) c.params.d = 10;
    if (given("--delta")) c.params.delta = delta;
    if (given("--example-seed")) c.params.seed = example_seed;
    if (given("--n-weight-mc")) c.params.n_weight_mc = n_weight_mc;
    if (given("--g-range")) c.params.g_range = g_range;
    if (given("--solver")) c.solver = solver_kind_from_string(solver);
    if (given("--gamma1")) c.gamma1 = gamma1;
    if (given("--no-batch-scaling")) c.scale_gamma1_with_batch = false;
    if (given("--a")) c.a = a;
    if (given("--b")) c.b = b;
    if (given("--projection")) c.projection = projection;
    if (given("--anchor")) c.anchor = anchor;
    if (given("--batch")) c.batch = batch;
    if (given("--omega")) c.omega = omega;
    if (given("--eps")) c.fixed_eps = eps;
    if (given("--t-max")) c.t_max = t_max;
    if (given("--seed")) c.seed = seed;
    if (given("--map-mc")) c.eval.map_mc = map_mc;
    if (given("--map-p")) c.eval.map_p = map_p;
    if (given("--cost-mc")) c.eval.cost_mc = cost_mc;
    if (given("--eval-seed")) c.eval.eval_seed = eval_seed;
    if (given("--per-decade")) c.eval.per_decade = per_decade;
    if (given("--record-time")) c.eval.record_wall_time = record_time;
    return c;
  }
};

void print_final(const RunResult& result, const std::string& label) {
  const auto& last = result.trace.rows.back();
  std::cout << fmt::format("{}: t={} err_g_sq={} err_gbar_sq={}", label, last.t, last.err_g_sq,
                           last.err_gbar_sq);
  if (last.err_gbar_w_sq) std::cout << fmt::format(" err_gbar_w_sq={}", *last.err_gbar_w_sq);
  if (last.map_err) std::cout << fmt::format(" map_err={}", *last.map_err);
  if (last.cost_err) std::cout << fmt::format(" cost_err={}", *last.cost_err);
  std::cout << '\n';
}

template <class T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) {
      if constexpr (std::is_same_v<T, std::string>) out.push_back(item);
      else if constexpr (std::is_floating_point_v<T>) out.push_back(std::stod(item));
      else out.push_back(static_cast<T>(std::stoll(item)));
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-discrete optimal transport with decreasing-regularization averaged SGD"};
  app.require_subcommand(1);

  std::string out_dir = "traces";

  // solve
  auto* solve = app.add_subcommand("solve", "One solver run to a trace CSV + JSON");
  ConfigFlags solve_flags;
  solve_flags.attach(*solve);
  solve->add_option("--out", out_dir, "Output directory");

  // bench
  auto* bench = app.add_subcommand("bench", "Reproduce a named figure: fig1|fig2|fig4|fig5|fig6|fig7|fig8");
  std::string figure;
  std::string seeds_text = "0";
  Index bench_t = 0;
  Index bench_map_mc = 100'000;
  Index bench_cost_mc = 100'000;
  int bench_per_decade = 20;
  Index bench_weight_mc = 10'000'000;
  int growth_example = 3;
  std::string growth_ms = "10,20,40,80";
  bench->add_option("figure", figure, "Figure name")->required();
  bench->add_option("--out", out_dir, "Output directory");
  bench->add_option("--seeds", seeds_text, "Comma-separated seeds");
  bench->add_option("--t-max", bench_t, "Iterations (0: figure default)");
  bench->add_option("--map-mc", bench_map_mc, "Map-error samples per checkpoint");
  bench->add_option("--cost-mc", bench_cost_mc, "Cost samples per checkpoint");
  bench->add_option("--per-decade", bench_per_decade, "Checkpoints per decade");
  bench->add_option("--n-weight-mc", bench_weight_mc, "Example 2 weight Monte Carlo samples");
  bench->add_option("--example", growth_example, "fig4: example 1 or 3");
  bench->add_option("--M-list", growth_ms, "fig4: increasing M values");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Grid over a, b, gamma1, omega, n_b");
  ConfigFlags sweep_flags;
  sweep_flags.attach(*sweep);
  std::string a_list, b_list, gamma1_list, omega_list, batch_list;
  sweep->add_option("--out", out_dir, "Output directory");
  sweep->add_option("--a-list", a_list, "Values of a");
  sweep->add_option("--b-list", b_list, "Values of b");
  sweep->add_option("--gamma1-list", gamma1_list, "Values of gamma1");
  sweep->add_option("--omega-list", omega_list, "Values of omega");
  sweep->add_option("--batch-list", batch_list, "Values of n_b");

  // quantiles
  auto* quantiles = app.add_subcommand("quantiles", "Monge-Kantorovich quantile regions demo");
  std::string target_path;
  std::string quantiles_out = "quantiles.csv";
  Index quantiles_t = 100'000;
  std::uint64_t quantiles_seed = 0;
  Index quantiles_samples = 10'000;
  quantiles->add_option("--target", target_path, "Point-cloud CSV")->required()->check(CLI::ExistingFile);
  quantiles->add_option("--t", quantiles_t, "DRAG iterations");
  quantiles->add_option("--seed", quantiles_seed, "Seed");
  quantiles->add_option("--samples", quantiles_samples, "Source points to map");
  quantiles->add_option("--out", quantiles_out, "Output CSV");

  // slopes
  auto* slopes = app.add_subcommand("slopes", "Fit log-log slopes on existing traces");
  std::vector<std::string> trace_paths;
  std::string fields_text = "err_g_sq,err_gbar_sq,err_gbar_w_sq,map_err,cost_err";
  double t_lo = 0.0;
  double t_hi = 0.0;
  slopes->add_option("traces", trace_paths, "Trace CSV files")->required()->check(CLI::ExistingFile);
  slopes->add_option("--fields", fields_text, "Columns to fit");
  slopes->add_option("--t-lo", t_lo, "Window start (default t_hi / 100)");
  slopes->add_option("--t-hi", t_hi, "Window end (default last checkpoint)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      const auto config = solve_flags.resolve();
      ExampleCache cache;
      const auto result = run_and_write(config, cache, out_dir);
      print_final(result, config.label);
    } else if (bench->parsed()) {
      const auto seeds = parse_list<std::uint64_t>(seeds_text);
      if (figure == "fig4") {
        ExperimentConfig base;
        base.params.d = growth_example == 1 ? 10 : 1;
        base.params.delta = 0.5;
        const auto rows = m_growth_experiment(growth_example, parse_list<Index>(growth_ms), seeds, base);
        const auto path = std::filesystem::path(out_dir) / fmt::format("fig4_growth_ex{}.csv", growth_example);
        write_file_atomic(path, growth_csv(rows));
        std::cout << growth_csv(rows);
      } else {
        FigureOptions options;
        options.t_max = bench_t;
        options.seeds = seeds;
        options.eval.map_mc = bench_map_mc;
        options.eval.cost_mc = bench_cost_mc;
        options.eval.per_decade = bench_per_decade;
        options.example2_weight_mc = bench_weight_mc;
        ExampleCache cache;
        for (const auto& config : figure_configs(figure, options)) {
          print_final(run_and_write(config, cache, out_dir), config.label);
        }
      }
    } else if (sweep->parsed()) {
      auto base = sweep_flags.resolve();
      SweepGrid grid;
      if (!a_list.empty()) grid.a = parse_list<double>(a_list);
      else grid.a = {base.a};
      if (!b_list.empty()) grid.b = parse_list<double>(b_list);
      else grid.b = {base.b};
      if (!gamma1_list.empty()) {
        grid.gamma1.clear();
        for (double g : parse_list<double>(gamma1_list)) grid.gamma1.push_back(g);
      } else {
        grid.gamma1 = {base.gamma1};
      }
      if (!omega_list.empty()) {
        grid.omega.clear();
        for (double w : parse_list<double>(omega_list)) grid.omega.push_back(w);
      } else {
        grid.omega = {base.omega};
      }
      if (!batch_list.empty()) grid.batch = parse_list<Index>(batch_list);
      else grid.batch = {base.batch};

      ExampleCache cache;
      std::string summary = "label,t,err_g_sq,err_gbar_sq,err_gbar_w_sq,map_err,cost_err\n";
      auto opt = [](const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string(); };
      for (const auto& config : sweep_configs(base, grid)) {
        const auto result = run_and_write(config, cache, out_dir);
        print_final(result, config.label);
        const auto& last = result.trace.rows.back();
        summary += fmt::format("{},{},{},{},{},{},{}\n", config.label, last.t, last.err_g_sq,
                               last.err_gbar_sq, opt(last.err_gbar_w_sq), opt(last.map_err),
                               opt(last.cost_err));
      }
      write_file_atomic(std::filesystem::path(out_dir) / (base.label + "_sweep_summary.csv"), summary);
    } else if (quantiles->parsed()) {
      const auto rows = mk_quantiles_demo(target_path, quantiles_t, quantiles_seed, quantiles_samples);
      write_file_atomic(quantiles_out, quantiles_csv(rows));
      std::cout << "wrote " << rows.size() << " rows to " << quantiles_out << '\n';
    } else if (slopes->parsed()) {
      const auto fields = parse_list<std::string>(fields_text);
      for (const auto& path : trace_paths) {
        const auto trace = read_trace(path);
        if (trace.rows.empty()) throw drag::Error(drag::ErrorCode::InsufficientPoints, path + ": empty trace");
        const double hi = t_hi > 0.0 ? t_hi : static_cast<double>(trace.rows.back().t);
        const double lo = t_lo > 0.0 ? t_lo : hi / 100.0;
        nlohmann::json sidecar = {{"trace", path}, {"window", {lo, hi}}, {"fits", nlohmann::json::object()}};
        for (const auto& field : fields) {
          const bool present = std::all_of(trace.rows.begin(), trace.rows.end(), [&](const TraceRow& r) {
            const double t = static_cast<double>(r.t);
            return t < lo || t > hi || row_field(r, field).has_value();
          });
          if (!present) continue;
          try {
            const auto fit = fit_loglog_slope(trace, field, lo, hi);
            sidecar["fits"][field] = {{"slope", fit.slope},
                                      {"intercept", fit.intercept},
                                      {"r_squared", fit.r_squared},
                                      {"points", fit.points}};
            std::cout << fmt::format("{} {}: slope={:.4f} r2={:.4f} points={} window=[{}, {}]\n", path,
                                     field, fit.slope, fit.r_squared, fit.points, lo, hi);
          } catch (const drag::Error& e) {
            // A zero error (e.g. an exact map) has no log; record why and move on.
            sidecar["fits"][field] = {{"error", e.what()}};
            std::cout << fmt::format("{} {}: no fit ({})\n", path, field, e.what());
          }
        }
        auto sidecar_path = std::filesystem::path(path);
        sidecar_path.replace_extension(".slopes.json");
        write_file_atomic(sidecar_path, sidecar.dump(2) + "\n");
      }
    }
  } catch (const drag::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
