#include "drag/solver.hpp"

#include <algorithm>
#include <cmath>

namespace drag {

double power_decay(Index k, double exponent) {
  return std::pow(static_cast<double>(k), -exponent);
}

double minibatch_gamma1(double gamma1, Index batch) {
  return gamma1 * std::sqrt(static_cast<double>(batch));
}

DragConfig DragConfig::defaults(const SourceSpec& source, const DiscreteMeasure& target) {
  DragConfig config;
  config.gamma1 = std::sqrt(target.w_min());
  config.projection =
      ProjectionSet::cu(std::max(source.radius_bound(), target.radius_hint()), target, 0);
  return config;
}

std::vector<std::string> DragConfig::validate() const {
  require(std::isfinite(gamma1) && gamma1 > 0.0, ErrorCode::InvalidArgument, "gamma1 must be > 0");
  require(std::isfinite(a) && a >= 0.0, ErrorCode::InvalidArgument, "a must be >= 0");
  require(std::isfinite(b) && b >= 0.0, ErrorCode::InvalidArgument, "b must be >= 0");
  require(batch >= 1, ErrorCode::InvalidArgument, "batch must be >= 1");
  require(t_max >= 1, ErrorCode::InvalidArgument, "t_max must be >= 1");
  require(!omega || (std::isfinite(*omega) && *omega > 0.0), ErrorCode::InvalidArgument,
          "omega must be > 0");
  std::vector<std::string> warnings;
  if (a < b) warnings.push_back("a < b: the averaged-iterate rate guarantee assumes a >= b");
  if (b <= 0.5 || b >= 1.0) warnings.push_back("b outside (1/2, 1)");
  return warnings;
}

WeightedAverage::WeightedAverage(const Vector& g0, double omega) : value_(g0), omega_(omega) {
  require(std::isfinite(omega) && omega > 0.0, ErrorCode::InvalidArgument, "omega must be > 0");
}

void WeightedAverage::update(const Vector& g_k, Index k) {
  const double weight = std::pow(std::log(static_cast<double>(k + 1)), omega_);
  if (weight == 0.0) return;
  weight_sum_ += weight;
  const double lambda = weight / weight_sum_;
  value_ = (1.0 - lambda) * value_ + lambda * g_k;
}

SolverState SolverState::initial(const DragConfig& config, Index m) {
  Vector g0 = Vector::Zero(m);
  if (config.projection) {
    require(config.projection->size() == m, ErrorCode::DimensionMismatch,
            "projection set size differs from M");
    config.projection->project_inplace(g0);
  }
  SolverState state;
  state.g = Potential(g0);
  state.g_bar = state.g;
  if (config.omega) state.g_bar_w.emplace(g0, *config.omega);
  state.eps = 1.0;
  return state;
}

Vector minibatch_gradient(const Eigen::Ref<const PointSet>& batch, const Potential& g, double eps,
                          const DiscreteMeasure& target) {
  require(batch.cols() >= 1, ErrorCode::InvalidArgument, "empty batch");
  require(batch.rows() == target.dim(), ErrorCode::DimensionMismatch, "batch dimension");
  require(g.size() == target.size(), ErrorCode::DimensionMismatch, "potential length differs from M");
  require(std::isfinite(eps) && eps > 0.0, ErrorCode::InvalidArgument, "eps must be > 0");
  Vector grad = Vector::Zero(g.size());
  Vector scratch;
  const double scale = 1.0 / static_cast<double>(batch.cols());
  for (Index i = 0; i < batch.cols(); ++i) {
    detail::add_gradient(batch.col(i), g.values(), eps, target, scale, scratch, grad);
  }
  return grad;
}

namespace {

// Shared body of DRAG and the fixed-eps baselines: projected step with the
// state's current eps, then plain and weighted averaging.
void advance(SolverState& state, const Eigen::Ref<const PointSet>& batch, double gamma,
             const DragConfig& config, const DiscreteMeasure& target) {
  require(batch.cols() >= 1, ErrorCode::InvalidArgument, "empty batch");
  require(batch.rows() == target.dim(), ErrorCode::DimensionMismatch, "batch dimension");
  const Index k = state.k + 1;
  Vector& g = state.g.values();

  state.grad_buffer.setZero(g.size());
  const double scale = 1.0 / static_cast<double>(batch.cols());
  for (Index i = 0; i < batch.cols(); ++i) {
    detail::add_gradient(batch.col(i), g, state.eps, target, scale, state.score_buffer,
                         state.grad_buffer);
  }
  g.noalias() -= gamma * state.grad_buffer;
  if (config.projection) config.projection->project_inplace(g);

  const double kd = static_cast<double>(k);
  state.g_bar.values() = (1.0 / (kd + 1.0)) * g + (kd / (kd + 1.0)) * state.g_bar.values();
  state.k = k;
  state.gamma = gamma;
  if (state.g_bar_w) state.g_bar_w->update(g, k);
}

template <class Step>
SolverState run_loop(const DragConfig& config, const SourceSpec& source,
                     const DiscreteMeasure& target, const Observer& observer, Step&& step) {
  config.validate();
  require(source.dim() == target.dim(), ErrorCode::DimensionMismatch, "source/target dimension");
  SolverState state = SolverState::initial(config, target.size());
  std::vector<Index> schedule = config.eval_schedule;
  std::sort(schedule.begin(), schedule.end());
  auto next_eval = schedule.begin();
  auto notify = [&] {
    while (next_eval != schedule.end() && *next_eval < state.k) ++next_eval;
    if (next_eval != schedule.end() && *next_eval == state.k) {
      if (observer) observer(state);
      ++next_eval;
    }
  };
  notify();

  RngStream rng(config.seed, 0);
  PointSet batch(target.dim(), config.batch);
  for (Index k = 1; k <= config.t_max; ++k) {
    sample_into(source, rng, batch);
    step(state, batch);
    notify();
  }
  return state;
}

}  // namespace

void drag_step(SolverState& state, const Eigen::Ref<const PointSet>& batch,
               const DragConfig& config, const DiscreteMeasure& target) {
  const Schedule schedule = config.schedule();
  const Index k = state.k + 1;
  advance(state, batch, schedule.step(k), config, target);
  state.eps = schedule.regularization(k);
}

void weighted_average_update(SolverState& state, double omega) {
  if (!state.g_bar_w) {
    state.g_bar_w.emplace(state.g.values(), omega);
    return;
  }
  require(state.g_bar_w->omega() == omega, ErrorCode::InvalidArgument,
          "omega differs from the running average's");
  state.g_bar_w->update(state.g.values(), state.k);
}

SolverState run_drag(const DragConfig& config, const SourceSpec& source,
                     const DiscreteMeasure& target, const Observer& observer) {
  return run_loop(config, source, target, observer,
                  [&](SolverState& state, const PointSet& batch) {
                    drag_step(state, batch, config, target);
                  });
}

SolverState run_fixed_eps(const DragConfig& config, double eps, Averaging /*averaging*/,
                          const SourceSpec& source, const DiscreteMeasure& target,
                          const Observer& observer) {
  require(std::isfinite(eps) && eps > 0.0, ErrorCode::InvalidArgument, "eps must be > 0");
  const Schedule schedule = config.schedule();
  return run_loop(config, source, target, observer,
                  [&](SolverState& state, const PointSet& batch) {
                    state.eps = eps;
                    advance(state, batch, schedule.step(state.k + 1), config, target);
                  });
}

const Potential& solver_estimate(const SolverState& state, Averaging averaging) {
  return averaging == Averaging::None ? state.g : state.g_bar;
}

}  // namespace drag
