#pragma once

#include "drag/measures.hpp"
#include "drag/projection.hpp"
#include "drag/semidual.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace drag {

/// k^{-exponent}; the single routine behind every step and regularization
/// schedule so values never drift between modules.
double power_decay(Index k, double exponent);

/// gamma_k = gamma1 k^{-b}; eps_k = k^{-a} for k >= 1 and eps_0 = 1.
struct Schedule {
  double gamma1 = 1.0;
  double a = 0.75;
  double b = 0.75;

  double step(Index k) const { return gamma1 * power_decay(k, b); }
  double regularization(Index k) const { return k == 0 ? 1.0 : power_decay(k, a); }
};

/// gamma1 * sqrt(n_b), the usual mini-batch step rescaling.
double minibatch_gamma1(double gamma1, Index batch);

struct DragConfig {
  double gamma1 = 1.0;
  double a = 0.75;
  double b = 0.75;
  std::optional<ProjectionSet> projection;  // none: unprojected steps
  Index batch = 1;
  std::optional<double> omega;  // log-weighted averaging when set
  Index t_max = 1;
  std::uint64_t seed = 0;
  std::vector<Index> eval_schedule;

  /// gamma1 = sqrt(w_min), a = b = 0.75, Cu projection anchored at index 0
  /// with R = max(source radius, target radius).
  static DragConfig defaults(const SourceSpec& source, const DiscreteMeasure& target);

  Schedule schedule() const { return {gamma1, a, b}; }
  /// Throws on invalid values; returns human-readable warnings otherwise.
  std::vector<std::string> validate() const;
};

/// Online log-weighted average sum_k ln(k+1)^omega g_k / sum_k ln(k+1)^omega.
/// The k = 0 iterate has weight ln(1)^omega = 0, so before the first update the
/// average is defined as g_0.
class WeightedAverage {
public:
  WeightedAverage(const Vector& g0, double omega);

  /// Folds in iterate g_k (k >= 1).
  void update(const Vector& g_k, Index k);

  const Vector& value() const noexcept { return value_; }
  double weight_sum() const noexcept { return weight_sum_; }
  double omega() const noexcept { return omega_; }

private:
  Vector value_;
  double weight_sum_ = 0.0;
  double omega_;
};

struct SolverState {
  Index k = 0;
  Potential g;      // g_k
  Potential g_bar;  // plain running mean of g_0..g_k
  std::optional<WeightedAverage> g_bar_w;
  double eps = 1.0;    // eps_k
  double gamma = 0.0;  // gamma_k, 0 before the first step

  /// Scratch buffers reused across steps; not part of the state proper.
  Vector grad_buffer;
  Vector score_buffer;

  static SolverState initial(const DragConfig& config, Index m);
};

/// Mean of per-sample stochastic gradients over the batch columns.
Vector minibatch_gradient(const Eigen::Ref<const PointSet>& batch, const Potential& g, double eps,
                          const DiscreteMeasure& target);

/// One DRAG iteration. The gradient uses the previous regularization eps_{k-1};
/// eps_k = k^{-a} is set last.
void drag_step(SolverState& state, const Eigen::Ref<const PointSet>& batch,
               const DragConfig& config, const DiscreteMeasure& target);

/// Folds state.g into the weighted average as iterate state.k.
void weighted_average_update(SolverState& state, double omega);

using Observer = std::function<void(const SolverState&)>;

/// Runs config.t_max DRAG steps with n_b fresh samples each, calling observer
/// at every index of config.eval_schedule (index 0 included if listed).
SolverState run_drag(const DragConfig& config, const SourceSpec& source,
                     const DiscreteMeasure& target, const Observer& observer = {});

enum class Averaging { None, Plain };

/// Fixed-regularization baseline: projected (or plain) SGD at constant eps,
/// consuming the same sample stream as run_drag for a given seed. `a` is
/// ignored. With Averaging::None the estimate is state.g, else state.g_bar.
SolverState run_fixed_eps(const DragConfig& config, double eps, Averaging averaging,
                          const SourceSpec& source, const DiscreteMeasure& target,
                          const Observer& observer = {});

/// The estimate a solver reports for the given averaging mode.
const Potential& solver_estimate(const SolverState& state, Averaging averaging);

}  // namespace drag
