#pragma once

#include "drag/measures.hpp"
#include "drag/rng.hpp"
#include "drag/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace drag {

/// Samples per Monte Carlo chunk. Chunk c always draws from rng.split(c), so
/// results depend only on (rng, n) and never on the worker count.
inline constexpr Index kMonteCarloChunk = 16384;

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  Index n = 0;
};

/// Running mean / second central moment for one chunk.
struct MomentAccumulator {
  Index n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    ++n;
    const double delta = v - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (v - mean);
  }

  void merge(const MomentAccumulator& other) {
    if (other.n == 0) return;
    if (n == 0) {
      *this = other;
      return;
    }
    const double total = static_cast<double>(n + other.n);
    const double delta = other.mean - mean;
    mean += delta * static_cast<double>(other.n) / total;
    m2 += other.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(other.n) / total;
    n += other.n;
  }

  McEstimate finish() const {
    McEstimate out;
    out.estimate = mean;
    out.n = n;
    out.std_error = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
    return out;
  }
};

/// Hardware concurrency, overridable with the DRAG_THREADS environment variable.
inline unsigned default_worker_count() {
  if (const char* env = std::getenv("DRAG_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

/// Runs chunk_fn(chunk_index, chunk_rng, chunk_size) for every chunk of an
/// n-sample budget and returns the per-chunk results in chunk order.
template <class Result, class ChunkFn>
std::vector<Result> map_chunks(Index n, const RngStream& rng, ChunkFn&& chunk_fn) {
  const Index chunks = (n + kMonteCarloChunk - 1) / kMonteCarloChunk;
  std::vector<Result> results(static_cast<std::size_t>(chunks));
  auto run = [&](Index c) {
    RngStream chunk_rng = rng.split(static_cast<std::uint64_t>(c));
    const Index count = std::min(kMonteCarloChunk, n - c * kMonteCarloChunk);
    results[static_cast<std::size_t>(c)] = chunk_fn(c, chunk_rng, count);
  };

  const auto workers = static_cast<Index>(std::min<Index>(default_worker_count(), chunks));
  if (workers <= 1) {
    for (Index c = 0; c < chunks; ++c) run(c);
    return results;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  {
    std::vector<std::jthread> pool;
    for (Index w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (Index c = w; c < chunks; c += workers) run(c);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

/// Mean and standard error of f(X), X ~ source, over n draws.
template <class F>
McEstimate monte_carlo_mean(const SourceSpec& source, const RngStream& rng, Index n, F&& f) {
  require(n >= 2, ErrorCode::InvalidArgument, "Monte Carlo needs at least 2 samples");
  auto parts = map_chunks<MomentAccumulator>(n, rng, [&](Index, RngStream& chunk_rng, Index count) {
    PointSet xs(source.dim(), count);
    sample_into(source, chunk_rng, xs);
    MomentAccumulator acc;
    for (Index i = 0; i < count; ++i) acc.add(f(xs.col(i)));
    return acc;
  });
  MomentAccumulator total;
  for (const auto& p : parts) total.merge(p);
  return total.finish();
}

}  // namespace drag
