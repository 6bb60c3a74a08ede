#pragma once

#include "drag/bench/slope.hpp"
#include "drag/types.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace drag::bench {

/// One evaluation checkpoint.
struct TraceRow {
  Index t = 0;
  double eps = 0.0;
  double gamma = 0.0;
  double err_g_sq = 0.0;
  double err_gbar_sq = 0.0;
  std::optional<double> err_gbar_w_sq;
  std::optional<double> map_err;
  std::optional<double> map_p;
  std::optional<double> cost_est;
  std::optional<double> cost_err;
  std::optional<double> cost_se;
  std::optional<double> wall_ms;
};

inline constexpr std::array<std::string_view, 12> kTraceColumns = {
    "t",        "eps",   "gamma",    "err_g_sq", "err_gbar_sq", "err_gbar_w_sq",
    "map_err",  "map_p", "cost_est", "cost_err", "cost_se",     "wall_ms"};

struct RunTrace {
  nlohmann::json meta;
  std::vector<TraceRow> rows;
};

/// Named column value; nullopt for an empty optional field.
std::optional<double> row_field(const TraceRow& row, std::string_view column);

/// Throws unless t is strictly increasing and every present field is finite
/// and, for error columns, nonnegative.
void validate_trace(const RunTrace& trace);

/// CSV text: header plus one line per row, shortest round-trip decimals,
/// empty fields for missing optional metrics.
std::string trace_csv(const RunTrace& trace);

std::vector<TraceRow> parse_trace_csv(std::string_view text);
RunTrace read_trace(const std::filesystem::path& csv_path);

/// `<stem>.csv` and `<stem>.json` under dir, each written to a temporary file
/// then renamed into place.
void write_trace(const RunTrace& trace, const std::filesystem::path& dir, const std::string& stem);

void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

SlopeFit fit_loglog_slope(const RunTrace& trace, std::string_view column, double t_lo, double t_hi);

}  // namespace drag::bench
