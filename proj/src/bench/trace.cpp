#include "drag/bench/trace.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace drag::bench {

std::optional<double> row_field(const TraceRow& row, std::string_view column) {
  if (column == "t") return static_cast<double>(row.t);
  if (column == "eps") return row.eps;
  if (column == "gamma") return row.gamma;
  if (column == "err_g_sq") return row.err_g_sq;
  if (column == "err_gbar_sq") return row.err_gbar_sq;
  if (column == "err_gbar_w_sq") return row.err_gbar_w_sq;
  if (column == "map_err") return row.map_err;
  if (column == "map_p") return row.map_p;
  if (column == "cost_est") return row.cost_est;
  if (column == "cost_err") return row.cost_err;
  if (column == "cost_se") return row.cost_se;
  if (column == "wall_ms") return row.wall_ms;
  throw Error(ErrorCode::InvalidArgument, "unknown trace column '" + std::string(column) + "'");
}

void validate_trace(const RunTrace& trace) {
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    const auto& row = trace.rows[i];
    require(i == 0 || row.t > trace.rows[i - 1].t, ErrorCode::InvalidArgument,
            "trace iterations must be strictly increasing");
    for (auto column : kTraceColumns) {
      const auto v = row_field(row, column);
      if (!v) continue;
      require(std::isfinite(*v), ErrorCode::NonFinite, "non-finite " + std::string(column));
      if (column != "cost_est") {
        require(*v >= 0.0, ErrorCode::InvalidArgument, "negative " + std::string(column));
      }
    }
  }
}

std::string trace_csv(const RunTrace& trace) {
  std::string out;
  for (std::size_t c = 0; c < kTraceColumns.size(); ++c) {
    if (c) out += ',';
    out += kTraceColumns[c];
  }
  out += '\n';
  for (const auto& row : trace.rows) {
    out += fmt::format("{}", row.t);
    for (std::size_t c = 1; c < kTraceColumns.size(); ++c) {
      out += ',';
      if (const auto v = row_field(row, kTraceColumns[c])) out += fmt::format("{}", *v);
    }
    out += '\n';
  }
  return out;
}

namespace {

std::optional<double> parse_field(std::string_view field) {
  if (field.empty()) return std::nullopt;
  double v = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  require(ec == std::errc() && ptr == end, ErrorCode::MalformedRow,
          "bad trace field '" + std::string(field) + "'");
  return v;
}

}  // namespace

std::vector<TraceRow> parse_trace_csv(std::string_view text) {
  std::vector<TraceRow> rows;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    require(fields.size() == kTraceColumns.size(), ErrorCode::MalformedRow,
            "trace row has " + std::to_string(fields.size()) + " columns");
    if (header) {
      for (std::size_t c = 0; c < fields.size(); ++c) {
        require(fields[c] == kTraceColumns[c], ErrorCode::MalformedRow, "unexpected trace header");
      }
      header = false;
      continue;
    }
    auto required = [&](std::size_t c) {
      const auto v = parse_field(fields[c]);
      require(v.has_value(), ErrorCode::MalformedRow, "missing " + std::string(kTraceColumns[c]));
      return *v;
    };
    TraceRow row;
    row.t = static_cast<Index>(required(0));
    row.eps = required(1);
    row.gamma = required(2);
    row.err_g_sq = required(3);
    row.err_gbar_sq = required(4);
    row.err_gbar_w_sq = parse_field(fields[5]);
    row.map_err = parse_field(fields[6]);
    row.map_p = parse_field(fields[7]);
    row.cost_est = parse_field(fields[8]);
    row.cost_err = parse_field(fields[9]);
    row.cost_se = parse_field(fields[10]);
    row.wall_ms = parse_field(fields[11]);
    rows.push_back(row);
  }
  return rows;
}

RunTrace read_trace(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + csv_path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  RunTrace trace;
  trace.rows = parse_trace_csv(buffer.str());
  auto meta_path = csv_path;
  meta_path.replace_extension(".json");
  if (std::filesystem::exists(meta_path)) {
    std::ifstream meta(meta_path);
    trace.meta = nlohmann::json::parse(meta);
  }
  return trace;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    require(static_cast<bool>(out), ErrorCode::Io, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_trace(const RunTrace& trace, const std::filesystem::path& dir, const std::string& stem) {
  validate_trace(trace);
  write_file_atomic(dir / (stem + ".csv"), trace_csv(trace));
  write_file_atomic(dir / (stem + ".json"), trace.meta.dump(2) + "\n");
}

SlopeFit fit_loglog_slope(const RunTrace& trace, std::string_view column, double t_lo, double t_hi) {
  std::vector<double> t;
  std::vector<double> v;
  for (const auto& row : trace.rows) {
    const double tt = static_cast<double>(row.t);
    if (tt < t_lo || tt > t_hi) continue;
    const auto value = row_field(row, column);
    require(value.has_value(), ErrorCode::InvalidArgument,
            "column " + std::string(column) + " is empty inside the window");
    t.push_back(tt);
    v.push_back(*value);
  }
  return fit_loglog_slope(std::span<const double>(t), std::span<const double>(v), t_lo, t_hi);
}

}  // namespace drag::bench
