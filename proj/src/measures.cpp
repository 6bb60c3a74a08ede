#include "drag/measures.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace drag {

DiscreteMeasure::DiscreteMeasure(PointSet points, Vector weights, std::optional<double> radius_hint)
    : points_(std::move(points)), weights_(std::move(weights)) {
  require(points_.cols() >= 1, ErrorCode::InvalidArgument, "target measure needs at least one point");
  require(points_.rows() >= 1, ErrorCode::InvalidArgument, "target points need dimension >= 1");
  require(weights_.size() == points_.cols(), ErrorCode::DimensionMismatch,
          "weight count differs from point count");
  require(points_.allFinite(), ErrorCode::NonFinite, "target points must be finite");
  for (Index j = 0; j < weights_.size(); ++j) {
    require(std::isfinite(weights_[j]) && weights_[j] > 0.0, ErrorCode::NonpositiveWeight,
            "weight " + std::to_string(j) + " is not strictly positive");
  }
  require(std::abs(weights_.sum() - 1.0) <= 1e-12, ErrorCode::WeightSum,
          "weights must sum to 1 within 1e-12");

  const double max_norm = points_.colwise().norm().maxCoeff();
  radius_hint_ = radius_hint.value_or(max_norm);
  require(max_norm <= radius_hint_, ErrorCode::InvalidArgument,
          "a target point lies outside the declared radius");

  log_weights_ = weights_.array().log();
  w_min_ = weights_.minCoeff();
}

DiscreteMeasure DiscreteMeasure::normalized(PointSet points, Vector weights,
                                            std::optional<double> radius_hint) {
  const double total = weights.sum();
  require(std::isfinite(total) && total > 0.0, ErrorCode::WeightSum, "weights must have positive sum");
  weights /= total;
  return DiscreteMeasure(std::move(points), std::move(weights), radius_hint);
}

SourceSpec::SourceSpec(SourceKind kind, Index dim, double radius_bound, double holder_alpha)
    : kind_(std::move(kind)), dim_(dim), radius_bound_(radius_bound), holder_alpha_(holder_alpha) {
  require(holder_alpha > 0.0 && holder_alpha <= 1.0, ErrorCode::InvalidArgument,
          "holder_alpha must lie in (0, 1]");
}

SourceSpec SourceSpec::uniform_box(Vector lo, Vector hi, double holder_alpha) {
  require(lo.size() >= 1 && lo.size() == hi.size(), ErrorCode::DimensionMismatch,
          "box bounds must have equal positive length");
  require(lo.allFinite() && hi.allFinite(), ErrorCode::NonFinite, "box bounds must be finite");
  require((lo.array() < hi.array()).all(), ErrorCode::InvalidArgument, "box requires lo < hi");
  const double radius = lo.cwiseAbs().cwiseMax(hi.cwiseAbs()).norm();
  const Index dim = lo.size();
  return SourceSpec(UniformBox{std::move(lo), std::move(hi)}, dim, radius, holder_alpha);
}

SourceSpec SourceSpec::uniform_shifted_interval(double delta, double holder_alpha) {
  require(std::isfinite(delta) && delta >= 0.0, ErrorCode::InvalidArgument, "delta must be >= 0");
  return SourceSpec(UniformShiftedInterval{delta}, 1, 1.0 + delta, holder_alpha);
}

SourceSpec SourceSpec::uniform_ball(double radius, Index dim, double holder_alpha) {
  require(std::isfinite(radius) && radius > 0.0, ErrorCode::InvalidArgument, "radius must be > 0");
  require(dim >= 1, ErrorCode::InvalidArgument, "ball dimension must be >= 1");
  return SourceSpec(UniformBall{radius, dim}, dim, radius, holder_alpha);
}

bool SourceSpec::contains(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != dim_) return false;
  return std::visit(
      [&](const auto& k) -> bool {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, UniformBox>) {
          return (x.array() >= k.lo.array()).all() && (x.array() <= k.hi.array()).all();
        } else if constexpr (std::is_same_v<K, UniformShiftedInterval>) {
          return x[0] >= k.delta && x[0] <= 1.0 + k.delta;
        } else {
          return x.norm() <= k.radius;
        }
      },
      kind_);
}

void sample_into(const SourceSpec& source, RngStream& rng, Eigen::Ref<PointSet> out) {
  require(out.rows() == source.dim(), ErrorCode::DimensionMismatch, "sample buffer dimension");
  const Index d = source.dim();
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        for (Index i = 0; i < out.cols(); ++i) {
          if constexpr (std::is_same_v<K, UniformBox>) {
            for (Index r = 0; r < d; ++r) out(r, i) = k.lo[r] + (k.hi[r] - k.lo[r]) * rng.uniform();
          } else if constexpr (std::is_same_v<K, UniformShiftedInterval>) {
            out(0, i) = k.delta + rng.uniform();
          } else {
            // Gaussian direction scaled by radius * U^(1/d).
            double norm2 = 0.0;
            do {
              norm2 = 0.0;
              for (Index r = 0; r < d; ++r) {
                out(r, i) = rng.normal();
                norm2 += out(r, i) * out(r, i);
              }
            } while (norm2 == 0.0);
            const double scale = k.radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(d)) /
                                 std::sqrt(norm2);
            out.col(i) *= scale;
          }
        }
      },
      source.kind());
}

PointSet sample_batch(const SourceSpec& source, RngStream& rng, Index n) {
  require(n >= 1, ErrorCode::InvalidArgument, "sample count must be >= 1");
  PointSet out(source.dim(), n);
  sample_into(source, rng, out);
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

DiscreteMeasure load_discrete_measure(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + path.string());

  std::vector<double> coords;
  std::vector<double> weights;
  Index dim = -1;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty() || row.front() == '#') continue;

    std::vector<double> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = row.find(',', start);
      double value = 0.0;
      const auto field = row.substr(start, comma == std::string_view::npos ? row.npos : comma - start);
      require(parse_double(field, value), ErrorCode::MalformedRow,
              path.string() + ":" + std::to_string(line_no) + ": bad field '" + std::string(field) + "'");
      fields.push_back(value);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    require(fields.size() >= 2, ErrorCode::MalformedRow,
            path.string() + ":" + std::to_string(line_no) + ": need coordinates and a weight");
    const auto row_dim = static_cast<Index>(fields.size()) - 1;
    if (dim < 0) dim = row_dim;
    require(row_dim == dim, ErrorCode::DimensionMismatch,
            path.string() + ":" + std::to_string(line_no) + ": dimension differs from first row");
    require(fields.back() > 0.0, ErrorCode::NonpositiveWeight,
            path.string() + ":" + std::to_string(line_no) + ": weight must be > 0");
    coords.insert(coords.end(), fields.begin(), fields.end() - 1);
    weights.push_back(fields.back());
  }
  require(!weights.empty(), ErrorCode::MalformedRow, path.string() + ": no data rows");

  const auto m = static_cast<Index>(weights.size());
  PointSet points = Eigen::Map<const PointSet>(coords.data(), dim, m);
  Vector w = Eigen::Map<const Vector>(weights.data(), m);
  const double total = w.sum();
  require(std::abs(total - 1.0) <= 1e-6, ErrorCode::WeightSum,
          path.string() + ": weights sum to " + std::to_string(total));
  return DiscreteMeasure::normalized(std::move(points), std::move(w));
}

void save_discrete_measure(const DiscreteMeasure& measure, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot write " + path.string());
  out << "# " << measure.dim() << " coordinates, weight\n";
  char buf[32];
  for (Index j = 0; j < measure.size(); ++j) {
    for (Index r = 0; r < measure.dim(); ++r) {
      std::snprintf(buf, sizeof buf, "%.17g", measure.points()(r, j));
      out << buf << ',';
    }
    std::snprintf(buf, sizeof buf, "%.17g", measure.weights()[j]);
    out << buf << '\n';
  }
  require(static_cast<bool>(out), ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace drag
