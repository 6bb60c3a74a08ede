#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace drag {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Column-major point set: one point per column.
using PointSet = Eigen::MatrixXd;

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  MalformedRow,
  NonpositiveWeight,
  WeightSum,
  NonFinite,
  ZeroMassCell,
  InsufficientPoints,
  Io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::NonpositiveWeight: return "NonpositiveWeight";
    case ErrorCode::WeightSum: return "WeightSum";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ZeroMassCell: return "ZeroMassCell";
    case ErrorCode::InsufficientPoints: return "InsufficientPoints";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace drag
