#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fbms {

enum class ErrorKind {
  InvalidInput,
  NonManifoldEdge,
  NonManifoldVertex,
  Unorientable,
  Disconnected,
  NoBoundary,
  InconsistentTopology,
  InconsistentRank,
  ProjectionFailed,
  NotOnBoundary,
  DegenerateGradient,
  SamplingFailed,
  ResolutionTooLow,
  MissingField,
  NegativeTriangleArea,
  SolverNoConvergence,
  DimensionMismatch,
  MissingGeometry,
  FileNotFound,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

// All library failures surface as this exception; `kind()` is stable and is
// what reports serialize.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fbms
