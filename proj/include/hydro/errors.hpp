#pragma once

#include <stdexcept>
#include <string>

namespace hydro {

/// Error categories used across the library. Tests match on these.
enum class Errc {
  // model validation
  CycleDetected,
  BoundViolation,
  DanglingReference,
  MissingGauge,
  // gauge curve evaluation
  OutOfRange,
  // flow routing
  NegativeDelay,
  LengthMismatch,
  // LP / MILP solver
  SolverStall,
  NodeLimitExceeded,
  BadBounds,
  // scheduling problem construction and solution extraction
  MissingKe,
  HorizonZero,
  InfeasibleSchedule,
  UnboundedModel,
  NotOptimal,
  InternalError,
  // file ingestion / emission
  ParseError,
  ValidationError,
  ColumnMismatch,
  IoError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& message);

}  // namespace hydro
