#include "hydro/errors.hpp"

namespace hydro {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::CycleDetected: return "CycleDetected";
    case Errc::BoundViolation: return "BoundViolation";
    case Errc::DanglingReference: return "DanglingReference";
    case Errc::MissingGauge: return "MissingGauge";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::NegativeDelay: return "NegativeDelay";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::SolverStall: return "SolverStall";
    case Errc::NodeLimitExceeded: return "NodeLimitExceeded";
    case Errc::BadBounds: return "BadBounds";
    case Errc::MissingKe: return "MissingKe";
    case Errc::HorizonZero: return "HorizonZero";
    case Errc::InfeasibleSchedule: return "InfeasibleSchedule";
    case Errc::UnboundedModel: return "UnboundedModel";
    case Errc::NotOptimal: return "NotOptimal";
    case Errc::InternalError: return "InternalError";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
    case Errc::ColumnMismatch: return "ColumnMismatch";
    case Errc::IoError: return "IoError";
  }
  return "UnknownError";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

void fail(Errc code, const std::string& message) { throw Error(code, message); }

}  // namespace hydro
