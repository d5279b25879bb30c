#include "saddle/error.hpp"

namespace saddle {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonClosing: return "NonClosing";
    case ErrorKind::NotConvex: return "NotConvex";
    case ErrorKind::BadMarkingParity: return "BadMarkingParity";
    case ErrorKind::Undecided: return "Undecided";
    case ErrorKind::MeshFailure: return "MeshFailure";
    case ErrorKind::LinearSolveFailure: return "LinearSolveFailure";
    case ErrorKind::NoDescent: return "NoDescent";
    case ErrorKind::NoStabilization: return "NoStabilization";
    case ErrorKind::OutsideDomain: return "OutsideDomain";
    case ErrorKind::PathOutsideDomain: return "PathOutsideDomain";
    case ErrorKind::NotSpecial: return "NotSpecial";
    case ErrorKind::QOutsideConvergenceDomain: return "QOutsideConvergenceDomain";
    case ErrorKind::OutsideSquare: return "OutsideSquare";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace saddle
