#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace saddle {

enum class ErrorKind {
  InvalidArgument,
  NonClosing,
  NotConvex,
  BadMarkingParity,
  Undecided,
  MeshFailure,
  LinearSolveFailure,
  NoDescent,
  NoStabilization,
  OutsideDomain,
  PathOutsideDomain,
  NotSpecial,
  QOutsideConvergenceDomain,
  OutsideSquare,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Base exception for every failure raised by the library. `module()` names
/// the subsystem that raised it so the CLI can attach provenance.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, const std::string& message)
      : std::runtime_error(message), kind_(kind), module_(std::move(module)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

}  // namespace saddle
