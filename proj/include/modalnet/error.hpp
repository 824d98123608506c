#pragma once

#include <stdexcept>
#include <string>

namespace mnet {

enum class ErrorKind {
  DuplicatePortName,
  InvalidPortName,
  InvalidType,
  InvalidValue,
  PartialMap,
  UnknownTarget,
  TypeMismatch,
  DomainMismatch,
  NotAUnion,
  InfiniteType,
  SideError,
  BoxMismatch,
  ArityMismatch,
  MergedWire,
  EmptyModeSet,
  MissingInterface,
  UnknownMode,
  CommutingSquareViolation,
  ShapeError,
  ModeError,
  InputShapeError,
  InitialStateError,
  SyntaxError,
  NameResolutionError,
  DynamicsTypeError,
  BusWidthMismatch,
  DivisionByZero,
  UnboundReference,
  UnknownName,
  Io,
};

const char* to_string(ErrorKind kind);

// All library failures are reported as mnet::Error; kind() is stable and
// is what the CLI serializes into its JSON diagnostics.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        detail_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace mnet
