#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tdtf {

enum class ErrorKind {
  ConflictingMetadata,
  MissingReleaseDate,
  MixedRoots,
  CycleDetected,
  InvalidSnapshot,
  InvalidChain,
  OutOfSpan,
  NotADependency,
  ParseError,
  DuplicateRecord,
  NegativeGrace,
  MissingMetadata,
  InvalidScheme,
  InsufficientData,
  DomainError,
  UnsupportedModelVersion,
  NotYetReleased,
  MissingModel,
  MissingEstimate,
  InternalInconsistency,
  TooManyLibraries,
  IoError,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; callers switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace tdtf
