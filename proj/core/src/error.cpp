#include "tdtf/error.hpp"

namespace tdtf {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ConflictingMetadata: return "ConflictingMetadata";
    case ErrorKind::MissingReleaseDate: return "MissingReleaseDate";
    case ErrorKind::MixedRoots: return "MixedRoots";
    case ErrorKind::CycleDetected: return "CycleDetected";
    case ErrorKind::InvalidSnapshot: return "InvalidSnapshot";
    case ErrorKind::InvalidChain: return "InvalidChain";
    case ErrorKind::OutOfSpan: return "OutOfSpan";
    case ErrorKind::NotADependency: return "NotADependency";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::DuplicateRecord: return "DuplicateRecord";
    case ErrorKind::NegativeGrace: return "NegativeGrace";
    case ErrorKind::MissingMetadata: return "MissingMetadata";
    case ErrorKind::InvalidScheme: return "InvalidScheme";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::UnsupportedModelVersion: return "UnsupportedModelVersion";
    case ErrorKind::NotYetReleased: return "NotYetReleased";
    case ErrorKind::MissingModel: return "MissingModel";
    case ErrorKind::MissingEstimate: return "MissingEstimate";
    case ErrorKind::InternalInconsistency: return "InternalInconsistency";
    case ErrorKind::TooManyLibraries: return "TooManyLibraries";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace tdtf
