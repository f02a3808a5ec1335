#pragma once

#include <stdexcept>
#include <string>

namespace esnlr {

enum class ErrorKind {
  InvalidArgument,
  AllCandidatesDegenerate,
  BetaTooLarge,
  InvalidSpec,
  NonFiniteState,
  NonFinite,
  InverseDomain,
  EmptyModel,
  VersionMismatch,
  CorruptArchive,
  DimensionMismatch,
  Io,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::AllCandidatesDegenerate: return "AllCandidatesDegenerate";
    case ErrorKind::BetaTooLarge: return "BetaTooLarge";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::InverseDomain: return "InverseDomain";
    case ErrorKind::EmptyModel: return "EmptyModel";
    case ErrorKind::VersionMismatch: return "VersionMismatch";
    case ErrorKind::CorruptArchive: return "CorruptArchive";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// Library-wide exception. The kind is stable and maps onto CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) throw Error(kind, what);
}

}  // namespace esnlr
