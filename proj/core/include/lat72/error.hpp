#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lat72 {

enum class ErrorKind {
  InvalidInput,
  NotASublattice,
  NonIntegralResult,
  DimensionMismatch,
  NotFound,
  InvalidWitness,
  NoFreeBasis,
  RankTooLarge,
  BudgetExceeded,
  NotEvenUnimodular,
  Degenerate,
  DefectOne,
  InvariantFailure,
  WNotAdmissible,
  SingularSystem,
  CheckpointCorrupt,
  StructureMismatch,
  NoLift,
  SelfCheckFailed,
  PreconditionViolated,
};

std::string_view to_string(ErrorKind kind);

/// Every failure in the library is reported through this type. The kind is
/// the machine-readable part; the message names the violated invariant.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NotASublattice: return "NotASublattice";
    case ErrorKind::NonIntegralResult: return "NonIntegralResult";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::InvalidWitness: return "InvalidWitness";
    case ErrorKind::NoFreeBasis: return "NoFreeBasis";
    case ErrorKind::RankTooLarge: return "RankTooLarge";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::NotEvenUnimodular: return "NotEvenUnimodular";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::DefectOne: return "DefectOne";
    case ErrorKind::InvariantFailure: return "InvariantFailure";
    case ErrorKind::WNotAdmissible: return "WNotAdmissible";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::CheckpointCorrupt: return "CheckpointCorrupt";
    case ErrorKind::StructureMismatch: return "StructureMismatch";
    case ErrorKind::NoLift: return "NoLift";
    case ErrorKind::SelfCheckFailed: return "SelfCheckFailed";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
  }
  return "Unknown";
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) throw Error(kind, what);
}

}  // namespace lat72
