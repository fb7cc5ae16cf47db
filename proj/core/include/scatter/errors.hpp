#pragma once

#include <stdexcept>
#include <string>

namespace scatter {

// Machine-readable failure codes.  The CLI reports these module-qualified,
// e.g. "model_core/ViolatedBound".
enum class ErrorCode {
  NonPositiveK,
  ViolatedBound,
  IncompleteSpec,
  GridTooCoarse,
  GridTooSmall,
  NonHermitianCoeffs,
  DimensionMismatch,
  NonAdmissible,
  IntegerNuInverse,
  OutOfDomain,
  NonPositiveSample,
  SupportMismatch,
  UnsupportedSymbolDegree,
  WindowTouchesZero,
  WindowTouchesThreshold,
  BoundaryLeak,
  SolverFail,
  PacketClipped,
  GridMismatch,
  ResolutionFloor,
  NoFiniteC,
  ConfigInvalid,
  SchemaDrift,
  IoError,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveK: return "NonPositiveK";
    case ErrorCode::ViolatedBound: return "ViolatedBound";
    case ErrorCode::IncompleteSpec: return "IncompleteSpec";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::GridTooSmall: return "GridTooSmall";
    case ErrorCode::NonHermitianCoeffs: return "NonHermitianCoeffs";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonAdmissible: return "NonAdmissible";
    case ErrorCode::IntegerNuInverse: return "IntegerNuInverse";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::NonPositiveSample: return "NonPositiveSample";
    case ErrorCode::SupportMismatch: return "SupportMismatch";
    case ErrorCode::UnsupportedSymbolDegree: return "UnsupportedSymbolDegree";
    case ErrorCode::WindowTouchesZero: return "WindowTouchesZero";
    case ErrorCode::WindowTouchesThreshold: return "WindowTouchesThreshold";
    case ErrorCode::BoundaryLeak: return "BoundaryLeak";
    case ErrorCode::SolverFail: return "SolverFail";
    case ErrorCode::PacketClipped: return "PacketClipped";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::ResolutionFloor: return "ResolutionFloor";
    case ErrorCode::NoFiniteC: return "NoFiniteC";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::SchemaDrift: return "SchemaDrift";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace scatter
