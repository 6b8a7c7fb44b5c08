#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dcsplit {

enum class ErrorCode {
  DuplicatePoints,
  TooFewPoints,
  BadRadius,
  NoIntersection,
  EmptyInput,
  SectorTooWide,
  SingularSector,
  NonConforming,
  DegenerateTriangle,
  OutOfDomain,
  NotConvexEdge,
  ConvexityCertificateFailed,
  NotConvexInput,
  TooFewLevels,
  OriginOutside,
  NotPositiveOnCircle,
  NonConvexDomain,
  EmptyFamily,
  UnsupportedDimension,
  GridMismatch,
  ConfigInvalid,
  FileNotFound,
  UnknownBuiltin,
  ParseError,
  SchemaError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicatePoints: return "DuplicatePoints";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::BadRadius: return "BadRadius";
    case ErrorCode::NoIntersection: return "NoIntersection";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::SectorTooWide: return "SectorTooWide";
    case ErrorCode::SingularSector: return "SingularSector";
    case ErrorCode::NonConforming: return "NonConforming";
    case ErrorCode::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::NotConvexEdge: return "NotConvexEdge";
    case ErrorCode::ConvexityCertificateFailed: return "ConvexityCertificateFailed";
    case ErrorCode::NotConvexInput: return "NotConvexInput";
    case ErrorCode::TooFewLevels: return "TooFewLevels";
    case ErrorCode::OriginOutside: return "OriginOutside";
    case ErrorCode::NotPositiveOnCircle: return "NotPositiveOnCircle";
    case ErrorCode::NonConvexDomain: return "NonConvexDomain";
    case ErrorCode::EmptyFamily: return "EmptyFamily";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::UnknownBuiltin: return "UnknownBuiltin";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dcsplit
