#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace guardsec {

// Every failure the library can report. The numeric values are mirrored by
// gs_status in the public C header and must not be reordered.
enum class ErrorCode {
  Ok = 0,
  InvalidArgument,
  EmptyInput,
  InputTooLong,
  MalformedUrl,
  MalformedEmail,
  MalformedPhone,
  MalformedDomain,
  EmptyAfterNormalization,
  MalformedEntity,
  UnknownProvider,
  InapplicableKind,
  ParseError,
  DuplicateKey,
  SchemaViolation,
  NonPositiveCost,
  MissingWeightTable,
  UnknownLocale,
  MissingSourceAddress,
  DuplicateWithinWindow,
  DescriptionTooLong,
  StoreUnavailable,
  SingleClassInput,
  LengthMismatch,
  DegenerateMarginals,
  JoinMismatch,
  BindFailure,
  RateLimited,
  NotFound,
  Internal,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Parse-class errors from the entity model, which callers frequently want to
// collapse into a single "malformed entity" response.
inline bool is_entity_parse_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyInput:
    case ErrorCode::InputTooLong:
    case ErrorCode::MalformedUrl:
    case ErrorCode::MalformedEmail:
    case ErrorCode::MalformedPhone:
    case ErrorCode::MalformedDomain:
    case ErrorCode::EmptyAfterNormalization:
    case ErrorCode::MalformedEntity:
      return true;
    default:
      return false;
  }
}

}  // namespace guardsec
