#include "guardsec/error.hpp"

namespace guardsec {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InputTooLong: return "InputTooLong";
    case ErrorCode::MalformedUrl: return "MalformedUrl";
    case ErrorCode::MalformedEmail: return "MalformedEmail";
    case ErrorCode::MalformedPhone: return "MalformedPhone";
    case ErrorCode::MalformedDomain: return "MalformedDomain";
    case ErrorCode::EmptyAfterNormalization: return "EmptyAfterNormalization";
    case ErrorCode::MalformedEntity: return "MalformedEntity";
    case ErrorCode::UnknownProvider: return "UnknownProvider";
    case ErrorCode::InapplicableKind: return "InapplicableKind";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateKey: return "DuplicateKey";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::NonPositiveCost: return "NonPositiveCost";
    case ErrorCode::MissingWeightTable: return "MissingWeightTable";
    case ErrorCode::UnknownLocale: return "UnknownLocale";
    case ErrorCode::MissingSourceAddress: return "MissingSourceAddress";
    case ErrorCode::DuplicateWithinWindow: return "DuplicateWithinWindow";
    case ErrorCode::DescriptionTooLong: return "DescriptionTooLong";
    case ErrorCode::StoreUnavailable: return "StoreUnavailable";
    case ErrorCode::SingleClassInput: return "SingleClassInput";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DegenerateMarginals: return "DegenerateMarginals";
    case ErrorCode::JoinMismatch: return "JoinMismatch";
    case ErrorCode::BindFailure: return "BindFailure";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::Internal: return "Internal";
  }
  return "Internal";
}

}  // namespace guardsec
