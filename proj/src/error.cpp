#include "gaudi/error.hpp"

namespace gaudi {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::EmptyPayload: return "EmptyPayload";
    case ErrorCode::ProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::BadResponse: return "BadResponse";
    case ErrorCode::AuthFailure: return "AuthFailure";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::MalformedManifest: return "MalformedManifest";
    case ErrorCode::SinkFailure: return "SinkFailure";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::CrcMismatch: return "CrcMismatch";
    case ErrorCode::MalformedStore: return "MalformedStore";
    case ErrorCode::MissingMetadata: return "MissingMetadata";
    case ErrorCode::EmptyCandidateSet: return "EmptyCandidateSet";
    case ErrorCode::EmptyBriefing: return "EmptyBriefing";
    case ErrorCode::NoQueriesFound: return "NoQueriesFound";
    case ErrorCode::EmptyPlan: return "EmptyPlan";
    case ErrorCode::EmptyCatalog: return "EmptyCatalog";
    case ErrorCode::UnknownImageId: return "UnknownImageId";
    case ErrorCode::AlreadyPinned: return "AlreadyPinned";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::CatalogUnavailable: return "CatalogUnavailable";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::ImageMissing: return "ImageMissing";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace gaudi
