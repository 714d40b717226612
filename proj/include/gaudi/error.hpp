#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gaudi {

/// Every failure the library can raise. The service maps each code to exactly
/// one HTTP error; keep `kAllErrorCodes` in sync when adding a value.
enum class ErrorCode {
  InvalidInput,
  DimensionMismatch,
  ZeroVector,
  EmptyPayload,
  ProviderUnavailable,
  BadResponse,
  AuthFailure,
  DuplicateId,
  MalformedManifest,
  SinkFailure,
  BadMagic,
  UnsupportedVersion,
  CrcMismatch,
  MalformedStore,
  MissingMetadata,
  EmptyCandidateSet,
  EmptyBriefing,
  NoQueriesFound,
  EmptyPlan,
  EmptyCatalog,
  UnknownImageId,
  AlreadyPinned,
  UnknownSession,
  CatalogUnavailable,
  NotFound,
  ImageMissing,
  InvalidConfig,
};

inline constexpr std::array kAllErrorCodes = {
    ErrorCode::InvalidInput,       ErrorCode::DimensionMismatch,
    ErrorCode::ZeroVector,         ErrorCode::EmptyPayload,
    ErrorCode::ProviderUnavailable, ErrorCode::BadResponse,
    ErrorCode::AuthFailure,        ErrorCode::DuplicateId,
    ErrorCode::MalformedManifest,  ErrorCode::SinkFailure,
    ErrorCode::BadMagic,           ErrorCode::UnsupportedVersion,
    ErrorCode::CrcMismatch,        ErrorCode::MalformedStore,
    ErrorCode::MissingMetadata,    ErrorCode::EmptyCandidateSet,
    ErrorCode::EmptyBriefing,      ErrorCode::NoQueriesFound,
    ErrorCode::EmptyPlan,          ErrorCode::EmptyCatalog,
    ErrorCode::UnknownImageId,     ErrorCode::AlreadyPinned,
    ErrorCode::UnknownSession,     ErrorCode::CatalogUnavailable,
    ErrorCode::NotFound,           ErrorCode::ImageMissing,
    ErrorCode::InvalidConfig,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// Offending id for DuplicateId / UnknownImageId / MissingMetadata.
  const std::string& subject() const noexcept { return subject_; }
  /// 1-based manifest line for MalformedManifest.
  std::optional<std::size_t> line() const noexcept { return line_; }
  /// Records embedded before an ingest aborted.
  std::optional<std::size_t> progress() const noexcept { return progress_; }
  /// Suggested wait before retrying a ProviderUnavailable call.
  std::optional<std::chrono::milliseconds> retry_after() const noexcept {
    return retry_after_;
  }
  std::size_t attempts() const noexcept { return attempts_; }

  Error& with_subject(std::string id) {
    subject_ = std::move(id);
    return *this;
  }
  Error& with_line(std::size_t line) {
    line_ = line;
    return *this;
  }
  Error& with_progress(std::size_t n) {
    progress_ = n;
    return *this;
  }
  Error& with_retry(std::chrono::milliseconds after, std::size_t attempts) {
    retry_after_ = after;
    attempts_ = attempts;
    return *this;
  }

 private:
  ErrorCode code_;
  std::string subject_;
  std::optional<std::size_t> line_;
  std::optional<std::size_t> progress_;
  std::optional<std::chrono::milliseconds> retry_after_;
  std::size_t attempts_ = 0;
};

}  // namespace gaudi
