#pragma once

// Embedding and completion provider contracts, with a remote HTTP client and
// a deterministic in-process mock for each.

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gaudi/embedding.hpp"
#include "gaudi/image_record.hpp"
#include "gaudi/sampling.hpp"

namespace gaudi {

enum class EmbedKind { Text, Image };

struct EmbedRequest {
  EmbedKind kind = EmbedKind::Text;
  /// Query text, or an image path/URI for EmbedKind::Image.
  std::string payload;
};

std::string_view to_string(EmbedKind kind) noexcept;

class EmbedProvider {
 public:
  virtual ~EmbedProvider() = default;

  /// Configured output dimension.
  virtual std::size_t dim() const noexcept = 0;

  /// Returns a unit-norm embedding of dim(). Throws EmptyPayload for a blank
  /// payload, BadResponse for a malformed result, ProviderUnavailable when the
  /// backend cannot be reached.
  virtual Embedding embed(const EmbedRequest& request) const = 0;

  /// Embeds an image record. Defaults to embed({Image, record.path}).
  virtual Embedding embed_image(const ImageRecord& record) const;

  Embedding embed_text(std::string_view text) const {
    return embed({EmbedKind::Text, std::string(text)});
  }
};

struct CompletionRequest {
  std::string prompt;
  SamplingConfig sampling;
  std::string model_id;
};

/// Throws InvalidInput for an empty prompt or out-of-range sampling.
void validate(const CompletionRequest& request);

class CompletionProvider {
 public:
  virtual ~CompletionProvider() = default;
  virtual std::string complete(const CompletionRequest& request) const = 0;
};

// ---------------------------------------------------------------------------
// Deterministic mock

/// FNV-1a, 64-bit.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// splitmix64 generator; each call advances the state and returns one output.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}
  std::uint64_t next() noexcept;

 private:
  std::uint64_t state_;
};

/// Maps a 64-bit output to [-1, 1) using its top 53 bits.
double unit_interval_signed(std::uint64_t x) noexcept;

/// Lowercases ASCII and splits on every byte outside [a-z0-9].
std::vector<std::string> mock_tokens(std::string_view text);

/// Sum of per-token pseudo-random vectors, L2-normalized. Falls back to e0
/// when there are no tokens or the sum vanishes.
Embedding mock_embed(std::string_view text, std::size_t dim);

/// Text used for a record under the mock: caption and tags joined by spaces.
std::string mock_image_text(const ImageRecord& record);

class MockEmbedder final : public EmbedProvider {
 public:
  explicit MockEmbedder(std::size_t dim);

  std::size_t dim() const noexcept override { return dim_; }
  Embedding embed(const EmbedRequest& request) const override;
  Embedding embed_image(const ImageRecord& record) const override;

 private:
  std::size_t dim_;
};

/// Returns fixture completions keyed by the FNV-1a hash of the prompt, or a
/// fallback for unknown prompts. Without a fallback an unknown prompt is a
/// BadResponse.
class MockCompleter final : public CompletionProvider {
 public:
  MockCompleter() = default;
  static MockCompleter always(std::string completion);

  void add(std::string_view prompt, std::string completion);
  void set_fallback(std::string completion) { fallback_ = std::move(completion); }

  std::string complete(const CompletionRequest& request) const override;

 private:
  std::map<std::uint64_t, std::string> by_prompt_hash_;
  std::optional<std::string> fallback_;
};

// ---------------------------------------------------------------------------
// Remote HTTP

/// Backoff before each retry. Only ProviderUnavailable failures are retried.
struct RetryPolicy {
  std::vector<std::chrono::milliseconds> backoff{std::chrono::milliseconds(100),
                                                 std::chrono::milliseconds(400)};
};

struct HttpEndpoint {
  std::string url;  // e.g. http://127.0.0.1:9000/embed
  std::chrono::milliseconds connect_timeout{5000};
  std::chrono::milliseconds read_timeout{60000};
  RetryPolicy retry;
};

/// scheme://host[:port] and the path component of a URL.
struct SplitUrl {
  std::string origin;
  std::string path;
};
SplitUrl split_url(std::string_view url);

/// POSTs {"kind","payload"} and expects {"values":[...]} of the configured dim.
class RemoteEmbedder final : public EmbedProvider {
 public:
  RemoteEmbedder(HttpEndpoint endpoint, std::size_t dim);

  std::size_t dim() const noexcept override { return dim_; }
  Embedding embed(const EmbedRequest& request) const override;

 private:
  HttpEndpoint endpoint_;
  std::size_t dim_;
};

/// OpenAI-compatible completions client. The bearer credential is required;
/// an empty key is an AuthFailure before any request is sent.
class RemoteCompleter final : public CompletionProvider {
 public:
  RemoteCompleter(HttpEndpoint endpoint, std::string api_key);

  std::string complete(const CompletionRequest& request) const override;

 private:
  HttpEndpoint endpoint_;
  std::string api_key_;
};

/// Request body sent by RemoteCompleter, exposed for inspection.
std::string completion_request_body(const CompletionRequest& request);

}  // namespace gaudi
