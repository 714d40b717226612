#pragma once

// HTTP API over a loaded catalog:
//
//   POST /v1/sessions                         -> {"session_id"}
//   GET  /v1/sessions/{id}                    -> {"session_id","pinned","history_length"}
//   POST /v1/sessions/{id}/pins     {image_id}               -> {"pinned":[...]}
//   POST /v1/sessions/{id}/search   {text, k}                -> {"hits":[...]}
//   POST /v1/sessions/{id}/compose  {reference_image_id, text, k} -> {"hits":[...]}
//   POST /v1/sessions/{id}/board    {briefing, mode, k_per_query} -> board document
//   GET  /v1/images/{image_id}                -> bytes, or 302 to a remote URI
//
// Errors are {"error":{"code","message"}} with the status from api_error().

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "gaudi/board.hpp"
#include "gaudi/catalog.hpp"
#include "gaudi/error.hpp"
#include "gaudi/providers.hpp"
#include "gaudi/story.hpp"

namespace httplib {
class Server;
}

namespace gaudi {

struct ApiError {
  std::string code;
  int http_status = 500;
};

/// One mapping per ErrorCode: 4xx for caller faults, 5xx for provider and
/// system faults.
ApiError api_error(ErrorCode code);

struct ServiceOptions {
  std::chrono::seconds session_ttl{std::chrono::hours(2)};
  std::string model_id{kDefaultModel};
  SamplingConfig sampling;
  StoryExample example = coffee_brand_example();
  /// Base directory for relative image paths.
  std::string image_root;
  std::size_t max_k = 100;
  std::size_t default_k = 10;
  std::function<std::chrono::steady_clock::time_point()> clock = [] {
    return std::chrono::steady_clock::now();
  };
};

class Service {
 public:
  /// `llm` may be null; board requests then fail with provider_unavailable.
  Service(std::shared_ptr<const EmbedProvider> embedder,
          std::shared_ptr<const CompletionProvider> llm, ServiceOptions options = {});

  void set_catalog(std::shared_ptr<const Catalog> catalog);
  std::shared_ptr<const Catalog> catalog() const;

  /// Registers every /v1 route on `server`.
  void mount(httplib::Server& server);

  /// Live sessions after evicting idle ones.
  std::size_t session_count();

 private:
  struct Slot {
    std::mutex mutex;
    Session session;
    std::chrono::steady_clock::time_point last_used;
  };

  std::shared_ptr<const Catalog> require_catalog() const;
  std::shared_ptr<Slot> create_session();
  std::shared_ptr<Slot> find_session(const std::string& id);
  void evict_idle_locked(std::chrono::steady_clock::time_point now);

  std::shared_ptr<const EmbedProvider> embedder_;
  std::shared_ptr<const CompletionProvider> llm_;
  ServiceOptions options_;

  mutable std::shared_mutex catalog_mutex_;
  std::shared_ptr<const Catalog> catalog_;

  std::mutex sessions_mutex_;
  std::unordered_map<std::string, std::shared_ptr<Slot>> sessions_;
};

/// Content type inferred from a file extension.
std::string content_type_for(const std::string& path);

}  // namespace gaudi
