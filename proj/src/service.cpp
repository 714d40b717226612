#include "gaudi/service.hpp"

#include <filesystem>
#include <fstream>
#include <iterator>

#include <httplib.h>
#include <json.hpp>

namespace gaudi {
namespace {

using Json = nlohmann::ordered_json;

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code,
                const std::string& message) {
  Json body;
  body["error"]["code"] = code;
  body["error"]["message"] = message;
  send_json(res, status, body);
}

Error invalid_request(const std::string& message) {
  return Error(ErrorCode::InvalidInput, message);
}

Json parse_request(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  try {
    auto body = Json::parse(req.body);
    if (!body.is_object()) throw invalid_request("request body must be a JSON object");
    return body;
  } catch (const Json::exception& e) {
    throw invalid_request(std::string("request body is not valid JSON: ") + e.what());
  }
}

std::string string_field(const Json& body, const char* key, bool required = true) {
  const auto it = body.find(key);
  if (it == body.end() || it->is_null()) {
    if (required) throw invalid_request(std::string("missing \"") + key + "\"");
    return {};
  }
  if (!it->is_string()) throw invalid_request(std::string("\"") + key + "\" must be a string");
  return it->get<std::string>();
}

std::size_t int_field(const Json& body, const char* key, std::size_t fallback, std::size_t lo,
                      std::size_t hi) {
  const auto it = body.find(key);
  if (it == body.end() || it->is_null()) return fallback;
  if (!it->is_number_integer()) throw invalid_request(std::string("\"") + key + "\" must be an integer");
  const auto v = it->get<long long>();
  if (v < static_cast<long long>(lo) || v > static_cast<long long>(hi)) {
    throw invalid_request(std::string("\"") + key + "\" must be in [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
  }
  return static_cast<std::size_t>(v);
}

bool is_blank(const std::string& s) {
  return s.find_first_not_of(" \t\r\n\f\v") == std::string::npos;
}

bool is_remote_uri(const std::string& path) {
  return path.starts_with("http://") || path.starts_with("https://");
}

Json hits_json(const std::vector<Hit>& hits, const Catalog& catalog) {
  Json arr = Json::array();
  for (const auto& h : hits) {
    Json j;
    j["image_id"] = h.image_id;
    j["path"] = catalog.record(*catalog.find(h.image_id)).path;
    j["score"] = round_score(h.score);
    j["rank"] = h.rank;
    arr.push_back(std::move(j));
  }
  Json body;
  body["hits"] = std::move(arr);
  return body;
}

/// Runs a handler, translating library errors into API errors.
template <typename Handler>
httplib::Server::Handler guarded(Handler handler) {
  return [handler = std::move(handler)](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const Error& e) {
      const auto api = api_error(e.code());
      send_error(res, api.http_status, api.code, e.what());
      if (e.retry_after()) {
        const auto secs = (e.retry_after()->count() + 999) / 1000;
        res.set_header("Retry-After", std::to_string(secs));
      }
    } catch (const std::exception& e) {
      send_error(res, 500, "internal_error", e.what());
    }
  };
}

}  // namespace

ApiError api_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return {"invalid_request", 422};
    case ErrorCode::DimensionMismatch: return {"dimension_mismatch", 500};
    case ErrorCode::ZeroVector: return {"zero_vector", 422};
    case ErrorCode::EmptyPayload: return {"empty_text", 422};
    case ErrorCode::ProviderUnavailable: return {"provider_unavailable", 502};
    case ErrorCode::BadResponse: return {"bad_provider_response", 502};
    case ErrorCode::AuthFailure: return {"provider_auth_failure", 502};
    case ErrorCode::DuplicateId: return {"duplicate_id", 422};
    case ErrorCode::MalformedManifest: return {"malformed_manifest", 422};
    case ErrorCode::SinkFailure: return {"io_failure", 500};
    case ErrorCode::BadMagic: return {"bad_store_magic", 500};
    case ErrorCode::UnsupportedVersion: return {"unsupported_store_version", 500};
    case ErrorCode::CrcMismatch: return {"store_checksum_mismatch", 500};
    case ErrorCode::MalformedStore: return {"malformed_store", 500};
    case ErrorCode::MissingMetadata: return {"missing_metadata", 500};
    case ErrorCode::EmptyCandidateSet: return {"empty_candidate_set", 409};
    case ErrorCode::EmptyBriefing: return {"empty_briefing", 422};
    case ErrorCode::NoQueriesFound: return {"no_queries_found", 422};
    case ErrorCode::EmptyPlan: return {"empty_plan", 422};
    case ErrorCode::EmptyCatalog: return {"empty_catalog", 409};
    case ErrorCode::UnknownImageId: return {"unknown_image", 422};
    case ErrorCode::AlreadyPinned: return {"already_pinned", 409};
    case ErrorCode::UnknownSession: return {"unknown_session", 404};
    case ErrorCode::CatalogUnavailable: return {"catalog_unavailable", 503};
    case ErrorCode::NotFound: return {"not_found", 404};
    case ErrorCode::ImageMissing: return {"image_missing", 410};
    case ErrorCode::InvalidConfig: return {"invalid_config", 500};
  }
  return {"internal_error", 500};
}

std::string content_type_for(const std::string& path) {
  auto ext = std::filesystem::path(path).extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".png") return "image/png";
  if (ext == ".gif") return "image/gif";
  if (ext == ".webp") return "image/webp";
  if (ext == ".bmp") return "image/bmp";
  if (ext == ".svg") return "image/svg+xml";
  return "application/octet-stream";
}

Service::Service(std::shared_ptr<const EmbedProvider> embedder,
                 std::shared_ptr<const CompletionProvider> llm, ServiceOptions options)
    : embedder_(std::move(embedder)), llm_(std::move(llm)), options_(std::move(options)) {
  if (!embedder_) throw Error(ErrorCode::InvalidConfig, "service needs an embedding provider");
  validate(options_.sampling);
}

void Service::set_catalog(std::shared_ptr<const Catalog> catalog) {
  if (catalog && catalog->dim() != embedder_->dim()) {
    detail::throw_dimension_mismatch(static_cast<Eigen::Index>(catalog->dim()),
                                     static_cast<Eigen::Index>(embedder_->dim()));
  }
  std::unique_lock lock(catalog_mutex_);
  catalog_ = std::move(catalog);
}

std::shared_ptr<const Catalog> Service::catalog() const {
  std::shared_lock lock(catalog_mutex_);
  return catalog_;
}

std::shared_ptr<const Catalog> Service::require_catalog() const {
  auto c = catalog();
  if (!c) throw Error(ErrorCode::CatalogUnavailable, "no catalog is loaded");
  return c;
}

void Service::evict_idle_locked(std::chrono::steady_clock::time_point now) {
  std::erase_if(sessions_, [&](const auto& kv) {
    return now - kv.second->last_used > options_.session_ttl;
  });
}

std::shared_ptr<Service::Slot> Service::create_session() {
  auto slot = std::make_shared<Slot>();
  slot->session = new_session();
  std::lock_guard lock(sessions_mutex_);
  const auto now = options_.clock();
  evict_idle_locked(now);
  slot->last_used = now;
  sessions_.emplace(slot->session.id, slot);
  return slot;
}

std::shared_ptr<Service::Slot> Service::find_session(const std::string& id) {
  std::lock_guard lock(sessions_mutex_);
  const auto now = options_.clock();
  evict_idle_locked(now);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, "unknown or expired session");
  it->second->last_used = now;
  return it->second;
}

std::size_t Service::session_count() {
  std::lock_guard lock(sessions_mutex_);
  evict_idle_locked(options_.clock());
  return sessions_.size();
}

void Service::mount(httplib::Server& server) {
  server.Post("/v1/sessions", guarded([this](const httplib::Request&, httplib::Response& res) {
    require_catalog();
    auto slot = create_session();
    Json body;
    body["session_id"] = slot->session.id;
    send_json(res, 201, body);
  }));

  server.Get(R"(/v1/sessions/([^/]+))",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               auto slot = find_session(req.matches[1]);
               std::lock_guard lock(slot->mutex);
               Json body;
               body["session_id"] = slot->session.id;
               body["pinned"] = slot->session.pinned;
               body["history_length"] = slot->session.history.size();
               send_json(res, 200, body);
             }));

  server.Post(R"(/v1/sessions/([^/]+)/pins)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const auto catalog = require_catalog();
                auto slot = find_session(req.matches[1]);
                const auto body = parse_request(req);
                const auto image_id = string_field(body, "image_id");
                std::lock_guard lock(slot->mutex);
                pin(slot->session, *catalog, image_id);
                Json out;
                out["pinned"] = slot->session.pinned;
                send_json(res, 200, out);
              }));

  server.Post(R"(/v1/sessions/([^/]+)/search)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const auto catalog = require_catalog();
                auto slot = find_session(req.matches[1]);
                const auto body = parse_request(req);
                const auto text = string_field(body, "text");
                if (is_blank(text)) throw invalid_request("\"text\" must not be empty");
                const auto k = int_field(body, "k", options_.default_k, 1, options_.max_k);
                std::lock_guard lock(slot->mutex);
                const auto hits = search(slot->session, *catalog, *embedder_, text, k);
                send_json(res, 200, hits_json(hits, *catalog));
              }));

  server.Post(R"(/v1/sessions/([^/]+)/compose)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const auto catalog = require_catalog();
                auto slot = find_session(req.matches[1]);
                const auto body = parse_request(req);
                const auto reference = string_field(body, "reference_image_id");
                const auto text = string_field(body, "text");
                if (is_blank(text)) throw invalid_request("\"text\" must not be empty");
                const auto k = int_field(body, "k", options_.default_k, 1, options_.max_k);
                std::lock_guard lock(slot->mutex);
                const auto hits = refine(slot->session, *catalog, *embedder_, reference, text, k);
                send_json(res, 200, hits_json(hits, *catalog));
              }));

  server.Post(R"(/v1/sessions/([^/]+)/board)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const auto catalog = require_catalog();
                auto slot = find_session(req.matches[1]);
                const auto body = parse_request(req);
                const auto briefing = string_field(body, "briefing");
                if (is_blank(briefing)) throw Error(ErrorCode::EmptyBriefing, "briefing is empty");
                const auto mode_name = string_field(body, "mode", false);
                const auto mode = mode_name.empty() ? BoardMode::TextPerQuery
                                                    : parse_board_mode(mode_name);
                const auto k_per_query = int_field(body, "k_per_query", 1, 1, options_.max_k);
                if (!llm_) throw Error(ErrorCode::ProviderUnavailable, "no language model configured");

                std::lock_guard lock(slot->mutex);
                const auto plan = generate_queries(*llm_, options_.example, briefing,
                                                   options_.sampling, options_.model_id);
                const auto board = generate_board(*catalog, *embedder_, plan, mode, k_per_query);
                auto doc = board_to_json(board, *catalog);
                doc["unfilled"] = board.unfilled;
                doc["plan"]["queries"] = plan.queries;
                doc["plan"]["raw_completion"] = plan.raw_completion;
                send_json(res, 200, doc);
              }));

  server.Get(R"(/v1/images/(.+))",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               const auto catalog = require_catalog();
               const std::string id = req.matches[1];
               const auto pos = catalog->find(id);
               if (!pos) throw Error(ErrorCode::NotFound, "unknown image id \"" + id + "\"");
               const auto& path = catalog->record(*pos).path;
               if (is_remote_uri(path)) {
                 res.set_redirect(path, 302);
                 return;
               }
               std::filesystem::path file(path);
               if (file.is_relative() && !options_.image_root.empty()) {
                 file = std::filesystem::path(options_.image_root) / file;
               }
               std::ifstream in(file, std::ios::binary);
               if (!in) throw Error(ErrorCode::ImageMissing, "image file is missing: " + path);
               std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
               res.status = 200;
               res.set_content(std::move(bytes), content_type_for(path));
             }));
}

}  // namespace gaudi
