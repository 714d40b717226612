#include "gaudi/providers.hpp"

#include <cmath>
#include <thread>

// After Eigen: resolv.h, pulled in by httplib, defines a `_res` macro.
#include <httplib.h>
#include <json.hpp>

namespace gaudi {
namespace {

using nlohmann::json;
using std::chrono::milliseconds;

struct HttpReply {
  int status = 0;
  std::string body;
  std::optional<milliseconds> retry_after;
};

std::optional<milliseconds> parse_retry_after(const httplib::Response& res) {
  if (!res.has_header("Retry-After")) return std::nullopt;
  try {
    return milliseconds(static_cast<long long>(std::stod(res.get_header_value("Retry-After")) * 1000));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

HttpReply post_json(const HttpEndpoint& endpoint, const std::string& body,
                    const httplib::Headers& headers) {
  const auto url = split_url(endpoint.url);
  httplib::Client client(url.origin);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(endpoint.connect_timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(endpoint.read_timeout));
  auto res = client.Post(url.path, headers, body, "application/json");
  if (!res) {
    throw Error(ErrorCode::ProviderUnavailable,
                "request to " + endpoint.url + " failed: " + httplib::to_string(res.error()));
  }
  return {res->status, res->body, parse_retry_after(*res)};
}

/// Turns non-2xx statuses into errors.
void check_status(const HttpEndpoint& endpoint, const HttpReply& reply) {
  const auto where = endpoint.url + " returned HTTP " + std::to_string(reply.status);
  if (reply.status == 401 || reply.status == 403) {
    throw Error(ErrorCode::AuthFailure, where + ": credential rejected");
  }
  if (reply.status == 429 || reply.status >= 500) {
    Error e(ErrorCode::ProviderUnavailable, where);
    if (reply.retry_after) e.with_retry(*reply.retry_after, 0);
    throw e;
  }
  if (reply.status < 200 || reply.status >= 300) {
    throw Error(ErrorCode::BadResponse, where);
  }
}

template <typename Attempt>
auto with_retries(const RetryPolicy& policy, Attempt&& attempt) {
  std::size_t attempts = 0;
  for (;;) {
    ++attempts;
    try {
      return attempt();
    } catch (Error& e) {
      if (e.code() != ErrorCode::ProviderUnavailable) throw;
      if (attempts > policy.backoff.size()) {
        const auto hint = e.retry_after().value_or(
            policy.backoff.empty() ? milliseconds(0) : policy.backoff.back());
        e.with_retry(hint, attempts);
        throw;
      }
      std::this_thread::sleep_for(policy.backoff[attempts - 1]);
    }
  }
}

json parse_body(const HttpEndpoint& endpoint, const std::string& body) {
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadResponse, endpoint.url + " returned invalid JSON: " + e.what());
  }
}

}  // namespace

SplitUrl split_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw Error(ErrorCode::InvalidConfig, "URL needs a scheme: " + std::string(url));
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string_view::npos) return {std::string(url), "/"};
  return {std::string(url.substr(0, path_start)), std::string(url.substr(path_start))};
}

RemoteEmbedder::RemoteEmbedder(HttpEndpoint endpoint, std::size_t dim)
    : endpoint_(std::move(endpoint)), dim_(dim) {
  if (dim_ == 0) throw Error(ErrorCode::InvalidConfig, "embedding dimension must be >= 1");
  split_url(endpoint_.url);
}

Embedding RemoteEmbedder::embed(const EmbedRequest& request) const {
  if (request.payload.find_first_not_of(" \t\r\n\f\v") == std::string::npos) {
    throw Error(ErrorCode::EmptyPayload, "embed payload is empty");
  }
  const json body = {{"kind", to_string(request.kind)}, {"payload", request.payload}};
  const auto reply = with_retries(endpoint_.retry, [&] {
    auto r = post_json(endpoint_, body.dump(), {});
    check_status(endpoint_, r);
    return r;
  });

  const auto doc = parse_body(endpoint_, reply.body);
  if (!doc.is_object() || !doc.contains("values") || !doc["values"].is_array()) {
    throw Error(ErrorCode::BadResponse, "embedding response lacks a values array");
  }
  const auto& values = doc["values"];
  if (values.size() != dim_) {
    throw Error(ErrorCode::BadResponse, "embedding response has dim " +
                                            std::to_string(values.size()) + ", expected " +
                                            std::to_string(dim_));
  }
  DenseVector<double> v(static_cast<Eigen::Index>(dim_));
  for (std::size_t i = 0; i < dim_; ++i) {
    if (!values[i].is_number()) throw Error(ErrorCode::BadResponse, "embedding value is not a number");
    v[static_cast<Eigen::Index>(i)] = values[i].get<double>();
  }
  if (!v.allFinite()) throw Error(ErrorCode::BadResponse, "embedding has non-finite values");
  if (ordered_norm(v) < kZeroNormThreshold) {
    throw Error(ErrorCode::BadResponse, "embedding response is the zero vector");
  }
  return l2_normalize(Embedding(std::move(v)));
}

std::string completion_request_body(const CompletionRequest& request) {
  nlohmann::ordered_json body;
  body["model"] = request.model_id;
  body["prompt"] = request.prompt;
  body["temperature"] = request.sampling.temperature;
  body["top_p"] = request.sampling.top_p;
  body["max_tokens"] = request.sampling.max_tokens;
  body["frequency_penalty"] = request.sampling.frequency_penalty;
  body["presence_penalty"] = request.sampling.presence_penalty;
  return body.dump();
}

RemoteCompleter::RemoteCompleter(HttpEndpoint endpoint, std::string api_key)
    : endpoint_(std::move(endpoint)), api_key_(std::move(api_key)) {
  split_url(endpoint_.url);
}

std::string RemoteCompleter::complete(const CompletionRequest& request) const {
  validate(request);
  if (api_key_.empty()) throw Error(ErrorCode::AuthFailure, "no LLM credential configured");

  const auto body = completion_request_body(request);
  const httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};
  const auto reply = with_retries(endpoint_.retry, [&] {
    auto r = post_json(endpoint_, body, headers);
    check_status(endpoint_, r);
    return r;
  });

  const auto doc = parse_body(endpoint_, reply.body);
  std::string text;
  try {
    text = doc.at("choices").at(0).at("text").get<std::string>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::BadResponse, "completion response lacks choices[0].text");
  }
  if (text.empty()) throw Error(ErrorCode::BadResponse, "completion is empty");
  return text;
}

}  // namespace gaudi
