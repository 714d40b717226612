#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "gaudi/sampling.hpp"

namespace gaudi {

/// Operator configuration. Precedence: command-line flags over environment
/// over config file over these defaults.
struct Config {
  std::string provider = "mock";  // "mock" or "remote" embeddings
  std::string embed_url;
  std::string llm_url;
  std::string llm_model = "davinci-002";
  /// Name of the environment variable holding the LLM credential.
  std::string llm_key_env = "GAUDI_LLM_KEY";
  std::string llm_fixture;  // completion file replacing the LLM call
  std::size_t dim = 512;
  std::string store_path;
  std::string manifest_path;
  std::string bind_addr = "127.0.0.1:8080";
  std::string static_dir;
  std::string image_root;
  std::int64_t session_ttl_seconds = 7200;
  SamplingConfig sampling;
};

/// Flat `key = value` lines; `#` starts a comment; values may be quoted.
/// Throws InvalidConfig naming the line for unknown keys or bad values.
Config parse_config(std::istream& in, Config base = {});
Config load_config_file(const std::string& path, Config base = {});

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads the process environment.
std::optional<std::string> process_env(const std::string& name);

/// GAUDI_EMBED_URL and GAUDI_LLM_URL override the URLs.
void apply_env(Config& config, const EnvLookup& env = process_env);

/// Credential from the variable named by llm_key_env; empty when unset.
std::string llm_key(const Config& config, const EnvLookup& env = process_env);

struct BindAddress {
  std::string host;
  int port = 0;
};
BindAddress parse_bind_addr(const std::string& addr);

/// Throws InvalidConfig for a zero dim, unknown provider or bad sampling.
void validate(const Config& config);

}  // namespace gaudi
