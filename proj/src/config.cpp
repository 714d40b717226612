#include "gaudi/config.hpp"

#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>

#include "gaudi/error.hpp"

namespace gaudi {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

Error config_error(std::size_t line, const std::string& what) {
  Error e(ErrorCode::InvalidConfig, "config line " + std::to_string(line) + ": " + what);
  e.with_line(line);
  return e;
}

template <typename T>
T parse_number(const std::string& text, std::size_t line) {
  try {
    std::size_t used = 0;
    T value;
    if constexpr (std::is_floating_point_v<T>) {
      value = static_cast<T>(std::stod(text, &used));
    } else {
      value = static_cast<T>(std::stoll(text, &used));
    }
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw config_error(line, "\"" + text + "\" is not a number");
  }
}

}  // namespace

Config parse_config(std::istream& in, Config config) {
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto text = trim(raw);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw config_error(line, "expected key = value");
    const auto key = trim(text.substr(0, eq));
    auto value = trim(text.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
        value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    } else if (const auto hash = value.find(" #"); hash != std::string::npos) {
      value = trim(value.substr(0, hash));
    }

    if (key == "provider") config.provider = value;
    else if (key == "embed_url") config.embed_url = value;
    else if (key == "llm_url") config.llm_url = value;
    else if (key == "llm_model") config.llm_model = value;
    else if (key == "llm_key_env") config.llm_key_env = value;
    else if (key == "llm_fixture") config.llm_fixture = value;
    else if (key == "dim") {
      const auto d = parse_number<long long>(value, line);
      if (d < 1) throw config_error(line, "dim must be >= 1");
      config.dim = static_cast<std::size_t>(d);
    }
    else if (key == "store_path") config.store_path = value;
    else if (key == "manifest_path") config.manifest_path = value;
    else if (key == "bind_addr") config.bind_addr = value;
    else if (key == "static_dir") config.static_dir = value;
    else if (key == "image_root") config.image_root = value;
    else if (key == "session_ttl_seconds") config.session_ttl_seconds = parse_number<std::int64_t>(value, line);
    else if (key == "temperature") config.sampling.temperature = parse_number<double>(value, line);
    else if (key == "top_p") config.sampling.top_p = parse_number<double>(value, line);
    else if (key == "max_tokens") config.sampling.max_tokens = parse_number<int>(value, line);
    else if (key == "frequency_penalty") config.sampling.frequency_penalty = parse_number<double>(value, line);
    else if (key == "presence_penalty") config.sampling.presence_penalty = parse_number<double>(value, line);
    else throw config_error(line, "unknown key \"" + key + "\"");
  }
  return config;
}

Config load_config_file(const std::string& path, Config base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open config " + path);
  return parse_config(in, std::move(base));
}

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str()); v != nullptr) return std::string(v);
  return std::nullopt;
}

void apply_env(Config& config, const EnvLookup& env) {
  if (auto v = env("GAUDI_EMBED_URL"); v && !v->empty()) config.embed_url = *v;
  if (auto v = env("GAUDI_LLM_URL"); v && !v->empty()) config.llm_url = *v;
}

std::string llm_key(const Config& config, const EnvLookup& env) {
  if (config.llm_key_env.empty()) return {};
  return env(config.llm_key_env).value_or("");
}

BindAddress parse_bind_addr(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    throw Error(ErrorCode::InvalidConfig, "bind_addr must be host:port, got \"" + addr + "\"");
  }
  BindAddress out{addr.substr(0, colon), 0};
  try {
    std::size_t used = 0;
    out.port = std::stoi(addr.substr(colon + 1), &used);
    if (used != addr.size() - colon - 1) throw std::invalid_argument(addr);
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidConfig, "bad port in bind_addr \"" + addr + "\"");
  }
  if (out.port < 0 || out.port > 65535) {
    throw Error(ErrorCode::InvalidConfig, "port out of range in bind_addr \"" + addr + "\"");
  }
  return out;
}

void validate(const Config& config) {
  if (config.dim < 1) throw Error(ErrorCode::InvalidConfig, "dim must be >= 1");
  if (config.provider != "mock" && config.provider != "remote") {
    throw Error(ErrorCode::InvalidConfig, "provider must be \"mock\" or \"remote\"");
  }
  if (config.provider == "remote" && config.embed_url.empty()) {
    throw Error(ErrorCode::InvalidConfig, "remote provider needs embed_url or GAUDI_EMBED_URL");
  }
  if (config.session_ttl_seconds < 1) {
    throw Error(ErrorCode::InvalidConfig, "session_ttl_seconds must be >= 1");
  }
  try {
    gaudi::validate(config.sampling);
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  parse_bind_addr(config.bind_addr);
}

}  // namespace gaudi
