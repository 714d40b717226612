#include <doctest.h>

#include <map>
#include <sstream>

#include "gaudi/config.hpp"
#include "gaudi/error.hpp"

using namespace gaudi;

namespace {

Config parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

EnvLookup fake_env(std::map<std::string, std::string> vars) {
  return [vars = std::move(vars)](const std::string& name) -> std::optional<std::string> {
    const auto it = vars.find(name);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}

}  // namespace

TEST_CASE("config defaults") {
  const Config c;
  CHECK(c.provider == "mock");
  CHECK(c.dim == 512);
  CHECK(c.sampling.temperature == 0.7);
  CHECK(c.sampling.max_tokens == 80);
  CHECK_NOTHROW(validate(c));
}

TEST_CASE("config parsing") {
  const auto c = parse(
      "# comment\n"
      "provider = remote\n"
      "embed_url = \"http://127.0.0.1:9000/embed\"\n"
      "dim=768   # trailing comment\n"
      "\n"
      "temperature = 0.2\n"
      "max_tokens = 40\n"
      "bind_addr = 0.0.0.0:9090\n"
      "session_ttl_seconds = 30\n");
  CHECK(c.provider == "remote");
  CHECK(c.embed_url == "http://127.0.0.1:9000/embed");
  CHECK(c.dim == 768);
  CHECK(c.sampling.temperature == 0.2);
  CHECK(c.sampling.max_tokens == 40);
  CHECK(c.session_ttl_seconds == 30);
  CHECK_NOTHROW(validate(c));

  try {
    parse("dim = 4\ncolour = red\n");
    FAIL("expected InvalidConfig");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidConfig);
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse("dim = many\n"), Error);
  CHECK_THROWS_AS(parse("dim = 0\n"), Error);
  CHECK_THROWS_AS(parse("just words\n"), Error);
}

TEST_CASE("config validation") {
  Config c;
  c.provider = "remote";
  CHECK_THROWS_AS(validate(c), Error);
  c.embed_url = "http://x/embed";
  CHECK_NOTHROW(validate(c));
  c.sampling.top_p = 0.0;
  CHECK_THROWS_AS(validate(c), Error);
  c = Config{};
  c.bind_addr = "localhost";
  CHECK_THROWS_AS(validate(c), Error);
  c.provider = "clip";
  c.bind_addr = "127.0.0.1:1";
  CHECK_THROWS_AS(validate(c), Error);
}

TEST_CASE("environment overrides and credentials") {
  Config c;
  c.embed_url = "http://file/embed";
  apply_env(c, fake_env({{"GAUDI_EMBED_URL", "http://env/embed"}, {"GAUDI_LLM_URL", "http://env/llm"}}));
  CHECK(c.embed_url == "http://env/embed");
  CHECK(c.llm_url == "http://env/llm");

  CHECK(llm_key(c, fake_env({{"GAUDI_LLM_KEY", "sk-1"}})) == "sk-1");
  CHECK(llm_key(c, fake_env({})).empty());
  c.llm_key_env = "OTHER";
  CHECK(llm_key(c, fake_env({{"OTHER", "sk-2"}})) == "sk-2");
}

TEST_CASE("bind address") {
  const auto a = parse_bind_addr("127.0.0.1:8080");
  CHECK(a.host == "127.0.0.1");
  CHECK(a.port == 8080);
  CHECK(parse_bind_addr("[::1]:0").port == 0);
  CHECK_THROWS_AS(parse_bind_addr("host:99999"), Error);
  CHECK_THROWS_AS(parse_bind_addr("host:http"), Error);
  CHECK_THROWS_AS(parse_bind_addr(":80"), Error);
}
