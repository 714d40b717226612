#include <doctest.h>

#include <fstream>
#include <sstream>

#include "gaudi/story.hpp"

using namespace gaudi;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(GAUDI_FIXTURES) + "/" + name, std::ios::binary);
  REQUIRE(in);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

const char* kYoga =
    "You're designing a new yoga kit for a highend company that is famous for its athletic clothes.";

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected gaudi::Error");
  return ErrorCode::InvalidInput;
}

}  // namespace

TEST_CASE("coffee example is the designer's ten queries") {
  const auto& ex = coffee_brand_example();
  CHECK(ex.queries.size() == 10);
  CHECK(ex.queries[8] == ex.queries[9]);
}

TEST_CASE("prompt matches the golden fixture") {
  CHECK(build_prompt(coffee_brand_example(), kYoga) == slurp("yoga_prompt.txt"));
  // Surrounding whitespace in the briefing is trimmed.
  CHECK(build_prompt(coffee_brand_example(), std::string("  ") + kYoga + " \t") ==
        slurp("yoga_prompt.txt"));
}

TEST_CASE("minimal prompt") {
  const StoryExample ex{"B", {"I'm looking for Q."}};
  CHECK(build_prompt(ex, "X") == "B =>\nI'm looking for Q.\nX =>\n");
  CHECK(build_prompt(ex, "X") != build_prompt(ex, "Y"));
  CHECK(code_of([&] { build_prompt(ex, "   "); }) == ErrorCode::EmptyBriefing);
  CHECK(code_of([&] { build_prompt(ex, "two\nlines"); }) == ErrorCode::InvalidInput);
}

TEST_CASE("parser on the yoga completion") {
  const auto queries = parse_queries(slurp("yoga_completion.txt"));
  REQUIRE(queries.size() == 7);
  CHECK(queries.front() == "I'm looking for photos of trees and grass.");
  CHECK(queries[1] == "I'm looking for photos of water.");
  CHECK(queries.back() == "I'm looking for images of women practicing yoga in nature.");
}

TEST_CASE("parser rules") {
  CHECK(code_of([] { parse_queries("garbage text with no marker"); }) == ErrorCode::NoQueriesFound);
  CHECK(code_of([] { parse_queries(""); }) == ErrorCode::NoQueriesFound);

  CHECK(parse_queries("I'm looking for photos of A. You're designing a new thing => I'm looking for B.") ==
        std::vector<std::string>{"I'm looking for photos of A."});

  // A continuation cut off by the token limit leaves a partial last sentence.
  CHECK(parse_queries("I'm looking for photos of A.\nI'm looking for photos of tre") ==
        std::vector<std::string>{"I'm looking for photos of A."});

  CHECK(parse_queries("i'm looking for x. Some chatter. I'm looking for x.") ==
        std::vector<std::string>{"i'm looking for x.", "I'm looking for x."});
  CHECK(parse_queries("\n\n  I'm looking for y.\r\n") == std::vector<std::string>{"I'm looking for y."});
}

TEST_CASE("generate_queries composes prompt, completion and parse") {
  MockCompleter llm;
  const auto prompt = build_prompt(coffee_brand_example(), kYoga);
  llm.add(prompt, slurp("yoga_completion.txt"));
  const auto plan = generate_queries(llm, coffee_brand_example(), kYoga, SamplingConfig{});
  CHECK(plan.briefing == kYoga);
  CHECK(plan.queries.size() == 7);
  CHECK(plan.raw_completion == slurp("yoga_completion.txt"));
  CHECK(generate_queries(llm, coffee_brand_example(), kYoga, SamplingConfig{}) == plan);

  const auto empty = MockCompleter::always("");
  CHECK(code_of([&] { generate_queries(empty, coffee_brand_example(), kYoga, SamplingConfig{}); }) ==
        ErrorCode::NoQueriesFound);

  SamplingConfig hot;
  hot.temperature = 2.5;
  CHECK(code_of([&] { generate_queries(llm, coffee_brand_example(), kYoga, hot); }) ==
        ErrorCode::InvalidInput);
}
