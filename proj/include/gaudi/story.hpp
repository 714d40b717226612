#pragma once

// Single-shot prompting: one worked briefing => queries example, then the new
// briefing, and a parser that pulls "I'm looking for ..." sentences out of the
// model's continuation.

#include <string>
#include <string_view>
#include <vector>

#include "gaudi/providers.hpp"
#include "gaudi/sampling.hpp"

namespace gaudi {

struct StoryExample {
  std::string briefing;
  std::vector<std::string> queries;
};

struct QueryPlan {
  std::string briefing;
  std::vector<std::string> queries;
  std::string raw_completion;

  friend bool operator==(const QueryPlan&, const QueryPlan&) = default;
};

/// Built-in example: the eco-friendly coffee brand briefing and the ten
/// queries a designer made for it (one repeated, kept verbatim).
const StoryExample& coffee_brand_example();

inline constexpr std::string_view kDefaultModel = "davinci-002";

/// Layout, LF line endings:
///   <example briefing> =>
///   <example query 1>
///   ...
///   <new briefing> =>
/// Briefings and queries are trimmed; none may contain a line break.
/// Throws EmptyBriefing or InvalidInput.
std::string build_prompt(const StoryExample& example, std::string_view new_briefing);

/// Sentences end at "." or a line break. Keeps complete sentences starting
/// with "I'm looking for" (leading "i" accepted in either case) and stops at
/// the first sentence starting with "You're designing". Order and duplicates
/// are preserved. Throws NoQueriesFound when nothing qualifies.
std::vector<std::string> parse_queries(std::string_view completion);

QueryPlan generate_queries(const CompletionProvider& llm, const StoryExample& example,
                           std::string_view briefing, const SamplingConfig& sampling,
                           std::string_view model_id = kDefaultModel);

}  // namespace gaudi
