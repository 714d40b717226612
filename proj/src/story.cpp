#include "gaudi/story.hpp"

namespace gaudi {
namespace {

constexpr std::string_view kWhitespace = " \t\r\n\f\v";
constexpr std::string_view kQueryMarker = "'m looking for";
constexpr std::string_view kStopMarker = "You're designing";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(kWhitespace);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(kWhitespace);
  return s.substr(first, last - first + 1);
}

std::string prompt_line(std::string_view text, const char* what) {
  const auto t = trim(text);
  if (t.find_first_of("\r\n") != std::string_view::npos) {
    throw Error(ErrorCode::InvalidInput, std::string(what) + " must be a single line");
  }
  return std::string(t);
}

bool is_query(std::string_view sentence) {
  return sentence.size() > kQueryMarker.size() && (sentence[0] == 'I' || sentence[0] == 'i') &&
         sentence.substr(1, kQueryMarker.size()) == kQueryMarker;
}

}  // namespace

const StoryExample& coffee_brand_example() {
  static const StoryExample example{
      "You're designing a new ecofriendly, highend coffee brand that is notorious for its "
      "floral flavors.",
      {
          "I'm looking for photos of women sipping coffee.",
          "I'm looking for photos of joyful coffee packages.",
          "I'm looking for photos of coffee cups and books.",
          "I'm looking for photos of luxury coffee shops with plants.",
          "I'm looking for images of floral packaging.",
          "I'm looking for images of floral packaging that seems a bit more craft.",
          "I'm looking for images of blue, floral packaging that seems a bit more craft.",
          "I'm looking for images of classy, colored, craft packaging.",
          "I'm looking for images of posters with blue birds and flowers.",
          "I'm looking for images of posters with blue birds and flowers.",
      }};
  return example;
}

std::string build_prompt(const StoryExample& example, std::string_view new_briefing) {
  const auto example_briefing = prompt_line(example.briefing, "example briefing");
  const auto briefing = prompt_line(new_briefing, "briefing");
  if (example_briefing.empty() || briefing.empty()) {
    throw Error(ErrorCode::EmptyBriefing, "briefing is empty");
  }
  if (example.queries.empty()) {
    throw Error(ErrorCode::InvalidInput, "story example needs at least one query");
  }

  std::string prompt = example_briefing + " =>\n";
  for (const auto& q : example.queries) {
    const auto line = prompt_line(q, "example query");
    if (line.empty()) throw Error(ErrorCode::InvalidInput, "story example has an empty query");
    prompt += line;
    prompt += '\n';
  }
  prompt += briefing + " =>\n";
  return prompt;
}

std::vector<std::string> parse_queries(std::string_view completion) {
  std::vector<std::string> queries;
  std::size_t start = 0;
  for (std::size_t i = 0; i < completion.size(); ++i) {
    const char c = completion[i];
    if (c != '.' && c != '\n') continue;

    const bool complete = c == '.';
    const auto sentence = trim(completion.substr(start, i - start + (complete ? 1 : 0)));
    start = i + 1;
    if (sentence.empty()) continue;
    if (sentence.starts_with(kStopMarker)) break;
    // A sentence cut by a line break before its period is incomplete.
    if (complete && is_query(sentence)) queries.emplace_back(sentence);
  }
  if (queries.empty()) {
    throw Error(ErrorCode::NoQueriesFound, "completion contains no \"I'm looking for\" queries");
  }
  return queries;
}

QueryPlan generate_queries(const CompletionProvider& llm, const StoryExample& example,
                           std::string_view briefing, const SamplingConfig& sampling,
                           std::string_view model_id) {
  CompletionRequest request{build_prompt(example, briefing), sampling, std::string(model_id)};
  validate(request);
  auto completion = llm.complete(request);
  auto queries = parse_queries(completion);
  return {std::string(trim(briefing)), std::move(queries), std::move(completion)};
}

}  // namespace gaudi
