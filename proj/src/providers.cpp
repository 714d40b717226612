#include <algorithm>
#include <cctype>
#include <cmath>

#include "gaudi/providers.hpp"

namespace gaudi {

std::string_view to_string(EmbedKind kind) noexcept {
  return kind == EmbedKind::Text ? "text" : "image";
}

Embedding EmbedProvider::embed_image(const ImageRecord& record) const {
  return embed({EmbedKind::Image, record.path});
}

void validate(const SamplingConfig& s) {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::InvalidInput, "sampling: " + what);
  };
  if (!(s.temperature >= 0.0 && s.temperature <= 2.0)) fail("temperature must be in [0, 2]");
  if (!(s.top_p > 0.0 && s.top_p <= 1.0)) fail("top_p must be in (0, 1]");
  if (s.max_tokens < 1) fail("max_tokens must be >= 1");
  if (!(std::abs(s.frequency_penalty) <= 2.0)) fail("frequency_penalty must be in [-2, 2]");
  if (!(std::abs(s.presence_penalty) <= 2.0)) fail("presence_penalty must be in [-2, 2]");
}

void validate(const CompletionRequest& request) {
  const bool blank = std::all_of(request.prompt.begin(), request.prompt.end(),
                                 [](unsigned char c) { return std::isspace(c) != 0; });
  if (blank) throw Error(ErrorCode::InvalidInput, "completion prompt is empty");
  validate(request.sampling);
}

}  // namespace gaudi
