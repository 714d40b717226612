#include <algorithm>
#include <cctype>

#include "gaudi/providers.hpp"

namespace gaudi {

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t SplitMix64::next() noexcept {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double unit_interval_signed(std::uint64_t x) noexcept {
  return static_cast<double>(x >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

std::vector<std::string> mock_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    const char lower = (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : raw;
    if ((lower >= 'a' && lower <= 'z') || (lower >= '0' && lower <= '9')) {
      current.push_back(lower);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Embedding mock_embed(std::string_view text, std::size_t dim) {
  if (dim == 0) throw Error(ErrorCode::InvalidInput, "mock dimension must be >= 1");
  const auto d = static_cast<Eigen::Index>(dim);
  DenseVector<double> sum = DenseVector<double>::Zero(d);
  for (const auto& token : mock_tokens(text)) {
    SplitMix64 rng(fnv1a64(token));
    for (Eigen::Index i = 0; i < d; ++i) sum[i] += unit_interval_signed(rng.next());
  }
  if (ordered_norm(sum) < kZeroNormThreshold) {
    DenseVector<double> e0 = DenseVector<double>::Zero(d);
    e0[0] = 1.0;
    return Embedding(std::move(e0));
  }
  return l2_normalize(Embedding(std::move(sum)));
}

std::string mock_image_text(const ImageRecord& record) {
  std::string text = record.caption;
  for (const auto& tag : record.tags) {
    if (!text.empty()) text.push_back(' ');
    text += tag;
  }
  return text;
}

MockEmbedder::MockEmbedder(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw Error(ErrorCode::InvalidInput, "mock dimension must be >= 1");
}

Embedding MockEmbedder::embed(const EmbedRequest& request) const {
  const bool blank = std::all_of(request.payload.begin(), request.payload.end(),
                                 [](unsigned char c) { return std::isspace(c) != 0; });
  if (blank) throw Error(ErrorCode::EmptyPayload, "embed payload is empty");
  return mock_embed(request.payload, dim_);
}

Embedding MockEmbedder::embed_image(const ImageRecord& record) const {
  return mock_embed(mock_image_text(record), dim_);
}

MockCompleter MockCompleter::always(std::string completion) {
  MockCompleter m;
  m.set_fallback(std::move(completion));
  return m;
}

void MockCompleter::add(std::string_view prompt, std::string completion) {
  by_prompt_hash_[fnv1a64(prompt)] = std::move(completion);
}

std::string MockCompleter::complete(const CompletionRequest& request) const {
  validate(request);
  if (auto it = by_prompt_hash_.find(fnv1a64(request.prompt)); it != by_prompt_hash_.end()) {
    return it->second;
  }
  if (fallback_) return *fallback_;
  throw Error(ErrorCode::BadResponse, "mock completer has no fixture for this prompt");
}

}  // namespace gaudi
