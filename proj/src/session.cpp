#include <algorithm>
#include <array>
#include <random>

#include "gaudi/board.hpp"

namespace gaudi {
namespace {

std::string base64url(std::span<const unsigned char> bytes) {
  static constexpr char kAlphabet[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";
  std::string out;
  std::uint32_t buffer = 0;
  int bits = 0;
  for (unsigned char b : bytes) {
    buffer = (buffer << 8) | b;
    bits += 8;
    while (bits >= 6) {
      bits -= 6;
      out.push_back(kAlphabet[(buffer >> bits) & 0x3F]);
    }
  }
  if (bits > 0) out.push_back(kAlphabet[(buffer << (6 - bits)) & 0x3F]);
  return out;
}

std::size_t require_image(const Catalog& catalog, const std::string& image_id) {
  if (auto pos = catalog.find(image_id)) return *pos;
  Error e(ErrorCode::UnknownImageId, "unknown image id \"" + image_id + "\"");
  e.with_subject(image_id);
  throw e;
}

ExclusionSet as_set(const std::vector<std::string>& ids) {
  return ExclusionSet(ids.begin(), ids.end());
}

}  // namespace

std::string new_session_token() {
  std::random_device device;
  std::array<unsigned char, 16> bytes;
  for (std::size_t i = 0; i < bytes.size(); i += 4) {
    const auto word = device();
    for (std::size_t j = 0; j < 4; ++j) bytes[i + j] = static_cast<unsigned char>(word >> (8 * j));
  }
  return base64url(bytes);
}

Session new_session() { return Session{new_session_token(), {}, {}}; }

void pin(Session& session, const Catalog& catalog, const std::string& image_id) {
  require_image(catalog, image_id);
  if (std::find(session.pinned.begin(), session.pinned.end(), image_id) != session.pinned.end()) {
    Error e(ErrorCode::AlreadyPinned, "image \"" + image_id + "\" is already pinned");
    e.with_subject(image_id);
    throw e;
  }
  session.pinned.push_back(image_id);
}

std::vector<Hit> search(Session& session, const Catalog& catalog, const EmbedProvider& embedder,
                        std::string_view text, std::size_t k) {
  auto hits = retrieve_text(catalog, embedder.embed_text(text), k, as_set(session.pinned));
  session.history.push_back({std::string(text), std::nullopt, k, session.pinned, hits});
  return hits;
}

std::vector<Hit> refine(Session& session, const Catalog& catalog, const EmbedProvider& embedder,
                        const std::string& reference_image_id, std::string_view modifier_text,
                        std::size_t k) {
  const auto ref = require_image(catalog, reference_image_id);
  if (modifier_text.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos) {
    throw Error(ErrorCode::InvalidInput, "modifier text is empty");
  }
  auto hits = retrieve_composed(catalog, catalog.embedding(ref), embedder.embed_text(modifier_text),
                                k, as_set(session.pinned));
  session.history.push_back(
      {std::string(modifier_text), reference_image_id, k, session.pinned, hits});
  return hits;
}

std::vector<std::vector<Hit>> replay(const Session& session, const Catalog& catalog,
                                     const EmbedProvider& embedder) {
  std::vector<std::vector<Hit>> out;
  for (const auto& entry : session.history) {
    const auto text = embedder.embed_text(entry.text);
    const auto exclude = as_set(entry.excluded);
    if (entry.reference_image_id) {
      const auto ref = require_image(catalog, *entry.reference_image_id);
      out.push_back(retrieve_composed(catalog, catalog.embedding(ref), text, entry.k, exclude));
    } else {
      out.push_back(retrieve_text(catalog, text, entry.k, exclude));
    }
  }
  return out;
}

}  // namespace gaudi
