#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gaudi/catalog.hpp"
#include "gaudi/providers.hpp"
#include "gaudi/retrieval.hpp"
#include "gaudi/story.hpp"

namespace gaudi {

enum class BoardMode {
  TextPerQuery,    // each query retrieved on its own
  ChainedCompose,  // each query refines the previously chosen image
};

/// "text" / "chain".
std::string_view to_string(BoardMode mode) noexcept;
/// Throws InvalidInput for anything but "text" or "chain".
BoardMode parse_board_mode(std::string_view name);

struct BoardItem {
  std::string query;
  std::string image_id;
  double score = 0.0;

  friend bool operator==(const BoardItem&, const BoardItem&) = default;
};

struct MoodBoard {
  std::string briefing;
  BoardMode mode = BoardMode::TextPerQuery;
  std::vector<BoardItem> items;
  /// Queries that found no remaining candidate.
  std::vector<std::string> unfilled;
  std::chrono::system_clock::time_point created_at;

  /// Ignores created_at.
  friend bool operator==(const MoodBoard& a, const MoodBoard& b) {
    return a.briefing == b.briefing && a.mode == b.mode && a.items == b.items &&
           a.unfilled == b.unfilled;
  }
};

/// Runs the plan's queries in order, each excluding every image already on the
/// board, and keeps the top `k_per_query` hits of each. A query with no
/// candidates left is recorded in `unfilled`. Throws EmptyPlan or EmptyCatalog.
MoodBoard generate_board(const Catalog& catalog, const EmbedProvider& embedder,
                         const QueryPlan& plan, BoardMode mode = BoardMode::TextPerQuery,
                         std::size_t k_per_query = 1);

/// {"briefing", "mode", "items": [{"query", "image_id", "path", "score"}]}.
nlohmann::ordered_json board_to_json(const MoodBoard& board, const Catalog& catalog);

/// Scores rounded to six decimals for serialization.
double round_score(double score) noexcept;

// ---------------------------------------------------------------------------
// Sessions

struct HistoryEntry {
  std::string text;
  /// Set for composed (reference + text) queries.
  std::optional<std::string> reference_image_id;
  std::size_t k = 0;
  /// Pinned ids at the time of the query, in pin order.
  std::vector<std::string> excluded;
  std::vector<Hit> hits;

  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

struct Session {
  std::string id;
  std::vector<HistoryEntry> history;
  std::vector<std::string> pinned;
};

/// 128 random bits, base64url without padding (22 characters).
std::string new_session_token();
Session new_session();

/// Throws UnknownImageId or AlreadyPinned.
void pin(Session& session, const Catalog& catalog, const std::string& image_id);

/// Text retrieval excluding pinned images; appended to history.
std::vector<Hit> search(Session& session, const Catalog& catalog, const EmbedProvider& embedder,
                        std::string_view text, std::size_t k);

/// Composed retrieval from a catalog image plus modifier text, excluding
/// pinned images; appended to history. Throws UnknownImageId, InvalidInput
/// for blank text, EmptyCandidateSet.
std::vector<Hit> refine(Session& session, const Catalog& catalog, const EmbedProvider& embedder,
                        const std::string& reference_image_id, std::string_view modifier_text,
                        std::size_t k);

/// Re-runs every history entry with its recorded exclusions.
std::vector<std::vector<Hit>> replay(const Session& session, const Catalog& catalog,
                                     const EmbedProvider& embedder);

}  // namespace gaudi
