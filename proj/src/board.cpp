#include <cmath>

#include "gaudi/board.hpp"

namespace gaudi {

std::string_view to_string(BoardMode mode) noexcept {
  return mode == BoardMode::TextPerQuery ? "text" : "chain";
}

BoardMode parse_board_mode(std::string_view name) {
  if (name == "text") return BoardMode::TextPerQuery;
  if (name == "chain") return BoardMode::ChainedCompose;
  throw Error(ErrorCode::InvalidInput, "board mode must be \"text\" or \"chain\"");
}

double round_score(double score) noexcept {
  const double r = std::round(score * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;
}

MoodBoard generate_board(const Catalog& catalog, const EmbedProvider& embedder,
                         const QueryPlan& plan, BoardMode mode, std::size_t k_per_query) {
  if (plan.queries.empty()) throw Error(ErrorCode::EmptyPlan, "query plan is empty");
  if (catalog.empty()) throw Error(ErrorCode::EmptyCatalog, "catalog is empty");
  if (k_per_query == 0) throw Error(ErrorCode::InvalidInput, "k_per_query must be >= 1");

  MoodBoard board;
  board.briefing = plan.briefing;
  board.mode = mode;
  board.created_at = std::chrono::system_clock::now();

  ExclusionSet chosen;
  std::optional<std::size_t> previous;
  for (const auto& query : plan.queries) {
    if (chosen.size() == catalog.size()) {
      board.unfilled.push_back(query);
      continue;
    }
    const auto text = embedder.embed_text(query);
    const auto hits = (mode == BoardMode::ChainedCompose && previous)
                          ? retrieve_composed(catalog, catalog.embedding(*previous), text,
                                              k_per_query, chosen)
                          : retrieve_text(catalog, text, k_per_query, chosen);
    for (const auto& hit : hits) {
      chosen.insert(hit.image_id);
      board.items.push_back({query, hit.image_id, hit.score});
    }
    previous = catalog.find(hits.front().image_id);
  }
  return board;
}

nlohmann::ordered_json board_to_json(const MoodBoard& board, const Catalog& catalog) {
  nlohmann::ordered_json doc;
  doc["briefing"] = board.briefing;
  doc["mode"] = to_string(board.mode);
  doc["items"] = nlohmann::ordered_json::array();
  for (const auto& item : board.items) {
    const auto pos = catalog.find(item.image_id);
    nlohmann::ordered_json j;
    j["query"] = item.query;
    j["image_id"] = item.image_id;
    j["path"] = pos ? catalog.record(*pos).path : std::string();
    j["score"] = round_score(item.score);
    doc["items"].push_back(std::move(j));
  }
  return doc;
}

}  // namespace gaudi
