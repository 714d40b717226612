#include "gaudi/top_k.hpp"

#include "gaudi/error.hpp"

namespace gaudi {

std::vector<Hit> top_k(std::span<const ScoredId> stream, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::InvalidInput, "k must be >= 1");
  auto better = [](const ScoredId& a, const ScoredId& b) {
    return ranks_before(a.score, a.id, b.score, b.id);
  };
  BoundedTopK<ScoredId, decltype(better)> best(k, better);
  for (const auto& item : stream) best.push(item);

  std::vector<Hit> hits;
  for (auto& item : std::move(best).take_sorted()) {
    hits.push_back({std::string(item.id), item.score, hits.size() + 1});
  }
  return hits;
}

}  // namespace gaudi
