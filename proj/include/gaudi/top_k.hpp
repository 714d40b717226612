#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gaudi {

struct Hit {
  std::string image_id;
  double score = 0.0;
  std::size_t rank = 0;  // 1-based

  friend bool operator==(const Hit&, const Hit&) = default;
};

struct ScoredId {
  std::string_view id;
  double score = 0.0;
};

/// Ranking order used everywhere: higher score first, then ascending
/// byte-order id.
inline bool ranks_before(double score_a, std::string_view id_a, double score_b,
                         std::string_view id_b) noexcept {
  if (score_a != score_b) return score_a > score_b;
  return id_a < id_b;
}

/// Keeps the best `k` items seen so far under `Better`, a strict total order
/// where Better(a, b) means a ranks ahead of b.
///
/// A max-heap on "worst" sits at the front, so each push is O(log k) and the
/// final sort is O(k log k).
template <typename T, typename Better>
class BoundedTopK {
 public:
  BoundedTopK(std::size_t k, Better better) : k_(k), better_(std::move(better)) {
    heap_.reserve(k_);
  }

  void push(const T& item) {
    if (k_ == 0) return;
    if (heap_.size() < k_) {
      heap_.push_back(item);
      std::push_heap(heap_.begin(), heap_.end(), better_);
      return;
    }
    // heap_.front() is the worst retained item.
    if (better_(item, heap_.front())) {
      std::pop_heap(heap_.begin(), heap_.end(), better_);
      heap_.back() = item;
      std::push_heap(heap_.begin(), heap_.end(), better_);
    }
  }

  void merge(const BoundedTopK& other) {
    for (const auto& item : other.heap_) push(item);
  }

  std::size_t size() const noexcept { return heap_.size(); }

  /// Best first.
  std::vector<T> take_sorted() && {
    std::sort(heap_.begin(), heap_.end(), better_);
    return std::move(heap_);
  }

 private:
  std::size_t k_;
  Better better_;
  std::vector<T> heap_;
};

/// The k best (id, score) pairs, ranked 1..k. Equivalent to a full sort by
/// ranks_before followed by truncation. Throws InvalidInput for k == 0.
std::vector<Hit> top_k(std::span<const ScoredId> stream, std::size_t k);

}  // namespace gaudi
