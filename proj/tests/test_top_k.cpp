#include <doctest.h>

#include <random>

#include "gaudi/error.hpp"
#include "gaudi/top_k.hpp"
#include "test_util.hpp"

using namespace gaudi;

TEST_CASE("top_k examples") {
  const std::vector<ScoredId> stream{{"a", 0.5}, {"b", 0.9}, {"c", 0.1}};
  const auto hits = top_k(stream, 2);
  REQUIRE(hits.size() == 2);
  CHECK(hits[0] == Hit{"b", 0.9, 1});
  CHECK(hits[1] == Hit{"a", 0.5, 2});

  const std::vector<ScoredId> ties{{"e", 0.3}, {"c", 0.3}, {"a", 0.3}, {"d", 0.3}, {"b", 0.3}};
  CHECK(gaudi::testing::ids_of(top_k(ties, 3)) == std::vector<std::string>{"a", "b", "c"});

  CHECK(top_k({}, 5).empty());
  CHECK(top_k(stream, 10).size() == 3);
  CHECK_THROWS_AS(top_k(stream, 0), Error);
}

TEST_CASE("top_k matches a full sort") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> coarse(0, 50);  // few distinct scores, many ties
  for (int round = 0; round < 20; ++round) {
    const std::size_t n = 10000;
    std::vector<std::string> ids(n);
    std::vector<ScoredId> stream;
    gaudi::testing::Ranked all;
    for (std::size_t i = 0; i < n; ++i) {
      ids[i] = "id" + std::to_string(rng() % 1000000);
      const double s = round % 2 ? coarse(rng) / 50.0 : std::ldexp(static_cast<double>(rng() >> 11), -53);
      stream.push_back({ids[i], s});
      all.emplace_back(ids[i], s);
    }
    const std::size_t k = 1 + rng() % 64;
    const auto expected = gaudi::testing::full_sort(all, k);
    const auto hits = top_k(stream, k);
    REQUIRE(hits.size() == expected.size());
    for (std::size_t i = 0; i < hits.size(); ++i) {
      CHECK(hits[i].image_id == expected[i].first);
      CHECK(hits[i].score == expected[i].second);
      CHECK(hits[i].rank == i + 1);
    }
  }
}

TEST_CASE("BoundedTopK merge equals a single pass") {
  std::mt19937_64 rng(11);
  auto better = [](int a, int b) { return a > b; };
  BoundedTopK<int, decltype(better)> whole(7, better), left(7, better), right(7, better);
  for (int i = 0; i < 500; ++i) {
    const int v = static_cast<int>(rng() % 1000);
    whole.push(v);
    (i % 3 ? left : right).push(v);
  }
  left.merge(right);
  CHECK(std::move(left).take_sorted() == std::move(whole).take_sorted());
}
