// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Oracles live in test_util.hpp and never call the code
// under test.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cli_util.hpp"
#include "gaudi/board.hpp"
#include "gaudi/catalog.hpp"
#include "gaudi/retrieval.hpp"
#include "gaudi/story.hpp"
#include "test_util.hpp"
#include "http_util.hpp"

namespace {

using namespace gaudi;
using gaudi::testing::ids_of;
using gaudi::testing::OracleCatalog;
using gaudi::testing::to_embedding;
using gaudi::testing::Vec;
using Clock = std::chrono::steady_clock;

constexpr double kIdentityTolerance = 1e-9;
constexpr double kIdentityBudgetSeconds = 1.0;
constexpr double kOracleBudgetSeconds = 30.0;
constexpr double kConformanceTolerance = 1e-9;
constexpr double kBoardBudgetSeconds = 1.0;
constexpr double kLatencyBudgetMs = 50.0;

constexpr std::size_t kOracleCatalogs = 100;
constexpr std::size_t kStoreCatalogs = 50;

int failures = 0;

void report(bool ok, const char* name, const std::string& detail) {
  std::printf("%s  %-34s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

std::string fixture(const std::string& name) {
  return gaudi::testing::read_text(std::string(GAUDI_FIXTURES) + "/" + name);
}

// ---------------------------------------------------------------------------

void composed_identity() {
  std::mt19937_64 rng(101);
  const auto start = Clock::now();
  double worst = 0;
  std::size_t triples = 0;
  for (std::size_t dim : {8u, 512u}) {
    for (int i = 0; i < 1000; ++i) {
      const auto a = to_embedding(gaudi::testing::random_unit(rng, dim));
      const auto b = to_embedding(gaudi::testing::random_unit(rng, dim));
      const auto c = to_embedding(gaudi::testing::random_unit(rng, dim));
      const double literal = cosine(concat(a, b), extend(c));
      const double halves = (cosine(a, c) + cosine(b, c)) / 2;
      worst = std::max(worst, std::abs(literal - halves));
      ++triples;
    }
  }
  const double elapsed = seconds_since(start);
  report(worst <= kIdentityTolerance && elapsed < kIdentityBudgetSeconds, "composed-similarity identity",
         fmt("triples=%zu max|diff|=%.3g tol=%.0e time=%.3fs", triples, worst, kIdentityTolerance, elapsed));
}

struct OracleCase {
  OracleCatalog oc;
  Vec query;
  Vec reference;
  std::size_t k = 1;
  ExclusionSet exclude;
};

std::vector<OracleCase> oracle_cases() {
  std::mt19937_64 rng(202);
  std::vector<OracleCase> cases;
  for (std::size_t i = 0; i < kOracleCatalogs; ++i) {
    OracleCase c;
    const std::size_t n = 1 + rng() % 1000;
    const std::size_t dim = 1 + rng() % 64;
    c.oc = gaudi::testing::random_catalog(rng, n, dim, 0.1);
    c.query = gaudi::testing::random_unit(rng, dim);
    // Every fourth case queries with a catalog vector so exact ties reach the top.
    c.reference = i % 4 == 0 ? c.oc.stored[rng() % n] : gaudi::testing::random_unit(rng, dim);
    c.k = 1 + rng() % n;
    for (std::size_t e = rng() % 4; e > 0 && c.exclude.size() + 1 < n; --e) c.exclude.insert(c.oc.ids[rng() % n]);
    cases.push_back(std::move(c));
  }
  return cases;
}

void retrieval_oracle(const std::vector<OracleCase>& cases) {
  const auto start = Clock::now();
  std::size_t mismatches = 0;
  for (const auto& c : cases) {
    const std::unordered_set<std::string> ex(c.exclude.begin(), c.exclude.end());
    const auto text = retrieve_text(c.oc.catalog, to_embedding(c.query), c.k, c.exclude);
    if (ids_of(text) != ids_of(gaudi::testing::oracle_text(c.oc, c.query, c.k, ex))) ++mismatches;
    const auto composed =
        retrieve_composed(c.oc.catalog, to_embedding(c.reference), to_embedding(c.query), c.k, c.exclude);
    if (ids_of(composed) != ids_of(gaudi::testing::oracle_composed(c.oc, c.reference, c.query, c.k, ex)))
      ++mismatches;
  }
  const double elapsed = seconds_since(start);
  report(mismatches == 0 && elapsed < kOracleBudgetSeconds, "retrieval oracle equivalence",
         fmt("catalogs=%zu mismatched=%zu time=%.2fs", cases.size(), mismatches, elapsed));
}

void composed_conformance(const std::vector<OracleCase>& cases) {
  double worst = 0;
  std::size_t order_mismatches = 0;
  SearchOptions literal;
  literal.composed = ComposedScoring::LiteralConcat;
  for (const auto& c : cases) {
    const auto r = to_embedding(c.reference);
    const auto t = to_embedding(c.query);
    const auto fast = composed_scores(c.oc.catalog, r, t, ComposedScoring::Decomposed);
    const auto slow = composed_scores(c.oc.catalog, r, t, ComposedScoring::LiteralConcat);
    for (std::size_t i = 0; i < fast.size(); ++i) worst = std::max(worst, std::abs(fast[i] - slow[i]));
    const auto n = c.oc.catalog.size();
    if (ids_of(retrieve_composed(c.oc.catalog, r, t, n)) != ids_of(retrieve_composed(c.oc.catalog, r, t, n, {}, literal)))
      ++order_mismatches;
  }
  report(worst <= kConformanceTolerance && order_mismatches == 0, "composed fast-path conformance",
         fmt("max|diff|=%.3g tol=%.0e ordering mismatches=%zu", worst, kConformanceTolerance, order_mismatches));
}

void scale_invariance(const std::vector<OracleCase>& cases) {
  std::size_t changed = 0;
  for (const auto& c : cases) {
    const auto q = to_embedding(c.query);
    const auto r = to_embedding(c.reference);
    const auto text = ids_of(retrieve_text(c.oc.catalog, q, c.k, c.exclude));
    const auto composed = ids_of(retrieve_composed(c.oc.catalog, r, q, c.k, c.exclude));
    for (double alpha : {0.001, 1.0, 1000.0}) {
      if (ids_of(retrieve_text(c.oc.catalog, scaled(q, alpha), c.k, c.exclude)) != text) ++changed;
      if (ids_of(retrieve_composed(c.oc.catalog, r, scaled(q, alpha), c.k, c.exclude)) != composed) ++changed;
      if (ids_of(retrieve_composed(c.oc.catalog, scaled(r, alpha), q, c.k, c.exclude)) != composed) ++changed;
    }
  }
  report(changed == 0, "scale/argmax invariance",
         fmt("catalogs=%zu alphas={0.001,1,1000} changed=%zu", cases.size(), changed));
}

void store_round_trip() {
  std::mt19937_64 rng(303);
  std::size_t unstable = 0, undetected = 0, mutations = 0;
  for (std::size_t i = 0; i < kStoreCatalogs; ++i) {
    const auto oc = gaudi::testing::random_catalog(rng, rng() % 200, 1 + rng() % 64);
    const auto first = encode_store(oc.catalog);
    std::string second;
    try {
      second = encode_store(decode_store(first, oc.catalog.records()));
    } catch (const Error&) {
    }
    if (second != first) ++unstable;
    for (int m = 0; m < 20; ++m) {
      auto mutated = first;
      const std::size_t pos = 4 + rng() % (mutated.size() - 4);
      mutated[pos] = static_cast<char>(mutated[pos] ^ (1 + rng() % 255));
      ++mutations;
      try {
        decode_store(mutated, oc.catalog.records());
        ++undetected;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::CrcMismatch) ++undetected;
      }
    }
  }
  report(unstable == 0 && undetected == 0, "store round-trip",
         fmt("catalogs=%zu non-identical=%zu mutations=%zu without CrcMismatch=%zu", kStoreCatalogs, unstable,
             mutations, undetected));
}

void prompt_and_parser() {
  const std::string briefing =
      "You're designing a new yoga kit for a highend company that is famous for its athletic clothes.";
  const bool prompt_ok = build_prompt(coffee_brand_example(), briefing) == fixture("yoga_prompt.txt");
  std::vector<std::string> queries;
  try {
    queries = parse_queries(fixture("yoga_completion.txt"));
  } catch (const Error&) {
  }
  const bool parse_ok = queries.size() == 7 && queries.front() == "I'm looking for photos of trees and grass." &&
                        queries.back() == "I'm looking for images of women practicing yoga in nature.";
  report(prompt_ok && parse_ok, "prompt and parser fixtures",
         fmt("prompt byte-match=%s queries=%zu", prompt_ok ? "yes" : "no", queries.size()));
}

void sampling_defaults() {
  gaudi::testing::LocalServer sidecar;
  std::string captured;
  sidecar.server().Post("/v1/completions", [&](const httplib::Request& req, httplib::Response& res) {
    captured = req.body;
    res.set_content(R"({"choices":[{"text":"I'm looking for x."}]})", "application/json");
  });
  sidecar.start();
  RemoteCompleter llm(HttpEndpoint{sidecar.url("/v1/completions")}, "test-key");
  try {
    llm.complete(CompletionRequest{build_prompt(coffee_brand_example(), "b"), SamplingConfig{}, std::string(kDefaultModel)});
  } catch (const Error&) {
  }
  bool ok = false;
  try {
    const auto body = nlohmann::json::parse(captured);
    ok = body.at("temperature") == 0.7 && body.at("top_p") == 1.0 && body.at("max_tokens") == 80 &&
         body.at("max_tokens").is_number_integer() && body.at("frequency_penalty") == 0.0 &&
         body.at("presence_penalty") == 0.0;
  } catch (const std::exception&) {
  }
  // The literal bytes, not only the parsed values.
  for (const char* token : {"\"temperature\":0.7,", "\"top_p\":1.0,", "\"max_tokens\":80,",
                            "\"frequency_penalty\":0.0,", "\"presence_penalty\":0.0}"}) {
    if (captured.find(token) == std::string::npos) ok = false;
  }
  report(ok, "sampling defaults on the wire", fmt("captured %zu bytes", captured.size()));
}

void offline_board() {
  gaudi::testing::TempDir dir;
  const std::string bin = GAUDI_BIN;
  const auto manifest = std::string(GAUDI_FIXTURES) + "/catalog100.jsonl";
  const auto store = dir / "store.gemb";
  const auto ingest = gaudi::testing::run_gaudi(
      bin, "ingest --manifest " + gaudi::testing::shell_quote(manifest) + " --dim 512 --out " + gaudi::testing::shell_quote(store), dir);
  const std::string args =
      "board --briefing " +
      gaudi::testing::shell_quote(
          "You're designing a new yoga kit for a highend company that is famous for its athletic clothes.") +
      " --fixture " + gaudi::testing::shell_quote(std::string(GAUDI_FIXTURES) + "/yoga_completion.txt") +
      " --manifest " + gaudi::testing::shell_quote(manifest) + " --store " + gaudi::testing::shell_quote(store);

  auto start = Clock::now();
  const auto first = gaudi::testing::run_gaudi(bin, args, dir);
  const double t1 = seconds_since(start);
  start = Clock::now();
  const auto second = gaudi::testing::run_gaudi(bin, args, dir);
  const double t2 = seconds_since(start);

  std::size_t items = 0, distinct = 0;
  try {
    const auto doc = nlohmann::json::parse(first.out);
    std::set<std::string> ids;
    for (const auto& item : doc.at("items")) ids.insert(item.at("image_id").get<std::string>());
    items = doc.at("items").size();
    distinct = ids.size();
  } catch (const std::exception&) {
  }
  const bool ok = ingest.exit_code == 0 && first.exit_code == 0 && second.exit_code == 0 && items >= 1 &&
                  items <= 7 && distinct == items && first.out == second.out && std::max(t1, t2) < kBoardBudgetSeconds;
  report(ok, "end-to-end offline board",
         fmt("items=%zu distinct=%zu identical=%s wall=%.3fs/%.3fs", items, distinct,
             first.out == second.out ? "yes" : "no", t1, t2));
}

void desk_scale_latency() {
  constexpr std::size_t n = 100000, dim = 512;
  std::mt19937_64 rng(404);
  std::normal_distribution<float> normal;
  Catalog::Matrix m(n, dim);
  for (std::size_t j = 0; j < dim; ++j)
    for (std::size_t i = 0; i < n; ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = normal(rng);
  for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) /= m.row(i).norm();
  std::vector<ImageRecord> records(n);
  for (std::size_t i = 0; i < n; ++i) records[i].id = records[i].path = "img" + std::to_string(i);
  const Catalog catalog(dim, std::move(records), std::move(m));

  std::vector<double> ms;
  for (int i = 0; i < 21; ++i) {
    const auto q = to_embedding(gaudi::testing::random_unit(rng, dim));
    const auto start = Clock::now();
    const auto hits = retrieve_text(catalog, q, 10);
    ms.push_back(seconds_since(start) * 1e3);
    if (hits.size() != 10) ms.back() = 1e9;
  }
  std::sort(ms.begin(), ms.end());
  const double median = ms[ms.size() / 2];
  report(median <= kLatencyBudgetMs, "desk-scale top-10 latency",
         fmt("n=%zu dim=%zu median=%.1fms budget=%.0fms threads=1", n, dim, median, kLatencyBudgetMs));
}

}  // namespace

int main() {
  composed_identity();
  const auto cases = oracle_cases();
  retrieval_oracle(cases);
  composed_conformance(cases);
  store_round_trip();
  prompt_and_parser();
  sampling_defaults();
  offline_board();
  scale_invariance(cases);
  desk_scale_latency();
  std::printf("%s: %d failing\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
