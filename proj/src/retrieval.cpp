#include "gaudi/retrieval.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <thread>

namespace gaudi {
namespace {

constexpr std::size_t kBlock = 1024;

/// Dot products of up to two queries against catalog rows [begin, end).
/// Each record's sum runs over coordinates in index order; the inner loop is
/// across records, which keeps it vectorizable without reassociating any sum.
template <std::size_t Q, typename Emit>
void scan_dots(const Catalog::Matrix& x, const std::array<const double*, Q>& queries,
               std::size_t begin, std::size_t end, Emit&& emit) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto dim = static_cast<std::size_t>(x.cols());
  const float* data = x.data();
  std::array<std::array<double, kBlock>, Q> acc;

  for (std::size_t c0 = begin; c0 < end; c0 += kBlock) {
    const std::size_t len = std::min(kBlock, end - c0);
    for (auto& a : acc) std::fill_n(a.begin(), len, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      const float* col = data + i * n + c0;
      if constexpr (Q == 1) {
        const double q = queries[0][i];
        double* a = acc[0].data();
        for (std::size_t j = 0; j < len; ++j) a[j] += q * static_cast<double>(col[j]);
      } else {
        const double q0 = queries[0][i];
        const double q1 = queries[1][i];
        double* a0 = acc[0].data();
        double* a1 = acc[1].data();
        for (std::size_t j = 0; j < len; ++j) {
          const double v = static_cast<double>(col[j]);
          a0[j] += q0 * v;
          a1[j] += q1 * v;
        }
      }
    }
    for (std::size_t j = 0; j < len; ++j) {
      std::array<double, Q> dots;
      for (std::size_t q = 0; q < Q; ++q) dots[q] = acc[q][j];
      emit(c0 + j, dots);
    }
  }
}

double clamp_unit(double c) { return std::clamp(c, -1.0, 1.0); }

void check_dim(const Catalog& catalog, const Embedding& e) {
  if (static_cast<std::size_t>(e.dim()) != catalog.dim()) {
    detail::throw_dimension_mismatch(e.dim(), static_cast<Eigen::Index>(catalog.dim()));
  }
}

/// Emits (position, score) for rows [begin, end).
using RangeScorer = std::function<void(std::size_t, std::size_t,
                                       const std::function<void(std::size_t, double)>&)>;

RangeScorer text_scorer(const Catalog& catalog, const Embedding& query) {
  check_dim(catalog, query);
  const double qn = norm(query);
  if (qn < kZeroNormThreshold) detail::throw_zero_vector();
  return [&catalog, &query, qn](std::size_t begin, std::size_t end, const auto& emit) {
    const std::array<const double*, 1> qs{query.values().data()};
    scan_dots<1>(catalog.matrix(), qs, begin, end, [&](std::size_t pos, const auto& dots) {
      emit(pos, clamp_unit(dots[0] / (qn * catalog.stored_norm(pos))));
    });
  };
}

struct ComposedQuery {
  Embedding reference;
  Embedding text;
};

RangeScorer composed_scorer(const Catalog& catalog, const ComposedQuery& q,
                            ComposedScoring scoring) {
  if (scoring == ComposedScoring::LiteralConcat) {
    return [&catalog, joined = concat(q.reference, q.text)](std::size_t begin, std::size_t end,
                                                            const auto& emit) {
      for (std::size_t pos = begin; pos < end; ++pos) {
        emit(pos, cosine(joined, extend(catalog.embedding(pos))));
      }
    };
  }
  const double nr = norm(q.reference);
  const double nt = norm(q.text);
  return [&catalog, &q, nr, nt](std::size_t begin, std::size_t end, const auto& emit) {
    const std::array<const double*, 2> qs{q.reference.values().data(), q.text.values().data()};
    scan_dots<2>(catalog.matrix(), qs, begin, end, [&](std::size_t pos, const auto& dots) {
      const double nx = catalog.stored_norm(pos);
      emit(pos, clamp_unit((dots[0] / (nr * nx) + dots[1] / (nt * nx)) / 2.0));
    });
  };
}

struct Candidate {
  double score;
  std::size_t pos;
};

std::vector<Hit> select(const Catalog& catalog, const RangeScorer& scorer, std::size_t k,
                        const ExclusionSet& exclude, const SearchOptions& options) {
  if (k == 0) throw Error(ErrorCode::InvalidInput, "k must be >= 1");
  const auto n = catalog.size();

  std::vector<char> excluded(n, 0);
  std::size_t excluded_count = 0;
  for (const auto& id : exclude) {
    if (auto pos = catalog.find(id)) {
      excluded[*pos] = 1;
      ++excluded_count;
    }
  }
  if (excluded_count == n) {
    throw Error(ErrorCode::EmptyCandidateSet,
                n == 0 ? "catalog is empty" : "every catalog image is excluded");
  }

  auto better = [&catalog](const Candidate& a, const Candidate& b) {
    return ranks_before(a.score, catalog.id(a.pos), b.score, catalog.id(b.pos));
  };
  using TopK = BoundedTopK<Candidate, decltype(better)>;

  auto scan = [&](std::size_t begin, std::size_t end, TopK& best) {
    scorer(begin, end, [&](std::size_t pos, double score) {
      if (!excluded[pos]) best.push({score, pos});
    });
  };

  const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, std::max<std::size_t>(n, 1));
  TopK best(k, better);
  if (workers == 1) {
    scan(0, n, best);
  } else {
    std::vector<TopK> partial(workers, TopK(k, better));
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] { scan(n * w / workers, n * (w + 1) / workers, partial[w]); });
    }
    for (auto& t : threads) t.join();
    for (const auto& p : partial) best.merge(p);
  }

  std::vector<Hit> hits;
  for (const auto& c : std::move(best).take_sorted()) {
    hits.push_back({catalog.id(c.pos), c.score, hits.size() + 1});
  }
  return hits;
}

ComposedQuery normalized_query(const Catalog& catalog, const Embedding& reference,
                               const Embedding& text) {
  check_dim(catalog, reference);
  check_dim(catalog, text);
  return {l2_normalize(reference), l2_normalize(text)};
}

std::vector<double> collect(const Catalog& catalog, const RangeScorer& scorer) {
  std::vector<double> scores(catalog.size());
  scorer(0, catalog.size(), [&](std::size_t pos, double s) { scores[pos] = s; });
  return scores;
}

}  // namespace

std::vector<Hit> retrieve_text(const Catalog& catalog, const Embedding& query, std::size_t k,
                               const ExclusionSet& exclude, const SearchOptions& options) {
  return select(catalog, text_scorer(catalog, query), k, exclude, options);
}

std::vector<Hit> retrieve_composed(const Catalog& catalog, const Embedding& reference,
                                   const Embedding& text, std::size_t k,
                                   const ExclusionSet& exclude, const SearchOptions& options) {
  const auto q = normalized_query(catalog, reference, text);
  return select(catalog, composed_scorer(catalog, q, options.composed), k, exclude, options);
}

std::vector<double> text_scores(const Catalog& catalog, const Embedding& query) {
  return collect(catalog, text_scorer(catalog, query));
}

std::vector<double> composed_scores(const Catalog& catalog, const Embedding& reference,
                                    const Embedding& text, ComposedScoring scoring) {
  const auto q = normalized_query(catalog, reference, text);
  return collect(catalog, composed_scorer(catalog, q, scoring));
}

}  // namespace gaudi
