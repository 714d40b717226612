#pragma once

// Exact top-k retrieval over a Catalog.
//
// Text retrieval ranks images by cos(query, image). Composed retrieval ranks
// by cos(reference ⊕ text, image ⊕ image); with unit-norm reference and text
// that score equals (cos(reference, image) + cos(text, image)) / 2, which is
// what the default scan computes in a single pass. The literal concatenated
// form stays available as a conformance path.
//
// Ties are broken by ascending byte-order image id. Excluded ids are removed
// before selection, so k results come back whenever k candidates remain.

#include <cstddef>
#include <string>
#include <unordered_set>
#include <vector>

#include "gaudi/catalog.hpp"
#include "gaudi/embedding.hpp"
#include "gaudi/top_k.hpp"

namespace gaudi {

using ExclusionSet = std::unordered_set<std::string>;

enum class ComposedScoring {
  Decomposed,     // average of the two component cosines
  LiteralConcat,  // cosine of the concatenated query against the extended image
};

struct SearchOptions {
  /// Contiguous partitions scanned on separate threads. Results do not
  /// depend on this value.
  unsigned workers = 1;
  ComposedScoring composed = ComposedScoring::Decomposed;
};

/// Throws InvalidInput (k == 0), DimensionMismatch, ZeroVector or
/// EmptyCandidateSet (catalog empty or fully excluded).
std::vector<Hit> retrieve_text(const Catalog& catalog, const Embedding& query, std::size_t k,
                               const ExclusionSet& exclude = {}, const SearchOptions& options = {});

/// Reference and text are L2-normalized at query time before scoring.
std::vector<Hit> retrieve_composed(const Catalog& catalog, const Embedding& reference,
                                   const Embedding& text, std::size_t k,
                                   const ExclusionSet& exclude = {},
                                   const SearchOptions& options = {});

/// Score of every catalog record against a text query, in catalog order.
std::vector<double> text_scores(const Catalog& catalog, const Embedding& query);

/// Composed score of every catalog record, in catalog order.
std::vector<double> composed_scores(const Catalog& catalog, const Embedding& reference,
                                    const Embedding& text, ComposedScoring scoring);

}  // namespace gaudi
