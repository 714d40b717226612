#include <cmath>

#include "gaudi/catalog.hpp"

namespace gaudi {

Catalog::Catalog(std::size_t dim) : Catalog(dim, {}, Matrix(0, static_cast<Eigen::Index>(dim))) {}

Catalog::Catalog(std::size_t dim, std::vector<ImageRecord> records,
                 std::span<const Embedding> embeddings)
    : Catalog(dim, std::move(records), [&] {
        Matrix m(static_cast<Eigen::Index>(embeddings.size()), static_cast<Eigen::Index>(dim));
        for (std::size_t r = 0; r < embeddings.size(); ++r) {
          const auto& e = embeddings[r];
          if (static_cast<std::size_t>(e.dim()) != dim) {
            detail::throw_dimension_mismatch(e.dim(), static_cast<Eigen::Index>(dim));
          }
          m.row(static_cast<Eigen::Index>(r)) = e.values().cast<float>().transpose();
        }
        return m;
      }()) {}

Catalog::Catalog(std::size_t dim, std::vector<ImageRecord> records, Matrix embeddings)
    : dim_(dim), records_(std::move(records)), embeddings_(std::move(embeddings)) {
  if (dim_ == 0) throw Error(ErrorCode::InvalidInput, "catalog dimension must be >= 1");
  if (embeddings_.cols() != static_cast<Eigen::Index>(dim_)) {
    detail::throw_dimension_mismatch(embeddings_.cols(), static_cast<Eigen::Index>(dim_));
  }
  if (embeddings_.rows() != static_cast<Eigen::Index>(records_.size())) {
    throw Error(ErrorCode::InvalidInput, "catalog needs exactly one embedding per record");
  }
  if (!embeddings_.allFinite()) {
    throw Error(ErrorCode::InvalidInput, "catalog embedding has non-finite values");
  }
  norms_.resize(records_.size());
  for (std::size_t r = 0; r < records_.size(); ++r) {
    norms_[r] = ordered_norm(embeddings_.row(static_cast<Eigen::Index>(r)));
    if (std::abs(norms_[r] - 1.0) > kStoredUnitNormTolerance) {
      throw Error(ErrorCode::InvalidInput,
                  "embedding of \"" + records_[r].id + "\" is not unit norm (" +
                      std::to_string(norms_[r]) + ")");
    }
  }
  build_index();
}

void Catalog::build_index() {
  index_.reserve(records_.size());
  for (std::size_t r = 0; r < records_.size(); ++r) {
    validate_image_id(records_[r].id);
    if (!index_.emplace(records_[r].id, r).second) {
      Error e(ErrorCode::DuplicateId, "duplicate image id \"" + records_[r].id + "\"");
      e.with_subject(records_[r].id);
      throw e;
    }
  }
}

std::optional<std::size_t> Catalog::find(std::string_view id) const {
  if (auto it = index_.find(std::string(id)); it != index_.end()) return it->second;
  return std::nullopt;
}

Embedding Catalog::embedding(std::size_t pos) const {
  if (pos >= records_.size()) throw Error(ErrorCode::InvalidInput, "catalog position out of range");
  return Embedding(embeddings_.row(static_cast<Eigen::Index>(pos)).transpose().cast<double>());
}

Catalog ingest(std::span<const ImageRecord> manifest, const EmbedProvider& provider) {
  std::unordered_map<std::string_view, std::size_t> seen;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    validate_image_id(manifest[i].id);
    if (!seen.emplace(manifest[i].id, i).second) {
      Error e(ErrorCode::DuplicateId, "duplicate image id \"" + manifest[i].id + "\"");
      e.with_subject(manifest[i].id);
      throw e;
    }
  }

  const auto dim = provider.dim();
  Catalog::Matrix m(static_cast<Eigen::Index>(manifest.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    Embedding e = [&] {
      try {
        return provider.embed_image(manifest[i]);
      } catch (Error& err) {
        err.with_progress(i);
        throw;
      }
    }();
    if (static_cast<std::size_t>(e.dim()) != dim) {
      Error err(ErrorCode::BadResponse, "provider returned dim " + std::to_string(e.dim()) +
                                            " for \"" + manifest[i].id + "\"");
      err.with_progress(i);
      throw err;
    }
    m.row(static_cast<Eigen::Index>(i)) = e.values().cast<float>().transpose();
  }
  return Catalog(dim, std::vector<ImageRecord>(manifest.begin(), manifest.end()), std::move(m));
}

}  // namespace gaudi
