#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gaudi/embedding.hpp"
#include "gaudi/image_record.hpp"
#include "gaudi/providers.hpp"

namespace gaudi {

/// Unit-norm tolerance for stored (32-bit) embeddings.
inline constexpr double kStoredUnitNormTolerance = 1e-4;

/// Row-per-line JSON manifest: {"id","path","caption","tags"}. Unknown keys are
/// ignored; blank lines are skipped. Throws MalformedManifest with the 1-based
/// line number. Duplicate ids are left for ingest to report.
std::vector<ImageRecord> read_manifest(std::istream& in);
std::vector<ImageRecord> read_manifest_file(const std::string& path);

/// The searchable image set with one stored embedding per record.
///
/// Embeddings are kept as 32-bit reals in a single n x dim column-major
/// matrix, so each column is one embedding coordinate across every record.
/// A linear scan then walks contiguous memory and can accumulate every
/// record's dot product in index order.
class Catalog {
 public:
  using Matrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;

  /// Empty catalog of the given dimension.
  explicit Catalog(std::size_t dim);

  /// Throws DuplicateId, InvalidInput (bad id, non-unit or non-finite vector)
  /// or DimensionMismatch.
  Catalog(std::size_t dim, std::vector<ImageRecord> records,
          std::span<const Embedding> embeddings);

  /// `embeddings` is records.size() x dim.
  Catalog(std::size_t dim, std::vector<ImageRecord> records, Matrix embeddings);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  const ImageRecord& record(std::size_t pos) const { return records_.at(pos); }
  const std::vector<ImageRecord>& records() const noexcept { return records_; }
  const std::string& id(std::size_t pos) const { return records_.at(pos).id; }
  std::optional<std::size_t> find(std::string_view id) const;

  /// Stored vector of record `pos`, upcast to double.
  Embedding embedding(std::size_t pos) const;
  const Matrix& matrix() const noexcept { return embeddings_; }
  /// L2 norm of stored vector `pos`, computed in double.
  double stored_norm(std::size_t pos) const { return norms_.at(pos); }

 private:
  void build_index();

  std::size_t dim_;
  std::vector<ImageRecord> records_;
  Matrix embeddings_;
  std::vector<double> norms_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Embeds every record through `provider` in manifest order. Throws
/// DuplicateId naming the id, or rethrows provider errors with the number of
/// records embedded so far attached.
Catalog ingest(std::span<const ImageRecord> manifest, const EmbedProvider& provider);

// ---------------------------------------------------------------------------
// GEMB store: "GEMB", u16 version=1, u16 flags=0, u32 dim, u64 count,
// count x (u16 id length, id bytes, dim x f32), u32 CRC-32 over everything
// after the magic. All integers little-endian.

inline constexpr std::uint16_t kStoreVersion = 1;

/// Serialized store bytes; a pure function of catalog content.
std::string encode_store(const Catalog& catalog);

/// Writes the store and returns the number of bytes written. Throws
/// SinkFailure if the stream reports an error.
std::uint64_t write_store(const Catalog& catalog, std::ostream& sink);
std::uint64_t write_store_file(const Catalog& catalog, const std::string& path);

/// Throws BadMagic, CrcMismatch, UnsupportedVersion, MalformedStore or
/// MissingMetadata (stored id absent from the manifest).
Catalog decode_store(std::string_view bytes, std::span<const ImageRecord> manifest);
Catalog load_store(std::istream& source, std::span<const ImageRecord> manifest);
Catalog load_store_file(const std::string& path, std::span<const ImageRecord> manifest);

/// IEEE CRC-32 (the zlib/PNG polynomial).
std::uint32_t crc32_ieee(std::string_view bytes) noexcept;

}  // namespace gaudi
