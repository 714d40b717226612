#include <bit>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

#include <zlib.h>

#include "gaudi/catalog.hpp"

namespace gaudi {
namespace {

constexpr std::string_view kMagic = "GEMB";
constexpr std::size_t kHeaderSize = 4 + 2 + 2 + 4 + 8;

template <typename UInt>
void put_le(std::string& out, UInt value) {
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
  }
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename UInt>
  UInt get() {
    need(sizeof(UInt));
    UInt v = 0;
    for (std::size_t i = 0; i < sizeof(UInt); ++i) {
      v |= static_cast<UInt>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(UInt);
    return v;
  }

  std::string_view take(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) throw Error(ErrorCode::MalformedStore, "store ends mid-record");
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint32_t crc32_ieee(std::string_view bytes) noexcept {
  auto crc = ::crc32_z(0L, Z_NULL, 0);
  crc = ::crc32_z(crc, reinterpret_cast<const Bytef*>(bytes.data()), bytes.size());
  return static_cast<std::uint32_t>(crc);
}

std::string encode_store(const Catalog& catalog) {
  std::string out;
  out.reserve(kHeaderSize + 4 + catalog.size() * (2 + 16 + 4 * catalog.dim()));
  out.append(kMagic);
  put_le<std::uint16_t>(out, kStoreVersion);
  put_le<std::uint16_t>(out, 0);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(catalog.dim()));
  put_le<std::uint64_t>(out, catalog.size());

  const auto& m = catalog.matrix();
  for (std::size_t r = 0; r < catalog.size(); ++r) {
    const auto& id = catalog.id(r);
    put_le<std::uint16_t>(out, static_cast<std::uint16_t>(id.size()));
    out.append(id);
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(m(static_cast<Eigen::Index>(r), c)));
    }
  }
  put_le<std::uint32_t>(out, crc32_ieee(std::string_view(out).substr(kMagic.size())));
  return out;
}

std::uint64_t write_store(const Catalog& catalog, std::ostream& sink) {
  const auto bytes = encode_store(catalog);
  sink.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  sink.flush();
  if (!sink) throw Error(ErrorCode::SinkFailure, "failed writing embedding store");
  return bytes.size();
}

std::uint64_t write_store_file(const Catalog& catalog, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::SinkFailure, "cannot open " + path + " for writing");
  return write_store(catalog, out);
}

Catalog decode_store(std::string_view bytes, std::span<const ImageRecord> manifest) {
  if (bytes.size() < kMagic.size() || bytes.substr(0, kMagic.size()) != kMagic) {
    throw Error(ErrorCode::BadMagic, "not a GEMB embedding store");
  }
  if (bytes.size() < kMagic.size() + 4) {
    throw Error(ErrorCode::CrcMismatch, "store is truncated before its checksum");
  }
  const auto body = bytes.substr(kMagic.size(), bytes.size() - kMagic.size() - 4);
  const auto stored_crc = Reader(bytes.substr(bytes.size() - 4)).get<std::uint32_t>();
  if (crc32_ieee(body) != stored_crc) {
    throw Error(ErrorCode::CrcMismatch, "store checksum mismatch (corrupt or truncated file)");
  }

  Reader in(body);
  const auto version = in.get<std::uint16_t>();
  if (version != kStoreVersion) {
    throw Error(ErrorCode::UnsupportedVersion, "unsupported store version " + std::to_string(version));
  }
  const auto flags = in.get<std::uint16_t>();
  if (flags != 0) {
    throw Error(ErrorCode::UnsupportedVersion, "unsupported store flags " + std::to_string(flags));
  }
  const auto dim = in.get<std::uint32_t>();
  const auto count = in.get<std::uint64_t>();
  if (dim == 0) throw Error(ErrorCode::MalformedStore, "store dimension is zero");
  if (count > in.remaining() / (2 + 4ULL * dim)) {
    throw Error(ErrorCode::MalformedStore, "store record count exceeds file size");
  }

  std::unordered_map<std::string_view, const ImageRecord*> metadata;
  for (const auto& r : manifest) metadata.emplace(r.id, &r);

  std::vector<ImageRecord> records;
  records.reserve(count);
  Catalog::Matrix m(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim));
  for (std::uint64_t r = 0; r < count; ++r) {
    const auto id = in.take(in.get<std::uint16_t>());
    const auto meta = metadata.find(id);
    if (meta == metadata.end()) {
      Error e(ErrorCode::MissingMetadata, "stored id \"" + std::string(id) + "\" is not in the manifest");
      e.with_subject(std::string(id));
      throw e;
    }
    records.push_back(*meta->second);
    for (std::uint32_t c = 0; c < dim; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          std::bit_cast<float>(in.get<std::uint32_t>());
    }
  }
  if (in.remaining() != 0) throw Error(ErrorCode::MalformedStore, "trailing bytes after last record");

  try {
    return Catalog(dim, std::move(records), std::move(m));
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedStore, std::string("invalid store content: ") + e.what());
  }
}

Catalog load_store(std::istream& source, std::span<const ImageRecord> manifest) {
  std::string bytes{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
  return decode_store(bytes, manifest);
}

Catalog load_store_file(const std::string& path, std::span<const ImageRecord> manifest) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open store " + path);
  return load_store(in, manifest);
}

}  // namespace gaudi
