#pragma once

#include <string>
#include <vector>

namespace gaudi {

/// One image in the searchable set. Captions and tags stay in the manifest;
/// the binary store holds only ids and vectors.
struct ImageRecord {
  std::string id;
  std::string path;
  std::string caption;
  std::vector<std::string> tags;

  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

/// Throws InvalidInput unless the id is non-empty, at most 65535 bytes and
/// free of control characters.
void validate_image_id(const std::string& id);

}  // namespace gaudi
