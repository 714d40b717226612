#include <fstream>
#include <istream>

#include <json.hpp>

#include "gaudi/catalog.hpp"

namespace gaudi {

void validate_image_id(const std::string& id) {
  if (id.empty()) throw Error(ErrorCode::InvalidInput, "image id is empty");
  if (id.size() > 65535) {
    throw Error(ErrorCode::InvalidInput,
                "image id is " + std::to_string(id.size()) + " bytes; limit is 65535");
  }
  for (unsigned char c : id) {
    if (c < 0x20 || c == 0x7f) {
      throw Error(ErrorCode::InvalidInput, "image id contains a control character");
    }
  }
}

namespace {

Error malformed(std::size_t line, const std::string& what) {
  Error e(ErrorCode::MalformedManifest, "manifest line " + std::to_string(line) + ": " + what);
  e.with_line(line);
  return e;
}

std::string string_field(const nlohmann::json& obj, const char* key, bool required,
                         std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) throw malformed(line, std::string("missing \"") + key + "\"");
    return {};
  }
  if (!it->is_string()) throw malformed(line, std::string("\"") + key + "\" must be a string");
  return it->get<std::string>();
}

}  // namespace

std::vector<ImageRecord> read_manifest(std::istream& in) {
  std::vector<ImageRecord> records;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;

    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw malformed(line, e.what());
    }
    if (!obj.is_object()) throw malformed(line, "expected a JSON object");

    ImageRecord r;
    r.id = string_field(obj, "id", true, line);
    r.path = string_field(obj, "path", true, line);
    r.caption = string_field(obj, "caption", false, line);
    if (const auto tags = obj.find("tags"); tags != obj.end()) {
      if (!tags->is_array()) throw malformed(line, "\"tags\" must be an array of strings");
      for (const auto& t : *tags) {
        if (!t.is_string()) throw malformed(line, "\"tags\" must be an array of strings");
        r.tags.push_back(t.get<std::string>());
      }
    }
    try {
      validate_image_id(r.id);
    } catch (const Error& e) {
      throw malformed(line, e.what());
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<ImageRecord> read_manifest_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MalformedManifest, "cannot open manifest " + path);
  return read_manifest(in);
}

}  // namespace gaudi
