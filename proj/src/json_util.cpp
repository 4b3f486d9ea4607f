#include "handwash/json_util.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "handwash/errors.hpp"

namespace handwash::json_util {

using nlohmann::json;

json parse_document(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // e.byte is the 1-based offset of the offending character.
    std::size_t offset = e.byte == 0 ? 0 : e.byte - 1;
    offset = std::min(offset, text.size());
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError("malformed JSON", line, column);
  }
}

const json& require(const json& obj, const char* key, const char* where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ValidationError(std::string(where) + ": missing field '" + key + "'");
  }
  return *it;
}

std::int64_t require_int(const json& obj, const char* key, const char* where) {
  const json& v = require(obj, key, where);
  if (!v.is_number_integer()) {
    throw ValidationError(std::string(where) + ": field '" + key + "' must be an integer");
  }
  return v.get<std::int64_t>();
}

double require_number(const json& obj, const char* key, const char* where) {
  const json& v = require(obj, key, where);
  if (!v.is_number()) {
    throw ValidationError(std::string(where) + ": field '" + key + "' must be a number");
  }
  return v.get<double>();
}

bool require_bool(const json& obj, const char* key, const char* where) {
  const json& v = require(obj, key, where);
  if (!v.is_boolean()) {
    throw ValidationError(std::string(where) + ": field '" + key + "' must be a boolean");
  }
  return v.get<bool>();
}

std::string require_string(const json& obj, const char* key, const char* where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) {
    throw ValidationError(std::string(where) + ": field '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, std::string_view contents) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace handwash::json_util
