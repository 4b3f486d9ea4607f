#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

namespace handwash::json_util {

/// Parses JSON, translating syntax errors into ParseError with line/column.
nlohmann::json parse_document(std::string_view text);

const nlohmann::json& require(const nlohmann::json& obj, const char* key, const char* where);
std::int64_t require_int(const nlohmann::json& obj, const char* key, const char* where);
double require_number(const nlohmann::json& obj, const char* key, const char* where);
bool require_bool(const nlohmann::json& obj, const char* key, const char* where);
std::string require_string(const nlohmann::json& obj, const char* key, const char* where);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace handwash::json_util
