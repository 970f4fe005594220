#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "flowsynth/errors.hpp"

namespace flowsynth::detail {

// Parses JSON text; syntax errors become Error(kParse) with "line L, column C".
nlohmann::json parse_json_text(std::string_view text, std::string_view what);

std::string line_column(std::string_view text, std::size_t byte_offset);

[[noreturn]] void field_error(const std::string& path, const std::string& message);

const nlohmann::json& require(const nlohmann::json& obj, const char* key, const std::string& path);
const nlohmann::json& require_object(const nlohmann::json& j, const std::string& path);
const nlohmann::json& require_array(const nlohmann::json& j, const std::string& path);

std::string get_string(const nlohmann::json& obj, const char* key, const std::string& path);
std::string get_string_or(const nlohmann::json& obj, const char* key, const std::string& path,
                          std::string fallback);
bool get_bool(const nlohmann::json& obj, const char* key, const std::string& path);
std::vector<std::string> get_string_list(const nlohmann::json& obj, const char* key, const std::string& path,
                                         bool required = true);
std::set<std::string> get_string_set(const nlohmann::json& obj, const char* key, const std::string& path,
                                     bool required = true);

void check_format_version(const nlohmann::json& obj, const std::string& path);

inline std::string child(const std::string& path, std::string_view key) { return path + "/" + std::string(key); }
inline std::string child(const std::string& path, std::size_t index) { return path + "/" + std::to_string(index); }

}  // namespace flowsynth::detail
