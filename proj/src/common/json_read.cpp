#include "common/json_read.hpp"

#include <algorithm>

namespace flowsynth::detail {

std::string line_column(std::string_view text, std::size_t byte_offset) {
  byte_offset = std::min(byte_offset, text.size());
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte_offset; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

nlohmann::json parse_json_text(std::string_view text, std::string_view what) {
  try {
    return nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    // nlohmann reports the byte just past the offending token (1-based).
    std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    std::string loc = line_column(text, at);
    throw Error(ErrorCode::kParse, std::string(what) + ": parse error at " + loc + ": " + e.what(), loc);
  }
}

void field_error(const std::string& path, const std::string& message) {
  std::string where = path.empty() ? "/" : path;
  throw Error(ErrorCode::kParse, "field " + where + ": " + message, where);
}

const nlohmann::json& require_object(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object()) field_error(path, "expected an object");
  return j;
}

const nlohmann::json& require_array(const nlohmann::json& j, const std::string& path) {
  if (!j.is_array()) field_error(path, "expected an array");
  return j;
}

const nlohmann::json& require(const nlohmann::json& obj, const char* key, const std::string& path) {
  require_object(obj, path);
  auto it = obj.find(key);
  if (it == obj.end()) field_error(child(path, key), "missing required field");
  return *it;
}

std::string get_string(const nlohmann::json& obj, const char* key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_string()) field_error(child(path, key), "expected a string");
  return v.get<std::string>();
}

std::string get_string_or(const nlohmann::json& obj, const char* key, const std::string& path,
                          std::string fallback) {
  require_object(obj, path);
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  if (!it->is_string()) field_error(child(path, key), "expected a string");
  return it->get<std::string>();
}

bool get_bool(const nlohmann::json& obj, const char* key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_boolean()) field_error(child(path, key), "expected a boolean");
  return v.get<bool>();
}

std::vector<std::string> get_string_list(const nlohmann::json& obj, const char* key, const std::string& path,
                                         bool required) {
  require_object(obj, path);
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) field_error(child(path, key), "missing required field");
    return {};
  }
  const std::string p = child(path, key);
  require_array(*it, p);
  std::vector<std::string> out;
  out.reserve(it->size());
  for (std::size_t i = 0; i < it->size(); ++i) {
    const auto& e = (*it)[i];
    if (!e.is_string()) field_error(child(p, i), "expected a string");
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::set<std::string> get_string_set(const nlohmann::json& obj, const char* key, const std::string& path,
                                     bool required) {
  auto list = get_string_list(obj, key, path, required);
  return {list.begin(), list.end()};
}

void check_format_version(const nlohmann::json& obj, const std::string& path) {
  std::string v = get_string(obj, "format_version", path);
  if (v != "1") field_error(child(path, "format_version"), "unsupported format_version \"" + v + "\"");
}

}  // namespace flowsynth::detail
