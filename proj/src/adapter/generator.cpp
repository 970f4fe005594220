#include "flowsynth/adapter/generator.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "common/json_read.hpp"
#include "flowsynth/errors.hpp"
#include "flowsynth/kbgraph/graph_io.hpp"

namespace flowsynth {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

std::string join(const std::set<std::string>& xs) {
  std::string out;
  for (const auto& x : xs) {
    if (!out.empty()) out += ", ";
    out += x;
  }
  return out;
}

std::string spaced(std::string s) {
  for (char& c : s) {
    if (c == '_') c = ' ';
  }
  return s;
}

}  // namespace

void validate_request(const GenerationRequest& req) {
  if (!(req.temperature >= 0.0) || !std::isfinite(req.temperature)) {
    throw Error(ErrorCode::kInvalidArgument, "temperature must be >= 0");
  }
  if (!(req.top_p > 0.0 && req.top_p <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "top_p must be in (0, 1]");
  if (req.top_k < 1) throw Error(ErrorCode::kInvalidArgument, "top_k must be >= 1");
  if (req.max_tokens < 1) throw Error(ErrorCode::kInvalidArgument, "max_tokens must be >= 1");
}

nlohmann::ordered_json request_to_json(const GenerationRequest& req) {
  return {{"prompt", req.prompt},
          {"temperature", req.temperature},
          {"top_p", req.top_p},
          {"top_k", req.top_k},
          {"max_tokens", req.max_tokens}};
}

std::string canonicalize_prompt(std::string_view prompt) {
  std::vector<std::string> lines;
  std::string line;
  for (std::size_t i = 0; i <= prompt.size(); ++i) {
    if (i == prompt.size() || prompt[i] == '\n') {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto end = line.find_last_not_of(" \t\r");
      line.erase(end == std::string::npos ? 0 : end + 1);
      lines.push_back(std::move(line));
      line.clear();
    } else {
      line.push_back(prompt[i]);
    }
  }
  std::size_t first = 0;
  while (first < lines.size() && lines[first].empty()) ++first;
  std::size_t last = lines.size();
  while (last > first && lines[last - 1].empty()) --last;
  std::string out;
  for (std::size_t i = first; i < last; ++i) {
    if (i > first) out.push_back('\n');
    out += lines[i];
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string prompt_fingerprint(std::string_view prompt) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonicalize_prompt(prompt))));
  return buf;
}

void MockTable::add(std::string_view prompt, std::string response) {
  entries[prompt_fingerprint(prompt)] = std::move(response);
}

std::string mock_generate(const GenerationRequest& req, const MockTable& table) {
  const std::string fp = prompt_fingerprint(req.prompt);
  auto it = table.entries.find(fp);
  if (it != table.entries.end()) return it->second;
  if (table.fallback) return *table.fallback;
  throw Error(ErrorCode::kNoEntry, "no mock entry for prompt fingerprint " + fp, fp);
}

MockTable parse_mock_table(std::string_view text) {
  const auto j = detail::parse_json_text(text, "mock table");
  detail::require_object(j, "");
  MockTable table;
  const auto& entries = detail::require_object(detail::require(j, "entries", ""), "/entries");
  for (const auto& [fp, response] : entries.items()) {
    if (!response.is_string()) detail::field_error(detail::child("/entries", fp), "expected a string");
    table.entries[fp] = response.get<std::string>();
  }
  if (j.contains("default") && !j["default"].is_null()) {
    if (!j["default"].is_string()) detail::field_error("/default", "expected a string");
    table.fallback = j["default"].get<std::string>();
  }
  return table;
}

MockTable load_mock_table(const std::filesystem::path& path) { return parse_mock_table(read_text_file(path)); }

nlohmann::ordered_json mock_table_to_json(const MockTable& table) {
  nlohmann::ordered_json entries = nlohmann::ordered_json::object();
  for (const auto& [fp, response] : table.entries) entries[fp] = response;
  nlohmann::ordered_json j{{"entries", entries}};
  if (table.fallback) j["default"] = *table.fallback;
  return j;
}

std::string render_unit_schema(const UnitSpec& unit) {
  return "UNIT " + unit.id + " | " + (unit.display_name.empty() ? unit.id : unit.display_name) +
         " | in: " + join(unit.inputs) + " | out: " + join(unit.outputs);
}

std::vector<SchemaLine> parse_unit_schemas(std::string_view prompt) {
  std::vector<SchemaLine> out;
  std::istringstream in{std::string(prompt)};
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.rfind("UNIT ", 0) != 0) continue;
    const auto fields = split(std::string_view(t).substr(5), '|');
    if (fields.size() != 4 || fields[0].empty()) continue;
    if (fields[2].rfind("in:", 0) != 0 || fields[3].rfind("out:", 0) != 0) continue;
    SchemaLine s{fields[0], fields[1], {}, {}};
    for (auto& m : split(std::string_view(fields[2]).substr(3), ',')) {
      if (!m.empty()) s.inputs.push_back(std::move(m));
    }
    for (auto& m : split(std::string_view(fields[3]).substr(4), ',')) {
      if (!m.empty()) s.outputs.push_back(std::move(m));
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string TemplateGenerator::generate(const GenerationRequest& req) {
  std::string out;
  for (const auto& s : parse_unit_schemas(req.prompt)) {
    if (!out.empty()) out.push_back(' ');
    out += "The " + s.display_name + " (" + s.id + ")";
    if (!s.inputs.empty()) out += " takes " + spaced(s.inputs.front()) + " and";
    out += " delivers " + (s.outputs.empty() ? std::string("product") : spaced(s.outputs.front())) + ".";
  }
  return out;
}

}  // namespace flowsynth
