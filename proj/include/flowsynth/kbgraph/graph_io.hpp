#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "flowsynth/kbgraph/knowledge_base.hpp"
#include "flowsynth/kbgraph/process_graph.hpp"

namespace flowsynth {

inline constexpr std::string_view kFormatVersion = "1";

// Graph file: {"format_version":"1","nodes":[{"id","unit"}],"edges":[{"from","to","material"?}]}.
// Unit ids must exist in kb (Error kDanglingReference).
ProcessGraph parse_graph(std::string_view text, const KnowledgeBase& kb);
ProcessGraph graph_from_json(const nlohmann::json& j, const KnowledgeBase& kb, const std::string& where = "");
ProcessGraph load_graph(const std::filesystem::path& path, const KnowledgeBase& kb);

nlohmann::ordered_json graph_to_json(const ProcessGraph& g);
std::string serialize_graph(const ProcessGraph& g);

nlohmann::ordered_json intent_to_json(const DesignIntent& intent);
DesignIntent intent_from_json(const nlohmann::json& j, const std::string& where = "");

// Human-readable single-block rendering used in prompts and training records.
std::string render_intent(const DesignIntent& intent);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace flowsynth
