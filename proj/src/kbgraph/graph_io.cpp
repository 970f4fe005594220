#include "flowsynth/kbgraph/graph_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "common/json_read.hpp"
#include "flowsynth/errors.hpp"

namespace flowsynth {

using detail::child;
using nlohmann::json;

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string(), path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string(), path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

ProcessGraph graph_from_json(const json& root, const KnowledgeBase& kb, const std::string& where) {
  const std::string prefix = where.empty() ? "" : where + ": ";
  try {
    detail::require_object(root, "");
    detail::check_format_version(root, "");
    const auto& jnodes = detail::require_array(detail::require(root, "nodes", ""), "/nodes");
    const auto& jedges = detail::require_array(detail::require(root, "edges", ""), "/edges");

    std::vector<Node> nodes;
    std::set<std::string> declared;
    for (std::size_t i = 0; i < jnodes.size(); ++i) {
      const std::string p = child("/nodes", i);
      Node n{detail::get_string(jnodes[i], "id", p), detail::get_string(jnodes[i], "unit", p)};
      if (!kb.has_unit(n.unit)) {
        throw Error(ErrorCode::kDanglingReference,
                    "field " + child(p, "unit") + ": unknown unit \"" + n.unit + "\"", n.unit);
      }
      if (!declared.insert(n.id).second) detail::field_error(child(p, "id"), "duplicate node id \"" + n.id + "\"");
      nodes.push_back(std::move(n));
    }

    std::vector<Edge> edges;
    std::set<Edge> seen;
    for (std::size_t i = 0; i < jedges.size(); ++i) {
      const std::string p = child("/edges", i);
      Edge e{detail::get_string(jedges[i], "from", p), detail::get_string(jedges[i], "to", p), std::nullopt};
      std::string material = detail::get_string_or(jedges[i], "material", p, "");
      if (!material.empty()) e.material = material;
      if (declared.count(e.from) == 0) detail::field_error(child(p, "from"), "undeclared node \"" + e.from + "\"");
      if (declared.count(e.to) == 0) detail::field_error(child(p, "to"), "undeclared node \"" + e.to + "\"");
      if (e.from == e.to) detail::field_error(p, "self-loop on \"" + e.from + "\"");
      if (!seen.insert(e).second) detail::field_error(p, "duplicate edge " + describe_edge(e));
      edges.push_back(std::move(e));
    }
    return ProcessGraph(std::move(nodes), std::move(edges));
  } catch (const Error& e) {
    if (prefix.empty()) throw;
    throw Error(e.code(), prefix + e.what(), e.subject());
  }
}

ProcessGraph parse_graph(std::string_view text, const KnowledgeBase& kb) {
  return graph_from_json(detail::parse_json_text(text, "graph"), kb);
}

ProcessGraph load_graph(const std::filesystem::path& path, const KnowledgeBase& kb) {
  std::string text = read_text_file(path);
  try {
    return parse_graph(text, kb);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what(), e.subject());
  }
}

nlohmann::ordered_json graph_to_json(const ProcessGraph& g) {
  nlohmann::ordered_json root;
  root["format_version"] = kFormatVersion;
  auto nodes = nlohmann::ordered_json::array();
  for (const auto& n : g.nodes()) nodes.push_back({{"id", n.id}, {"unit", n.unit}});
  auto edges = nlohmann::ordered_json::array();
  for (const auto& e : g.edges()) {
    nlohmann::ordered_json je{{"from", e.from}, {"to", e.to}};
    if (e.material) je["material"] = *e.material;
    edges.push_back(std::move(je));
  }
  root["nodes"] = std::move(nodes);
  root["edges"] = std::move(edges);
  return root;
}

std::string serialize_graph(const ProcessGraph& g) { return graph_to_json(g).dump(2) + "\n"; }

nlohmann::ordered_json intent_to_json(const DesignIntent& intent) {
  return {{"feedstock", intent.feedstock},
          {"products", intent.products},
          {"archetype", intent.archetype},
          {"constraints", intent.constraints}};
}

DesignIntent intent_from_json(const json& j, const std::string& where) {
  DesignIntent intent;
  intent.feedstock = detail::get_string_list(j, "feedstock", where);
  intent.products = detail::get_string_list(j, "products", where);
  intent.archetype = detail::get_string(j, "archetype", where);
  intent.constraints = detail::get_string_list(j, "constraints", where, false);
  return intent;
}

namespace {

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += sep;
    out += items[i];
  }
  return out;
}

}  // namespace

std::string render_intent(const DesignIntent& intent) {
  std::string out;
  out += "Feedstock: " + join(intent.feedstock, ", ") + "\n";
  out += "Products: " + join(intent.products, ", ") + "\n";
  out += "Archetype: " + intent.archetype + "\n";
  out += "Constraints: " + (intent.constraints.empty() ? std::string("none") : join(intent.constraints, "; ")) + "\n";
  return out;
}

}  // namespace flowsynth
