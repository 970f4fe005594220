#include "flowsynth/kbgraph/knowledge_base.hpp"

#include <algorithm>
#include <map>

#include "common/json_read.hpp"
#include "flowsynth/errors.hpp"
#include "flowsynth/kbgraph/graph_io.hpp"
#include "flowsynth/kbgraph/names.hpp"

namespace flowsynth {

using detail::child;
using nlohmann::json;

std::string_view io_rule_kind_name(IoRuleKind kind) {
  switch (kind) {
    case IoRuleKind::kRequiresInput: return "requires_input";
    case IoRuleKind::kRequiresOutput: return "requires_output";
    case IoRuleKind::kForbidsInput: return "forbids_input";
  }
  return "?";
}

std::optional<IoRuleKind> parse_io_rule_kind(std::string_view name) {
  if (name == "requires_input") return IoRuleKind::kRequiresInput;
  if (name == "requires_output") return IoRuleKind::kRequiresOutput;
  if (name == "forbids_input") return IoRuleKind::kForbidsInput;
  return std::nullopt;
}

bool Motif::fits_archetype(std::string_view archetype) const {
  return archetypes.empty() || archetypes.count(std::string(archetype)) > 0;
}

bool shares_material(const MaterialSet& a, const MaterialSet& b) {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      return true;
    }
  }
  return false;
}

namespace {

template <typename T, typename GetId>
std::map<std::string, std::size_t, std::less<>> build_index(const std::vector<T>& items, GetId get_id,
                                                            std::string_view what) {
  std::map<std::string, std::size_t, std::less<>> index;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const std::string& id = get_id(items[i]);
    if (!index.emplace(id, i).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate " + std::string(what) + " id \"" + id + "\"", id);
    }
  }
  return index;
}

template <typename Map>
auto lookup(const Map& m, std::string_view id) -> const typename Map::mapped_type* {
  auto it = m.find(id);
  return it == m.end() ? nullptr : &it->second;
}

}  // namespace

KnowledgeBase::KnowledgeBase(std::vector<Material> materials, std::vector<UnitSpec> units, std::vector<Motif> motifs,
                             std::vector<CriticalPathRule> critical_paths, std::set<std::string> archetypes)
    : materials_(std::move(materials)),
      units_(std::move(units)),
      motifs_(std::move(motifs)),
      critical_paths_(std::move(critical_paths)),
      archetypes_(std::move(archetypes)) {
  auto by_id = [](const auto& x) -> const std::string& { return x.id; };
  std::sort(materials_.begin(), materials_.end(), [](const Material& a, const Material& b) { return a.id < b.id; });
  std::sort(units_.begin(), units_.end(), [](const UnitSpec& a, const UnitSpec& b) { return a.id < b.id; });
  material_index_ = build_index(materials_, by_id, "material");
  unit_index_ = build_index(units_, by_id, "unit");
  rule_index_ = build_index(critical_paths_, by_id, "critical path");
  build_index(motifs_, by_id, "motif");
}

const UnitSpec* KnowledgeBase::find_unit(std::string_view id) const {
  const std::size_t* i = lookup(unit_index_, id);
  return i ? &units_[*i] : nullptr;
}

const Material* KnowledgeBase::find_material(std::string_view id) const {
  const std::size_t* i = lookup(material_index_, id);
  return i ? &materials_[*i] : nullptr;
}

const CriticalPathRule* KnowledgeBase::find_rule(std::string_view id) const {
  const std::size_t* i = lookup(rule_index_, id);
  return i ? &critical_paths_[*i] : nullptr;
}

const UnitSpec& KnowledgeBase::unit(std::string_view id) const {
  const UnitSpec* u = find_unit(id);
  if (u == nullptr) {
    throw Error(ErrorCode::kUnknownUnit, "unknown unit \"" + std::string(id) + "\"", std::string(id));
  }
  return *u;
}

// ---------------------------------------------------------------------------
// validation

namespace {

class ViolationSink {
 public:
  void add(std::string entity, std::string invariant, std::string detail, std::string missing = {}) {
    out_.push_back({std::move(entity), std::move(invariant), std::move(detail), std::move(missing)});
  }
  void require_material(const KnowledgeBase& kb, const std::string& entity, const std::string& id,
                        const std::string& role) {
    if (!kb.has_material(id)) add(entity, "reference", role + " references unknown material \"" + id + "\"", id);
  }
  void require_unit(const KnowledgeBase& kb, const std::string& entity, const std::string& id,
                    const std::string& role) {
    if (!kb.has_unit(id)) add(entity, "reference", role + " references unknown unit \"" + id + "\"", id);
  }
  std::vector<KbViolation> take() { return std::move(out_); }

 private:
  std::vector<KbViolation> out_;
};

void check_name_collisions(const KnowledgeBase& kb, ViolationSink& sink) {
  // Every id/alias/display name must name exactly one entity across units and
  // materials; mention scanning and name resolution rely on it.
  std::map<std::string, std::string> owner;
  auto claim = [&](const std::string& raw, const std::string& entity) {
    std::string name = phrase_key(raw);
    if (name.empty()) {
      sink.add(entity, "alias nonempty", "empty name or alias");
      return;
    }
    auto [it, inserted] = owner.emplace(name, entity);
    if (!inserted && it->second != entity) {
      sink.add(entity, "alias unique", "name \"" + name + "\" already used by " + it->second);
    }
  };
  for (const auto& m : kb.materials()) {
    claim(m.id, "material:" + m.id);
    for (const auto& a : m.aliases) claim(a, "material:" + m.id);
  }
  for (const auto& u : kb.units()) {
    claim(u.id, "unit:" + u.id);
    for (const auto& a : u.aliases) claim(a, "unit:" + u.id);
    if (!u.display_name.empty()) claim(u.display_name, "unit:" + u.id);
  }
}

}  // namespace

std::vector<KbViolation> validate_knowledge_base(const KnowledgeBase& kb) {
  ViolationSink sink;
  for (const auto& m : kb.materials()) {
    if (m.id.empty()) sink.add("material:", "id nonempty", "material with empty id");
  }
  for (const auto& u : kb.units()) {
    const std::string entity = "unit:" + u.id;
    if (u.id.empty()) sink.add(entity, "id nonempty", "unit with empty id");
    if (u.outputs.empty()) sink.add(entity, "outputs nonempty", "unit declares no output materials");
    for (const auto& m : u.inputs) sink.require_material(kb, entity, m, "inputs");
    for (const auto& m : u.outputs) sink.require_material(kb, entity, m, "outputs");
    for (const auto& r : u.io_rules) {
      sink.require_material(kb, entity, r.material, std::string(io_rule_kind_name(r.kind)) + " rule");
    }
  }
  check_name_collisions(kb, sink);
  for (const auto& rule : kb.critical_paths()) {
    const std::string entity = "critical_path:" + rule.id;
    if (rule.source.kind == SourcePredicate::Kind::kUnit) {
      sink.require_unit(kb, entity, rule.source.id, "source_predicate");
    } else {
      sink.require_material(kb, entity, rule.source.id, "source_predicate");
    }
    sink.require_unit(kb, entity, rule.target_unit, "target_unit");
  }
  for (const auto& motif : kb.motifs()) {
    const std::string entity = "motif:" + motif.id;
    std::set<std::string> members(motif.unit_ids.begin(), motif.unit_ids.end());
    for (const auto& id : motif.unit_ids) sink.require_unit(kb, entity, id, "unit_ids");
    for (const auto& a : motif.archetypes) {
      if (kb.archetypes().count(a) == 0) {
        sink.add(entity, "reference", "unknown archetype \"" + a + "\"", a);
      }
    }
    for (const auto& e : motif.edges) {
      const std::string label = e.from + "->" + e.to + " [" + e.material + "]";
      if (members.count(e.from) == 0 || members.count(e.to) == 0) {
        sink.add(entity, "edge endpoints in motif", "edge " + label + " leaves the motif's unit list");
        continue;
      }
      const UnitSpec* from = kb.find_unit(e.from);
      const UnitSpec* to = kb.find_unit(e.to);
      if (from == nullptr || to == nullptr) continue;  // already reported
      if (from->outputs.count(e.material) == 0 || to->inputs.count(e.material) == 0) {
        sink.add(entity, "material compatibility",
                 "edge " + label + ": material not in Out(" + e.from + ") ∩ In(" + e.to + ")");
      }
    }
  }
  return sink.take();
}

// ---------------------------------------------------------------------------
// JSON format

namespace {

Material material_from_json(const json& j, const std::string& path) {
  detail::require_object(j, path);
  Material m;
  m.id = detail::get_string(j, "id", path);
  m.aliases = detail::get_string_set(j, "aliases", path, false);
  if (auto it = j.find("properties"); it != j.end()) {
    detail::require_object(*it, child(path, "properties"));
    for (const auto& [k, v] : it->items()) {
      if (!v.is_string()) detail::field_error(child(child(path, "properties"), k), "expected a string");
      m.properties[k] = v.get<std::string>();
    }
  }
  return m;
}

IoRule io_rule_from_json(const json& j, const std::string& path) {
  detail::require_object(j, path);
  IoRule r;
  std::string kind = detail::get_string(j, "kind", path);
  auto parsed = parse_io_rule_kind(kind);
  if (!parsed) detail::field_error(child(path, "kind"), "unknown io rule kind \"" + kind + "\"");
  r.kind = *parsed;
  r.material = detail::get_string(j, "material", path);
  r.description = detail::get_string_or(j, "description", path, "");
  return r;
}

UnitSpec unit_from_json(const json& j, const std::string& path) {
  detail::require_object(j, path);
  UnitSpec u;
  u.id = detail::get_string(j, "id", path);
  u.display_name = detail::get_string_or(j, "display_name", path, u.id);
  u.aliases = detail::get_string_set(j, "aliases", path, false);
  u.inputs = detail::get_string_set(j, "inputs", path);
  u.outputs = detail::get_string_set(j, "outputs", path);
  if (auto it = j.find("io_rules"); it != j.end()) {
    const std::string p = child(path, "io_rules");
    detail::require_array(*it, p);
    for (std::size_t i = 0; i < it->size(); ++i) u.io_rules.push_back(io_rule_from_json((*it)[i], child(p, i)));
  }
  return u;
}

Motif motif_from_json(const json& j, const std::string& path) {
  detail::require_object(j, path);
  Motif m;
  m.id = detail::get_string(j, "id", path);
  m.unit_ids = detail::get_string_list(j, "unit_ids", path);
  m.provenance = detail::get_string_or(j, "provenance", path, "");
  m.archetypes = detail::get_string_set(j, "archetypes", path, false);
  const std::string p = child(path, "edges");
  const auto& edges = detail::require_array(detail::require(j, "edges", path), p);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string ep = child(p, i);
    m.edges.push_back({detail::get_string(edges[i], "from", ep), detail::get_string(edges[i], "to", ep),
                       detail::get_string(edges[i], "material", ep)});
  }
  return m;
}

CriticalPathRule rule_from_json(const json& j, const std::string& path) {
  detail::require_object(j, path);
  CriticalPathRule r;
  r.id = detail::get_string(j, "id", path);
  const std::string sp = child(path, "source_predicate");
  const auto& src = detail::require_object(detail::require(j, "source_predicate", path), sp);
  const bool has_unit = src.contains("unit");
  const bool has_material = src.contains("material");
  if (has_unit == has_material) detail::field_error(sp, "expected exactly one of \"unit\" or \"material\"");
  r.source.kind = has_unit ? SourcePredicate::Kind::kUnit : SourcePredicate::Kind::kMaterial;
  r.source.id = detail::get_string(src, has_unit ? "unit" : "material", sp);
  r.target_unit = detail::get_string(j, "target_unit", path);
  r.description = detail::get_string_or(j, "description", path, "");
  return r;
}

template <typename T, typename F>
std::vector<T> list_from_json(const json& root, const char* key, F convert) {
  const std::string p = std::string("/") + key;
  const auto& arr = detail::require_array(detail::require(root, key, ""), p);
  std::vector<T> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(convert(arr[i], child(p, i)));
  return out;
}

}  // namespace

KnowledgeBase parse_knowledge_base(std::string_view text) {
  json root = detail::parse_json_text(text, "knowledge base");
  detail::require_object(root, "");
  detail::check_format_version(root, "");
  KnowledgeBase kb(list_from_json<Material>(root, "materials", material_from_json),
                   list_from_json<UnitSpec>(root, "units", unit_from_json),
                   list_from_json<Motif>(root, "motifs", motif_from_json),
                   list_from_json<CriticalPathRule>(root, "critical_paths", rule_from_json),
                   detail::get_string_set(root, "archetypes", ""));
  auto violations = validate_knowledge_base(kb);
  if (!violations.empty()) {
    for (const auto& v : violations) {
      if (!v.missing_id.empty()) {
        throw Error(ErrorCode::kDanglingReference, v.entity + ": " + v.detail, v.missing_id);
      }
    }
    const auto& v = violations.front();
    throw Error(ErrorCode::kInvariant, v.entity + ": " + v.invariant + ": " + v.detail, v.entity);
  }
  return kb;
}

KnowledgeBase load_knowledge_base(const std::filesystem::path& path) {
  std::string text = read_text_file(path);
  try {
    return parse_knowledge_base(text);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what(), e.subject());
  }
}

std::string serialize_knowledge_base(const KnowledgeBase& kb) {
  using ojson = nlohmann::ordered_json;
  ojson root;
  root["format_version"] = kFormatVersion;
  ojson materials = ojson::array();
  for (const auto& m : kb.materials()) {
    ojson jm{{"id", m.id}, {"aliases", m.aliases}};
    if (!m.properties.empty()) jm["properties"] = m.properties;
    materials.push_back(std::move(jm));
  }
  ojson units = ojson::array();
  for (const auto& u : kb.units()) {
    ojson rules = ojson::array();
    for (const auto& r : u.io_rules) {
      rules.push_back({{"kind", io_rule_kind_name(r.kind)}, {"material", r.material}, {"description", r.description}});
    }
    units.push_back({{"id", u.id},
                     {"display_name", u.display_name},
                     {"aliases", u.aliases},
                     {"inputs", u.inputs},
                     {"outputs", u.outputs},
                     {"io_rules", rules}});
  }
  ojson motifs = ojson::array();
  for (const auto& m : kb.motifs()) {
    ojson edges = ojson::array();
    for (const auto& e : m.edges) edges.push_back({{"from", e.from}, {"to", e.to}, {"material", e.material}});
    ojson jm{{"id", m.id}, {"unit_ids", m.unit_ids}, {"edges", edges}, {"provenance", m.provenance}};
    if (!m.archetypes.empty()) jm["archetypes"] = m.archetypes;
    motifs.push_back(std::move(jm));
  }
  ojson rules = ojson::array();
  for (const auto& r : kb.critical_paths()) {
    ojson src;
    src[r.source.kind == SourcePredicate::Kind::kUnit ? "unit" : "material"] = r.source.id;
    rules.push_back(
        {{"id", r.id}, {"source_predicate", src}, {"target_unit", r.target_unit}, {"description", r.description}});
  }
  root["materials"] = std::move(materials);
  root["units"] = std::move(units);
  root["motifs"] = std::move(motifs);
  root["critical_paths"] = std::move(rules);
  root["archetypes"] = kb.archetypes();
  return root.dump(2) + "\n";
}

}  // namespace flowsynth
