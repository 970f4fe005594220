#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace flowsynth {

using MaterialSet = std::set<std::string>;

struct Material {
  std::string id;
  std::set<std::string> aliases;
  std::map<std::string, std::string> properties;
};

enum class IoRuleKind { kRequiresInput, kRequiresOutput, kForbidsInput };

std::string_view io_rule_kind_name(IoRuleKind kind);
std::optional<IoRuleKind> parse_io_rule_kind(std::string_view name);

struct IoRule {
  IoRuleKind kind = IoRuleKind::kRequiresInput;
  std::string material;
  std::string description;
};

struct UnitSpec {
  std::string id;
  std::string display_name;
  std::set<std::string> aliases;
  MaterialSet inputs;   // In(u)
  MaterialSet outputs;  // Out(u)
  std::vector<IoRule> io_rules;
};

// Where a critical path starts: every node of a named unit, or every node
// whose unit emits a given material.
struct SourcePredicate {
  enum class Kind { kUnit, kMaterial };
  Kind kind = Kind::kMaterial;
  std::string id;
};

struct CriticalPathRule {
  std::string id;
  SourcePredicate source;
  std::string target_unit;
  std::string description;
};

struct MotifEdge {
  std::string from;
  std::string to;
  std::string material;
};

struct Motif {
  std::string id;
  std::vector<std::string> unit_ids;
  std::vector<MotifEdge> edges;
  std::string provenance;
  // Archetypes the motif is known to occur in. Empty means any archetype.
  std::set<std::string> archetypes;

  bool fits_archetype(std::string_view archetype) const;
};

struct DesignIntent {
  std::vector<std::string> feedstock;
  std::vector<std::string> products;
  std::string archetype;
  std::vector<std::string> constraints;
};

struct KbViolation {
  std::string entity;     // e.g. "unit:cdu", "motif:naphtha_block"
  std::string invariant;  // short invariant name
  std::string detail;
  std::string missing_id;  // set for dangling references
};

// Unit library, material space, motifs and critical-path rules. Immutable
// once constructed; the constructor only rejects duplicate ids, everything
// else is reported by validate_knowledge_base().
class KnowledgeBase {
 public:
  KnowledgeBase() = default;
  KnowledgeBase(std::vector<Material> materials, std::vector<UnitSpec> units, std::vector<Motif> motifs,
                std::vector<CriticalPathRule> critical_paths, std::set<std::string> archetypes);

  const std::vector<Material>& materials() const { return materials_; }
  const std::vector<UnitSpec>& units() const { return units_; }
  const std::vector<Motif>& motifs() const { return motifs_; }
  const std::vector<CriticalPathRule>& critical_paths() const { return critical_paths_; }
  const std::set<std::string>& archetypes() const { return archetypes_; }

  const UnitSpec* find_unit(std::string_view id) const;
  const Material* find_material(std::string_view id) const;
  const CriticalPathRule* find_rule(std::string_view id) const;

  // Throws Error(kUnknownUnit) on a miss.
  const UnitSpec& unit(std::string_view id) const;

  bool has_unit(std::string_view id) const { return find_unit(id) != nullptr; }
  bool has_material(std::string_view id) const { return find_material(id) != nullptr; }

 private:
  std::vector<Material> materials_;
  std::vector<UnitSpec> units_;
  std::vector<Motif> motifs_;
  std::vector<CriticalPathRule> critical_paths_;
  std::set<std::string> archetypes_;
  std::map<std::string, std::size_t, std::less<>> material_index_;
  std::map<std::string, std::size_t, std::less<>> unit_index_;
  std::map<std::string, std::size_t, std::less<>> rule_index_;
};

std::vector<KbViolation> validate_knowledge_base(const KnowledgeBase& kb);

KnowledgeBase parse_knowledge_base(std::string_view text);
KnowledgeBase load_knowledge_base(const std::filesystem::path& path);
std::string serialize_knowledge_base(const KnowledgeBase& kb);

bool shares_material(const MaterialSet& a, const MaterialSet& b);

}  // namespace flowsynth
