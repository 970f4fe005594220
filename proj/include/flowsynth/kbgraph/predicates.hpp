#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "flowsynth/kbgraph/knowledge_base.hpp"

namespace flowsynth {

// One clause of a mechanism predicate, evaluated over (intent, unit set).
struct Condition {
  enum class Kind {
    kAnyUnitRequiresInput,  // some unit in V has a requires_input rule on `id`
    kAnyUnitProduces,       // some unit in V has `id` in Out(u)
    kAnyUnitConsumes,       // some unit in V has `id` in In(u)
    kUnitPresent,           // unit `id` is in V
    kFeedstockIncludes,     // material `id` is in the intent's feedstock
    kProductIncludes,       // material `id` is in the intent's products
  };
  Kind kind;
  std::string id;

  bool refers_to_unit() const { return kind == Kind::kUnitPresent; }
};

std::string_view condition_kind_name(Condition::Kind kind);

// Declarative engineering predicate: holds iff not(all `when`) or all `then`.
// An empty `when` means the predicate always applies.
struct MechanismPredicate {
  std::string id;
  std::string description;
  std::vector<Condition> when;
  std::vector<Condition> then;
};

bool condition_holds(const Condition& c, const DesignIntent& intent, const std::set<std::string>& units,
                     const KnowledgeBase& kb);
bool predicate_triggered(const MechanismPredicate& p, const DesignIntent& intent, const std::set<std::string>& units,
                         const KnowledgeBase& kb);
bool predicate_holds(const MechanismPredicate& p, const DesignIntent& intent, const std::set<std::string>& units,
                     const KnowledgeBase& kb);

// Ids of entities referenced by any `then` clause that does not refer to a unit.
std::set<std::string> then_materials(const MechanismPredicate& p);
std::set<std::string> then_units(const MechanismPredicate& p);

// Violations for predicates referencing entities missing from kb.
std::vector<KbViolation> validate_predicates(const std::vector<MechanismPredicate>& predicates,
                                             const KnowledgeBase& kb);

std::vector<MechanismPredicate> parse_predicates(std::string_view text);
std::vector<MechanismPredicate> load_predicates(const std::filesystem::path& path);
nlohmann::ordered_json predicates_to_json(const std::vector<MechanismPredicate>& predicates);

}  // namespace flowsynth
