#include "flowsynth/kbgraph/predicates.hpp"

#include <algorithm>

#include "common/json_read.hpp"
#include "flowsynth/errors.hpp"
#include "flowsynth/kbgraph/graph_io.hpp"

namespace flowsynth {

using detail::child;
using nlohmann::json;

namespace {

struct KindName {
  Condition::Kind kind;
  std::string_view name;
};

constexpr KindName kKindNames[] = {
    {Condition::Kind::kAnyUnitRequiresInput, "any_unit_requires_input"},
    {Condition::Kind::kAnyUnitProduces, "any_unit_produces"},
    {Condition::Kind::kAnyUnitConsumes, "any_unit_consumes"},
    {Condition::Kind::kUnitPresent, "unit_present"},
    {Condition::Kind::kFeedstockIncludes, "feedstock_includes"},
    {Condition::Kind::kProductIncludes, "product_includes"},
};

bool contains(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

bool all_hold(const std::vector<Condition>& cs, const DesignIntent& intent, const std::set<std::string>& units,
              const KnowledgeBase& kb) {
  return std::all_of(cs.begin(), cs.end(),
                     [&](const Condition& c) { return condition_holds(c, intent, units, kb); });
}

std::vector<Condition> conditions_from_json(const json& obj, const char* key, const std::string& path) {
  std::vector<Condition> out;
  auto it = obj.find(key);
  if (it == obj.end()) return out;
  const std::string p = child(path, key);
  // Either a single condition object or a list of them.
  std::vector<std::pair<const json*, std::string>> items;
  if (it->is_array()) {
    for (std::size_t i = 0; i < it->size(); ++i) items.emplace_back(&(*it)[i], child(p, i));
  } else {
    items.emplace_back(&*it, p);
  }
  for (const auto& [j, jp] : items) {
    detail::require_object(*j, jp);
    if (j->size() != 1) detail::field_error(jp, "a condition has exactly one key");
    const std::string name = j->begin().key();
    const json& value = j->begin().value();
    auto found = std::find_if(std::begin(kKindNames), std::end(kKindNames),
                              [&](const KindName& k) { return k.name == name; });
    if (found == std::end(kKindNames)) detail::field_error(child(jp, name), "unknown condition kind");
    if (!value.is_string()) detail::field_error(child(jp, name), "expected a string");
    out.push_back({found->kind, value.get<std::string>()});
  }
  return out;
}

nlohmann::ordered_json conditions_to_json(const std::vector<Condition>& cs) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : cs) arr.push_back({{std::string(condition_kind_name(c.kind)), c.id}});
  return arr;
}

}  // namespace

std::string_view condition_kind_name(Condition::Kind kind) {
  for (const auto& k : kKindNames) {
    if (k.kind == kind) return k.name;
  }
  return "?";
}

bool condition_holds(const Condition& c, const DesignIntent& intent, const std::set<std::string>& units,
                     const KnowledgeBase& kb) {
  switch (c.kind) {
    case Condition::Kind::kAnyUnitRequiresInput:
      return std::any_of(units.begin(), units.end(), [&](const std::string& u) {
        const auto& rules = kb.unit(u).io_rules;
        return std::any_of(rules.begin(), rules.end(), [&](const IoRule& r) {
          return r.kind == IoRuleKind::kRequiresInput && r.material == c.id;
        });
      });
    case Condition::Kind::kAnyUnitProduces:
      return std::any_of(units.begin(), units.end(),
                         [&](const std::string& u) { return kb.unit(u).outputs.count(c.id) > 0; });
    case Condition::Kind::kAnyUnitConsumes:
      return std::any_of(units.begin(), units.end(),
                         [&](const std::string& u) { return kb.unit(u).inputs.count(c.id) > 0; });
    case Condition::Kind::kUnitPresent:
      return units.count(c.id) > 0;
    case Condition::Kind::kFeedstockIncludes:
      return contains(intent.feedstock, c.id);
    case Condition::Kind::kProductIncludes:
      return contains(intent.products, c.id);
  }
  return false;
}

bool predicate_triggered(const MechanismPredicate& p, const DesignIntent& intent, const std::set<std::string>& units,
                         const KnowledgeBase& kb) {
  return all_hold(p.when, intent, units, kb);
}

bool predicate_holds(const MechanismPredicate& p, const DesignIntent& intent, const std::set<std::string>& units,
                     const KnowledgeBase& kb) {
  return !predicate_triggered(p, intent, units, kb) || all_hold(p.then, intent, units, kb);
}

std::set<std::string> then_materials(const MechanismPredicate& p) {
  std::set<std::string> out;
  for (const auto& c : p.then) {
    if (!c.refers_to_unit()) out.insert(c.id);
  }
  return out;
}

std::set<std::string> then_units(const MechanismPredicate& p) {
  std::set<std::string> out;
  for (const auto& c : p.then) {
    if (c.refers_to_unit()) out.insert(c.id);
  }
  return out;
}

std::vector<KbViolation> validate_predicates(const std::vector<MechanismPredicate>& predicates,
                                             const KnowledgeBase& kb) {
  std::vector<KbViolation> out;
  std::set<std::string> ids;
  for (const auto& p : predicates) {
    const std::string entity = "predicate:" + p.id;
    if (!ids.insert(p.id).second) out.push_back({entity, "id unique", "duplicate predicate id", ""});
    if (p.then.empty()) out.push_back({entity, "then nonempty", "predicate has no consequent", ""});
    for (const auto* list : {&p.when, &p.then}) {
      for (const auto& c : *list) {
        const bool ok = c.refers_to_unit() ? kb.has_unit(c.id) : kb.has_material(c.id);
        if (!ok) {
          out.push_back({entity, "reference",
                         std::string(condition_kind_name(c.kind)) + " references unknown id \"" + c.id + "\"", c.id});
        }
      }
    }
  }
  return out;
}

std::vector<MechanismPredicate> parse_predicates(std::string_view text) {
  json root = detail::parse_json_text(text, "predicates");
  detail::require_array(root, "");
  std::vector<MechanismPredicate> out;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const std::string p = child("", i);
    detail::require_object(root[i], p);
    MechanismPredicate pred;
    pred.id = detail::get_string(root[i], "id", p);
    pred.description = detail::get_string_or(root[i], "description", p, "");
    const auto& check = detail::require_object(detail::require(root[i], "check", p), child(p, "check"));
    pred.when = conditions_from_json(check, "when", child(p, "check"));
    pred.then = conditions_from_json(check, "then", child(p, "check"));
    out.push_back(std::move(pred));
  }
  return out;
}

std::vector<MechanismPredicate> load_predicates(const std::filesystem::path& path) {
  std::string text = read_text_file(path);
  try {
    return parse_predicates(text);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what(), e.subject());
  }
}

nlohmann::ordered_json predicates_to_json(const std::vector<MechanismPredicate>& predicates) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& p : predicates) {
    arr.push_back({{"id", p.id},
                   {"description", p.description},
                   {"check", {{"when", conditions_to_json(p.when)}, {"then", conditions_to_json(p.then)}}}});
  }
  return arr;
}

}  // namespace flowsynth
