#include "flowsynth/adapter/judge.hpp"

#include <algorithm>
#include <set>

namespace flowsynth {

namespace {

bool negated(const Mention& m, const std::vector<std::vector<std::string>>& segments) {
  const auto& seg = segments[m.segment];
  const std::size_t from = m.token >= kNegationWindow ? m.token - kNegationWindow : 0;
  for (std::size_t i = from; i < m.token; ++i) {
    if (std::find(std::begin(kNegationCues), std::end(kNegationCues), seg[i]) != std::end(kNegationCues)) {
      return true;
    }
  }
  return false;
}

}  // namespace

JustificationJudgment judge_justification(const std::string& unit, std::string_view rationale,
                                          const KnowledgeBase& kb,
                                          const std::vector<MechanismPredicate>& predicates) {
  return judge_justification(unit, rationale, kb, predicates, MentionIndex(kb));
}

JustificationJudgment judge_justification(const std::string& unit, std::string_view rationale,
                                          const KnowledgeBase& kb,
                                          const std::vector<MechanismPredicate>& predicates,
                                          const MentionIndex& index) {
  const UnitSpec& spec = kb.unit(unit);
  JustificationJudgment j{unit, false, JudgeKind::kRule, ""};
  const auto mentions = index.scan(rationale);

  const bool names_unit = std::any_of(mentions.begin(), mentions.end(), [&](const Mention& m) {
    return m.kind == EntityKind::kUnit && m.id == unit;
  });
  if (!names_unit) {
    j.note = "unit not mentioned";
    return j;
  }
  const bool names_material = std::any_of(mentions.begin(), mentions.end(), [&](const Mention& m) {
    return m.kind == EntityKind::kMaterial && (spec.inputs.count(m.id) > 0 || spec.outputs.count(m.id) > 0);
  });
  if (!names_material) {
    j.note = "no input or output material mentioned";
    return j;
  }

  const auto segments = tokenize_segments(rationale);
  const DesignIntent no_intent;
  const std::set<std::string> alone{unit};
  // Checked in id order so the note does not depend on predicate file order.
  std::vector<const MechanismPredicate*> ordered;
  for (const auto& p : predicates) ordered.push_back(&p);
  std::sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) { return a->id < b->id; });
  for (const auto* p : ordered) {
    if (p->when.empty() || !predicate_triggered(*p, no_intent, alone, kb)) continue;
    const auto units = then_units(*p);
    const auto materials = then_materials(*p);
    for (const auto& m : mentions) {
      const bool referenced = m.kind == EntityKind::kUnit ? units.count(m.id) > 0 : materials.count(m.id) > 0;
      if (referenced && negated(m, segments)) {
        j.note = "contradicts " + p->id + " (negated " + m.id + ")";
        return j;
      }
    }
  }
  j.valid = true;
  return j;
}

}  // namespace flowsynth
