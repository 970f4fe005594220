#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "flowsynth/kbgraph/knowledge_base.hpp"
#include "flowsynth/kbgraph/names.hpp"
#include "flowsynth/kbgraph/predicates.hpp"
#include "flowsynth/metrics/selection.hpp"

namespace flowsynth {

// Tokens that negate an entity mention when they occur within
// kNegationWindow tokens before it in the same segment.
inline constexpr std::string_view kNegationCues[] = {"no", "not", "without", "never"};
inline constexpr std::size_t kNegationWindow = 3;

// Rule-based stand-in for expert review of a unit's justification. Valid iff
//  (a) the rationale mentions the unit,
//  (b) it mentions at least one material of In(unit) ∪ Out(unit), and
//  (c) it contradicts no predicate: for every predicate whose `when` holds on
//      {unit} alone, no entity named in its `then` clauses is mentioned
//      under a negation cue.
// The note names the first failing rule. Throws Error(kUnknownUnit) when the
// unit is not in kb.
JustificationJudgment judge_justification(const std::string& unit, std::string_view rationale,
                                          const KnowledgeBase& kb,
                                          const std::vector<MechanismPredicate>& predicates);

// Same, reusing a prebuilt index over kb.
JustificationJudgment judge_justification(const std::string& unit, std::string_view rationale,
                                          const KnowledgeBase& kb,
                                          const std::vector<MechanismPredicate>& predicates,
                                          const MentionIndex& index);

}  // namespace flowsynth
