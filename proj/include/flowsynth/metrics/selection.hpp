#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace flowsynth {

// Set of canonical unit ids (output of canonicalize_unit_name).
struct UnitSelection {
  std::set<std::string> units;

  bool operator==(const UnitSelection&) const = default;
};

enum class JudgeKind { kRule, kHuman, kExternal };

std::string_view judge_kind_name(JudgeKind kind);
JudgeKind parse_judge_kind(std::string_view name);

struct JustificationJudgment {
  std::string unit;
  bool valid = false;
  JudgeKind judge = JudgeKind::kRule;
  std::string note;
};

std::set<std::string> intersection(const UnitSelection& a, const UnitSelection& b);

// 2|P ∩ G| / (|P| + |G|); 1.0 when both sets are empty.
double unit_selection_f1(const UnitSelection& pred, const UnitSelection& gt);

// Fraction of units in pred ∩ gt whose justification was judged valid; 0.0
// when the intersection is empty. Throws Error(kMissingJudgment) listing the
// intersection units that have no judgment.
double cot_correctness(const std::vector<JustificationJudgment>& judgments, const UnitSelection& pred,
                       const UnitSelection& gt);

}  // namespace flowsynth
