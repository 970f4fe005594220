#include "flowsynth/metrics/selection.hpp"

#include <algorithm>
#include <iterator>
#include <map>

#include "flowsynth/errors.hpp"

namespace flowsynth {

std::string_view judge_kind_name(JudgeKind kind) {
  switch (kind) {
    case JudgeKind::kRule: return "rule";
    case JudgeKind::kHuman: return "human";
    case JudgeKind::kExternal: return "external";
  }
  return "rule";
}

JudgeKind parse_judge_kind(std::string_view name) {
  if (name == "rule") return JudgeKind::kRule;
  if (name == "human") return JudgeKind::kHuman;
  if (name == "external") return JudgeKind::kExternal;
  throw Error(ErrorCode::kParse, "unknown judge kind \"" + std::string(name) + "\"", std::string(name));
}

std::set<std::string> intersection(const UnitSelection& a, const UnitSelection& b) {
  std::set<std::string> out;
  std::set_intersection(a.units.begin(), a.units.end(), b.units.begin(), b.units.end(),
                        std::inserter(out, out.end()));
  return out;
}

double unit_selection_f1(const UnitSelection& pred, const UnitSelection& gt) {
  const std::size_t denom = pred.units.size() + gt.units.size();
  if (denom == 0) return 1.0;
  return 2.0 * static_cast<double>(intersection(pred, gt).size()) / static_cast<double>(denom);
}

double cot_correctness(const std::vector<JustificationJudgment>& judgments, const UnitSelection& pred,
                       const UnitSelection& gt) {
  const auto common = intersection(pred, gt);
  if (common.empty()) return 0.0;
  // A unit judged more than once counts as valid only if every judgment agrees.
  std::map<std::string, bool> verdict;
  for (const auto& j : judgments) {
    auto [it, inserted] = verdict.emplace(j.unit, j.valid);
    if (!inserted) it->second = it->second && j.valid;
  }
  std::string missing;
  std::size_t valid = 0;
  for (const auto& u : common) {
    auto it = verdict.find(u);
    if (it == verdict.end()) {
      missing += (missing.empty() ? "" : ", ") + u;
    } else if (it->second) {
      ++valid;
    }
  }
  if (!missing.empty()) {
    throw Error(ErrorCode::kMissingJudgment, "no justification judgment for: " + missing, missing);
  }
  return static_cast<double>(valid) / static_cast<double>(common.size());
}

}  // namespace flowsynth
