#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace flowsynth {

// Scores for one benchmark task. A metric is absent when the stage that
// produces it was not run.
struct ScoredTask {
  std::string task_id;
  std::string archetype;
  std::optional<double> unf1;
  std::optional<double> cotc;
  std::optional<double> nged;
  std::optional<double> cspc;
  std::optional<double> iov;
  std::string error;  // non-empty when the task degraded to worst-case scores
};

struct ScoreAggregate {
  std::string group;  // archetype token or "overall"
  std::size_t tasks = 0;
  std::optional<double> unf1;
  std::optional<double> cotc;
  std::optional<double> nged;
  std::optional<double> cspc;
  std::optional<double> iov;
};

struct ScoreReport {
  std::vector<ScoredTask> per_task;
  std::vector<ScoreAggregate> aggregates;  // archetypes in canonical order, then "overall"
  std::vector<std::string> notes;
};

// Canonical archetype ordering: fuel, petrochemical, aromatics, then any other
// token alphabetically.
int archetype_rank(const std::string& archetype);

// Rows are ordered by archetype rank then task id. Each archetype aggregate is
// the unweighted mean over its tasks; "overall" is the unweighted mean of the
// archetype means. No tasks gives an empty report.
ScoreReport score_report(std::vector<ScoredTask> tasks);

// Merges metrics of reports keyed by task id (later reports fill gaps), then
// re-aggregates.
ScoreReport merge_reports(const ScoreReport& a, const ScoreReport& b);

nlohmann::ordered_json report_to_json(const ScoreReport& report);
ScoreReport report_from_json(const nlohmann::json& j);
std::string render_report_table(const ScoreReport& report);

}  // namespace flowsynth
