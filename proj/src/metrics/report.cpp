#include "flowsynth/metrics/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "common/json_read.hpp"

namespace flowsynth {

namespace {

struct MetricColumn {
  const char* key;
  const char* header;
  std::optional<double> ScoredTask::*task_field;
  std::optional<double> ScoreAggregate::*aggregate_field;
};

constexpr MetricColumn kColumns[] = {
    {"unf1", "UNF1", &ScoredTask::unf1, &ScoreAggregate::unf1},
    {"cotc", "CoT-C", &ScoredTask::cotc, &ScoreAggregate::cotc},
    {"nged", "nGED", &ScoredTask::nged, &ScoreAggregate::nged},
    {"cspc", "CSPC", &ScoredTask::cspc, &ScoreAggregate::cspc},
    {"iov", "IOV", &ScoredTask::iov, &ScoreAggregate::iov},
};

std::optional<double> mean(const std::vector<double>& xs) {
  if (xs.empty()) return std::nullopt;
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

bool task_less(const ScoredTask& a, const ScoredTask& b) {
  const int ra = archetype_rank(a.archetype);
  const int rb = archetype_rank(b.archetype);
  if (ra != rb) return ra < rb;
  if (a.archetype != b.archetype) return a.archetype < b.archetype;
  return a.task_id < b.task_id;
}

std::string fmt_score(const std::optional<double>& x) {
  if (!x) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *x);
  return buf;
}

}  // namespace

int archetype_rank(const std::string& archetype) {
  if (archetype == "fuel") return 0;
  if (archetype == "petrochemical") return 1;
  if (archetype == "aromatics") return 2;
  return 3;
}

ScoreReport score_report(std::vector<ScoredTask> tasks) {
  ScoreReport report;
  std::sort(tasks.begin(), tasks.end(), task_less);
  report.per_task = std::move(tasks);
  if (report.per_task.empty()) return report;

  std::vector<std::string> groups;
  for (const auto& t : report.per_task) {
    if (groups.empty() || groups.back() != t.archetype) groups.push_back(t.archetype);
  }
  ScoreAggregate overall{"overall", report.per_task.size(), {}, {}, {}, {}, {}};
  std::map<std::string, std::vector<double>> group_means;  // metric -> archetype means
  for (const auto& g : groups) {
    ScoreAggregate agg{g, 0, {}, {}, {}, {}, {}};
    for (const auto& col : kColumns) {
      std::vector<double> xs;
      for (const auto& t : report.per_task) {
        if (t.archetype == g && (t.*col.task_field)) xs.push_back(*(t.*col.task_field));
      }
      agg.*col.aggregate_field = mean(xs);
      if (agg.*col.aggregate_field) group_means[col.key].push_back(*(agg.*col.aggregate_field));
    }
    agg.tasks = static_cast<std::size_t>(std::count_if(report.per_task.begin(), report.per_task.end(),
                                                       [&](const ScoredTask& t) { return t.archetype == g; }));
    report.aggregates.push_back(std::move(agg));
  }
  for (const auto& col : kColumns) overall.*col.aggregate_field = mean(group_means[col.key]);
  report.aggregates.push_back(std::move(overall));
  return report;
}

ScoreReport merge_reports(const ScoreReport& a, const ScoreReport& b) {
  std::map<std::string, ScoredTask> by_id;
  for (const auto* r : {&a, &b}) {
    for (const auto& t : r->per_task) {
      auto [it, inserted] = by_id.emplace(t.task_id, t);
      if (inserted) continue;
      for (const auto& col : kColumns) {
        if (t.*col.task_field) it->second.*col.task_field = t.*col.task_field;
      }
      if (!t.error.empty()) {
        it->second.error += (it->second.error.empty() ? "" : "; ") + t.error;
      }
    }
  }
  std::vector<ScoredTask> tasks;
  for (auto& [id, t] : by_id) tasks.push_back(std::move(t));
  ScoreReport merged = score_report(std::move(tasks));
  merged.notes = a.notes;
  for (const auto& n : b.notes) {
    if (std::find(merged.notes.begin(), merged.notes.end(), n) == merged.notes.end()) merged.notes.push_back(n);
  }
  return merged;
}

nlohmann::ordered_json report_to_json(const ScoreReport& report) {
  using ojson = nlohmann::ordered_json;
  ojson per_task = ojson::array();
  for (const auto& t : report.per_task) {
    ojson row{{"task_id", t.task_id}, {"archetype", t.archetype}};
    for (const auto& col : kColumns) {
      if (t.*col.task_field) row[col.key] = *(t.*col.task_field);
    }
    if (!t.error.empty()) row["error"] = t.error;
    per_task.push_back(std::move(row));
  }
  ojson aggregates = ojson::array();
  for (const auto& a : report.aggregates) {
    ojson row{{"group", a.group}, {"tasks", a.tasks}};
    for (const auto& col : kColumns) {
      if (a.*col.aggregate_field) row[col.key] = *(a.*col.aggregate_field);
    }
    aggregates.push_back(std::move(row));
  }
  return {{"per_task", per_task}, {"aggregates", aggregates}, {"notes", report.notes}};
}

ScoreReport report_from_json(const nlohmann::json& j) {
  std::vector<ScoredTask> tasks;
  const auto& rows = detail::require_array(detail::require(j, "per_task", ""), "/per_task");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string p = detail::child("/per_task", i);
    ScoredTask t;
    t.task_id = detail::get_string(rows[i], "task_id", p);
    t.archetype = detail::get_string(rows[i], "archetype", p);
    t.error = detail::get_string_or(rows[i], "error", p, "");
    for (const auto& col : kColumns) {
      auto it = rows[i].find(col.key);
      if (it == rows[i].end()) continue;
      if (!it->is_number()) detail::field_error(detail::child(p, col.key), "expected a number");
      t.*col.task_field = it->get<double>();
    }
    tasks.push_back(std::move(t));
  }
  ScoreReport report = score_report(std::move(tasks));
  report.notes = detail::get_string_list(j, "notes", "", false);
  return report;
}

std::string render_report_table(const ScoreReport& report) {
  std::vector<const MetricColumn*> cols;
  for (const auto& col : kColumns) {
    const bool used = std::any_of(report.per_task.begin(), report.per_task.end(),
                                  [&](const ScoredTask& t) { return (t.*col.task_field).has_value(); });
    if (used) cols.push_back(&col);
  }
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"task", "archetype"};
  for (const auto* c : cols) header.push_back(c->header);
  rows.push_back(header);
  for (const auto& t : report.per_task) {
    std::vector<std::string> row{t.task_id, t.archetype};
    for (const auto* c : cols) row.push_back(fmt_score(t.*c->task_field));
    rows.push_back(std::move(row));
  }
  const std::size_t task_rows = rows.size();
  for (const auto& a : report.aggregates) {
    std::vector<std::string> row{a.group == "overall" ? "Overall" : "mean", a.group == "overall" ? "" : a.group};
    for (const auto* c : cols) row.push_back(fmt_score(a.*c->aggregate_field));
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i > 0) out << "  ";
      if (i < 2) {
        out << r[i] << std::string(width[i] - r[i].size(), ' ');
      } else {
        out << std::string(width[i] - r[i].size(), ' ') << r[i];
      }
    }
    out << '\n';
  };
  std::size_t total = 0;
  for (std::size_t w : width) total += w;
  total += 2 * (width.size() - 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    emit(rows[i]);
    if (i == 0 || i + 1 == task_rows) out << std::string(total, '-') << '\n';
  }
  for (const auto& n : report.notes) out << "note: " << n << '\n';
  return out.str();
}

}  // namespace flowsynth
