#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "synthbench/dataset.hpp"
#include "synthbench/judge.hpp"

namespace synthbench {

enum class OrgOutcome { WIN, TIE, LOSS };

/// Corpus-level organization result: per-task outcomes against the exemplar
/// plus the tie-as-half win rate.
struct OrgResult {
  std::vector<std::pair<std::string, OrgOutcome>> per_report;  // (task id, outcome)
  long wins = 0;
  long ties = 0;
  long losses = 0;
  long skipped = 0;  // tasks with no report
  double win_rate = 0.0;
};

/// (wins + 0.5 * ties) / scored; 0 when nothing was scored.
double org_win_rate(long wins, long ties, long scored);

/// Pairwise-judges every report against its task's exemplar section. Tasks
/// missing a report are skipped, flagged, and excluded from the denominator.
OrgResult organization_score(const std::map<std::string, std::string>& reports_by_task,
                             const std::vector<PaperRecord>& exemplars, Judge& judge);

struct NuggetCoverage {
  double strict_all = 0.0;           // fully-supported nuggets / all nuggets
  std::optional<double> vital_only;  // same over vital nuggets; empty when none
  long supported = 0;
  long vital_supported = 0;
  long total = 0;
  long vital_total = 0;
};

/// Fraction of frozen nuggets the report fully supports.
NuggetCoverage nugget_coverage(const std::string& report_text, const NuggetSet& nuggets,
                               Judge& judge);

/// Extracts and labels nuggets from one exemplar section. Run once per task
/// and frozen to the dataset sidecar so every system faces identical nuggets.
NuggetSet build_nugget_set(const PaperRecord& exemplar, Judge& judge);

}  // namespace synthbench
