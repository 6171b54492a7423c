#include "synthbench/metrics_synthesis.hpp"

#include <atomic>

#include "synthbench/util.hpp"

namespace synthbench {

double org_win_rate(long wins, long ties, long scored) {
  if (scored <= 0) return 0.0;
  return (static_cast<double>(wins) + 0.5 * static_cast<double>(ties)) /
         static_cast<double>(scored);
}

OrgResult organization_score(const std::map<std::string, std::string>& reports_by_task,
                             const std::vector<PaperRecord>& exemplars, Judge& judge) {
  OrgResult result;
  std::vector<const PaperRecord*> scored;
  for (const auto& ex : exemplars) {
    if (reports_by_task.count(ex.task_id())) {
      scored.push_back(&ex);
    } else {
      ++result.skipped;
      judge.log().flag("organization", "no report for task " + ex.task_id());
    }
  }

  std::vector<OrgOutcome> outcomes(scored.size(), OrgOutcome::TIE);
  parallel_for(scored.size(), judge.config().max_parallel, [&](size_t i) {
    const PaperRecord& ex = *scored[i];
    const std::string& report = reports_by_task.at(ex.task_id());
    std::string ctx = "Title: " + ex.title + "\n\nAbstract: " + ex.abstract;
    OrgDecision d = judge.pairwise_organization(ctx, report, ex.related_work_clean);
    outcomes[i] = d == OrgDecision::A   ? OrgOutcome::WIN
                  : d == OrgDecision::B ? OrgOutcome::LOSS
                                        : OrgOutcome::TIE;
  });

  for (size_t i = 0; i < scored.size(); ++i) {
    result.per_report.emplace_back(scored[i]->task_id(), outcomes[i]);
    switch (outcomes[i]) {
      case OrgOutcome::WIN: ++result.wins; break;
      case OrgOutcome::TIE: ++result.ties; break;
      case OrgOutcome::LOSS: ++result.losses; break;
    }
  }
  result.win_rate =
      org_win_rate(result.wins, result.ties, static_cast<long>(scored.size()));
  return result;
}

NuggetCoverage nugget_coverage(const std::string& report_text, const NuggetSet& nuggets,
                               Judge& judge) {
  if (nuggets.nuggets.empty())
    throw Error("EmptyNuggets", "nugget set for " + nuggets.exemplar_id + " is empty");

  NuggetCoverage cov;
  cov.total = static_cast<long>(nuggets.nuggets.size());
  // vector<char>, not vector<bool>: parallel writes to packed bits would race.
  std::vector<char> full(nuggets.nuggets.size(), 0);
  parallel_for(nuggets.nuggets.size(), judge.config().max_parallel, [&](size_t i) {
    full[i] = judge.match_nugget(nuggets.nuggets[i].first, report_text) ==
                      NuggetMatchGrade::Support
                  ? 1
                  : 0;
  });
  for (size_t i = 0; i < nuggets.nuggets.size(); ++i) {
    bool vital = nuggets.nuggets[i].second;
    if (vital) ++cov.vital_total;
    if (full[i]) {
      ++cov.supported;
      if (vital) ++cov.vital_supported;
    }
  }
  cov.strict_all = static_cast<double>(cov.supported) / static_cast<double>(cov.total);
  if (cov.vital_total > 0)
    cov.vital_only =
        static_cast<double>(cov.vital_supported) / static_cast<double>(cov.vital_total);
  return cov;
}

NuggetSet build_nugget_set(const PaperRecord& exemplar, Judge& judge) {
  std::vector<std::string> texts = judge.nuggetize(exemplar.related_work_clean);
  if (texts.empty())
    throw Error("EmptyNuggets",
                "judge extracted no nuggets from exemplar " + exemplar.task_id());
  NuggetSet set;
  set.exemplar_id = exemplar.task_id();
  set.nuggets.resize(texts.size());
  parallel_for(texts.size(), judge.config().max_parallel, [&](size_t i) {
    set.nuggets[i] = {texts[i],
                      judge.nugget_is_vital(texts[i], exemplar.related_work_clean)};
  });
  return set;
}

}  // namespace synthbench
