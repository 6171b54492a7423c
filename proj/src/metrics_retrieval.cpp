#include "synthbench/metrics_retrieval.hpp"

#include <algorithm>

#include "synthbench/util.hpp"

namespace synthbench {

double relevance_rate(const RetrievedSet& set) {
  if (set.sources.empty()) return 0.0;
  if (set.grades.size() != set.sources.size())
    throw Error("InvalidGrades", set.task_id + ": " + std::to_string(set.grades.size()) +
                                     " grades for " +
                                     std::to_string(set.sources.size()) + " sources");
  double sum = 0.0;
  for (const auto& id : set.sources) {
    auto it = set.grades.find(id);
    if (it == set.grades.end())
      throw Error("InvalidGrades", set.task_id + ": no grade for source " + id);
    if (it->second < 0 || it->second > 2)
      throw Error("InvalidGrades", set.task_id + ": grade " +
                                       std::to_string(it->second) + " for " + id +
                                       " outside {0,1,2}");
    sum += it->second;
  }
  return sum / (2.0 * static_cast<double>(set.sources.size()));
}

std::optional<double> reference_coverage(const RetrievedSet& set,
                                         const ExemplarKeySet& keys) {
  if (keys.important_ids.empty()) return std::nullopt;
  long hit = 0;
  for (const auto& id : set.sources)
    if (keys.important_ids.count(id)) ++hit;
  return static_cast<double>(hit) / static_cast<double>(keys.important_ids.size());
}

double document_importance(const std::vector<double>& system_counts,
                           const std::vector<double>& exemplar_counts) {
  auto exemplar_median = median(exemplar_counts);
  if (!exemplar_median || *exemplar_median <= 0.0)
    throw Error("DegenerateBaselineMedian",
                exemplar_counts.empty()
                    ? "exemplar citation-count pool is empty"
                    : "exemplar citation-count median is not positive");
  auto system_median = median(system_counts);
  if (!system_median) return 0.0;
  return std::min(*system_median / *exemplar_median, 1.0);
}

RetrievedSet grade_retrieved_set(const PaperRecord& task,
                                 const std::vector<std::string>& source_ids,
                                 const MetadataFn& metadata, Judge& judge) {
  RetrievedSet set;
  set.task_id = task.task_id();
  for (const auto& id : source_ids)
    if (set.grades.emplace(id, 0).second) set.sources.push_back(id);

  std::vector<int> grades(set.sources.size(), 0);
  parallel_for(set.sources.size(), judge.config().max_parallel, [&](size_t i) {
    const std::string& id = set.sources[i];
    auto meta = metadata(id);
    if (!meta) {
      judge.log().flag("relevance", "no metadata for source " + id + " in task " +
                                        set.task_id + ", graded 0");
      grades[i] = 0;
      return;
    }
    grades[i] = judge.grade_relevance(task.title, task.abstract,
                                      task.related_work_clean, meta->first,
                                      meta->second);
  });
  for (size_t i = 0; i < set.sources.size(); ++i) set.grades[set.sources[i]] = grades[i];
  return set;
}

ExemplarKeySet exemplar_key_set(const PaperRecord& task) {
  ExemplarKeySet keys;
  keys.task_id = task.task_id();
  for (const auto& c : task.citations) {
    if (!c.arxiv_id) continue;
    if (c.important.value_or(false)) keys.important_ids.insert(*c.arxiv_id);
    if (c.citation_count)
      keys.exemplar_cite_counts.push_back(static_cast<double>(*c.citation_count));
  }
  return keys;
}

CitationsBreakdown citations_breakdown(const PaperRecord& task) {
  CitationsBreakdown b;
  b.task_id = task.task_id();
  for (const auto& c : task.citations) {
    if (c.important.value_or(false)) {
      if (c.arxiv_id)
        ++b.important_arxiv;
      else
        ++b.important_non_arxiv;
    } else {
      ++b.non_essential;
    }
  }
  return b;
}

}  // namespace synthbench
