#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "synthbench/dataset.hpp"
#include "synthbench/judge.hpp"

namespace synthbench {

/// The sources a system's report cites for one task, with judged relevance
/// grades keyed exactly by source id.
struct RetrievedSet {
  std::string task_id;
  std::vector<std::string> sources;  // normalized ArXiv ids, unique
  std::map<std::string, int> grades;  // id -> relevance grade in {0,1,2}
};

/// Per-task key facts from the exemplar: which ArXiv-resolvable citations are
/// important, and the known citation counts of its ArXiv references.
struct ExemplarKeySet {
  std::string task_id;
  std::set<std::string> important_ids;
  std::vector<double> exemplar_cite_counts;  // counts known for ArXiv refs
};

/// Average graded relevance, normalized so all-grade-2 scores 1. Empty source
/// sets score 0. Throws InvalidGrades when grades and sources disagree.
double relevance_rate(const RetrievedSet& set);

/// Fraction of the exemplar's important ArXiv references the system found.
/// Empty important sets return nullopt: the task is excluded, not scored 0.
std::optional<double> reference_coverage(const RetrievedSet& set,
                                         const ExemplarKeySet& keys);

/// Clamped ratio of pooled citation-count medians, system over exemplar.
/// Throws DegenerateBaselineMedian when the exemplar pool is empty or its
/// median is 0. An empty system pool scores 0.
double document_importance(const std::vector<double>& system_counts,
                           const std::vector<double>& exemplar_counts);

/// (title, abstract) lookup for a normalized ArXiv id; nullopt when unknown.
using MetadataFn =
    std::function<std::optional<std::pair<std::string, std::string>>(const std::string&)>;

/// Judges a relevance grade for every source against the task's exemplar
/// section. Sources with no metadata are graded 0 and flagged.
RetrievedSet grade_retrieved_set(const PaperRecord& task,
                                 const std::vector<std::string>& source_ids,
                                 const MetadataFn& metadata, Judge& judge);

/// Important ids and known citation counts from the exemplar's citations.
ExemplarKeySet exemplar_key_set(const PaperRecord& task);

/// Per-exemplar citation composition for the plotting table.
struct CitationsBreakdown {
  std::string task_id;
  long important_arxiv = 0;
  long important_non_arxiv = 0;
  long non_essential = 0;
};

CitationsBreakdown citations_breakdown(const PaperRecord& task);

}  // namespace synthbench
