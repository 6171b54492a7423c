#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "synthbench/config.hpp"
#include "synthbench/dataset.hpp"
#include "synthbench/judge.hpp"
#include "synthbench/report.hpp"
#include "synthbench/search.hpp"

namespace synthbench {

/// Reference-pipeline settings: N rounds of Q queries against a provider,
/// then filter, top-K ranking, and aggregation.
struct PipelineConfig {
  int num_rounds = 2;
  int queries_per_round = 2;
  int search_k = 50;
  int final_k = 30;
  std::string generator_model = "gpt-4o-2024-08-06";  // aggregation call
  std::string operator_model = "gpt-4o-2024-08-06";   // queries/filter/top-k
  std::string provider = "arxiv";
  /// Budget for the inter-round background summary (concatenated titles of
  /// the previous rounds' hits, truncated to this many characters).
  int background_chars = 1000;
};

/// Loads and validates pipeline settings; Error("ConfigError") on bad values.
PipelineConfig load_pipeline_config(const KeyValueConfig& cfg);

/// One retrieved source moving through the pipeline stages.
struct CandidateDoc {
  std::string title;
  std::string snippet;
  std::string url;
  std::optional<std::string> arxiv_id;  // normalized
  std::optional<Date> published;
  int round_found = 0;
  int citation_number = 0;  // dense 1..M once aggregation assigns it

  bool operator==(const CandidateDoc&) const = default;
};

CandidateDoc candidate_from(const SearchResult& hit, int round);

/// "Title: ...\n\nAbstract: ..." — the task description used as the user
/// query for every pipeline prompt.
std::string task_topic(const PaperRecord& task);

/// The text a doc contributes to filter/ranking prompts.
std::string doc_text(const CandidateDoc& doc);

/// Asks the generator for n distinct keyword queries. Duplicates are dropped
/// (logged); fewer than n parseable queries is logged but not fatal.
std::vector<std::string> generate_queries(Judge& judge, const std::string& model,
                                          const std::string& topic,
                                          const std::string& background, int n,
                                          const std::string& date);

/// Keeps docs the operator model judges relevant; order preserved. An
/// unparseable verdict keeps the doc (recall-preserving) and flags the log.
std::vector<CandidateDoc> semantic_filter(Judge& judge, const std::string& model,
                                          const std::vector<CandidateDoc>& docs,
                                          const std::string& topic);

/// Ranks docs by judged pairwise relevance (merge reduction over operator
/// comparisons, seeded and tie-broken by retrieval order) and returns the
/// top min(k, |docs|).
std::vector<CandidateDoc> semantic_topk(Judge& judge, const std::string& model,
                                        std::vector<CandidateDoc> docs,
                                        const std::string& topic, int k);

/// Final completion answer for one ranking comparison: 1 or 2.
std::optional<int> parse_topk_choice(const std::string& raw);

/// Assigns dense citation numbers, renders the aggregation prompt with
/// numbered contexts, and returns the report text with a machine-readable
/// reference list appended. Throws Error("NoSources") when docs is empty.
std::string aggregate_report(Judge& judge, const std::string& model,
                             std::vector<CandidateDoc>& docs, const std::string& topic,
                             const std::string& existing_content = "");

/// One task's pipeline outcome.
struct TaskRun {
  std::string task_id;
  std::string report_text;
  std::vector<CandidateDoc> final_docs;  // citation numbers assigned
  std::vector<std::string> queries;      // all rounds, in issue order
  long candidates_seen = 0;              // pre-dedup retrieval volume
  bool failed = false;
  std::string failure;  // diagnostic when failed
};

/// Full reference pipeline for one task. The task's own publication date is
/// the leakage cutoff. Stage errors yield a failure record, not a throw.
TaskRun run_pipeline(const PaperRecord& task, const PipelineConfig& cfg, Judge& judge,
                     SearchProvider& provider);

/// Docs whose publication date is missing or postdates the cutoff
/// ("id/url: date" strings; empty means leakage-safe).
std::vector<std::string> leakage_violations(const std::vector<CandidateDoc>& docs,
                                            const Date& cutoff);

/// Inline markers that do not resolve to a final doc number in 1..M.
std::vector<int> dangling_markers(const Report& report, size_t num_docs);

/// Evidence text per reference target (arXiv id when known, else URL):
/// "title\nsnippet" — the snippet store the verifiability metrics consume.
std::map<std::string, std::string> snippet_map_for(const std::vector<CandidateDoc>& docs);

// --- sources sidecar (one doc per line, citation-number order) ---------------

void write_candidate_docs(const std::filesystem::path& path,
                          const std::vector<CandidateDoc>& docs);
std::vector<CandidateDoc> read_candidate_docs(const std::filesystem::path& path);

}  // namespace synthbench
