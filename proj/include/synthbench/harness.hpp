#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "synthbench/dataset.hpp"
#include "synthbench/judge.hpp"
#include "synthbench/metrics_retrieval.hpp"
#include "synthbench/metrics_synthesis.hpp"
#include "synthbench/metrics_verifiability.hpp"
#include "synthbench/report.hpp"

namespace synthbench {

/// What stands in for the system under test: reports read from a directory,
/// or each task's own exemplar section (the human reference row).
enum class EvalMode { System, HumanExemplar };

/// Citation-count lookup for document importance. The default is built from
/// the dataset's own enriched citations; a live run may chain a graph client
/// behind it.
using CountFn = std::function<std::optional<double>(const std::string&)>;

struct EvalConfig {
  std::string system_name = "system";
  EvalMode mode = EvalMode::System;
  int window = 1;             // headline claim-coverage window
  bool sweep_windows = false; // additionally score every window in 0..5
  CountFn count_fn;           // optional override for citation counts
};

/// One task's row: every cell optional so a judge failure on one metric
/// leaves the rest of the row (and the run) intact.
struct TaskScores {
  std::string task_id;
  bool has_report = false;
  std::optional<OrgOutcome> org;
  std::optional<double> nugget_coverage;
  std::optional<double> relevance_rate;
  std::optional<double> reference_coverage;
  std::optional<double> citation_precision;
  std::map<int, double> claim_coverage;  // window -> score
  ReportStats stats;
  std::vector<std::string> notes;  // why cells are missing, judge flags

  // Audit payloads for the per-task JSON dump.
  RetrievedSet retrieved;
  std::vector<CitationAudit> citation_audit;
  std::vector<SentenceAudit> sentence_audit;
};

/// Unweighted means over scored tasks; document importance is the pooled
/// median ratio, not a mean of per-task values.
struct AggregateScores {
  double organization = 0.0;  // tie-as-half win rate
  std::optional<double> nugget_coverage;
  std::optional<double> relevance_rate;
  std::optional<double> reference_coverage;
  std::optional<double> document_importance;
  std::optional<double> citation_precision;
  std::map<int, std::optional<double>> claim_coverage;  // window -> mean
  long org_wins = 0;
  long org_ties = 0;
  long org_losses = 0;
  long org_skipped = 0;
  std::vector<std::string> notes;  // corpus-level exclusions (e.g. DI baseline)
};

/// Mean report statistics over tasks with reports.
struct MeanStats {
  double chars = 0.0;
  double words = 0.0;
  double sentences = 0.0;
  double unique_refs = 0.0;
  double inline_citations = 0.0;
};

/// Everything needed to replay the run from caches alone.
struct RunManifest {
  std::string system_name;
  std::string config_digest;
  std::string dataset_digest;
  std::string judge_cache_digest;  // digest of sorted cache keys
  std::string general_model;
  std::string nugget_model;
  std::string started_at;   // UTC, ISO 8601
  std::string finished_at;  // UTC, ISO 8601
  std::string mode;         // "system" | "human-exemplar"
  int window = 1;
  long tasks = 0;
  long reports = 0;
  long missing_cells = 0;  // absent metric cells across tasks with reports
  long judge_flags = 0;
};

struct ScoreCard {
  std::string system;
  std::vector<TaskScores> tasks;
  AggregateScores aggregate;
  MeanStats mean_stats;  // means over tasks with reports
  RunManifest manifest;
};

/// Labels every citation whose importance is still undecided, in place, via
/// the judge (cached, so reruns are free). Returns how many were labeled.
long label_importance(std::vector<PaperRecord>& records, Judge& judge);

/// Loads the frozen nugget sidecar next to `dataset_path`, builds sets for
/// any tasks it lacks, persists the union, and returns sets in record order.
/// Once written, a set is never regenerated: every system faces the same
/// nuggets.
std::vector<NuggetSet> ensure_nugget_sets(const std::filesystem::path& dataset_path,
                                          const std::vector<PaperRecord>& records,
                                          Judge& judge);

/// Reads `<task_id>.md` (plus the optional `<task_id>.sources.jsonl` sidecar
/// written by `synthesize`) for each task and scores all seven metrics.
/// Throws Error("NoReports") when no task has a report; any other per-task
/// metric failure only blanks that cell.
ScoreCard evaluate(const std::vector<PaperRecord>& dataset,
                   const std::filesystem::path& reports_dir, const EvalConfig& config,
                   const std::vector<NuggetSet>& nuggets, Judge& judge);

/// Writes per_task.csv, aggregate.csv, scorecard.md, manifest.json, and
/// audits/<task_id>.json under `out_dir`.
void write_scorecard(const ScoreCard& card, const std::filesystem::path& out_dir);

/// Reads per_task.csv + aggregate.csv + manifest.json back into a ScoreCard
/// (audit payloads are not round-tripped). Used by `plot-data`.
ScoreCard read_scorecard(const std::filesystem::path& out_dir);

/// Fraction of aligned positions with identical labels.
/// Throws Error("LengthMismatch") on unequal lengths, Error("EmptyLabels")
/// when both lists are empty (agreement over zero positions is undefined).
double agreement(const std::vector<std::string>& labels_a,
                 const std::vector<std::string>& labels_b);

/// One label per line; blank lines and surrounding whitespace are ignored.
std::vector<std::string> read_labels(const std::filesystem::path& path);

/// Histogram of log10(1 + citation count), fixed-width bins.
struct HistogramBin {
  double lo = 0.0;  // inclusive
  double hi = 0.0;  // exclusive
  long count = 0;
};
std::vector<HistogramBin> log_histogram(const std::vector<double>& counts,
                                        double bin_width = 0.5);

/// Emits radar.csv (seven axes per system), window_sweep.csv (when sweep
/// data is present), and — when `dataset` is non-empty — the exemplar
/// citations_breakdown.csv and citation_histogram.csv.
void emit_plot_data(const std::vector<ScoreCard>& cards,
                    const std::vector<PaperRecord>& dataset,
                    const std::filesystem::path& out_dir);

}  // namespace synthbench
