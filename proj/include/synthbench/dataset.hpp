#pragma once

#include <optional>
#include <string>
#include <vector>

#include "synthbench/util.hpp"

namespace synthbench {

/// One enriched bibliography citation of an exemplar.
struct CitationRecord {
  std::string bib_key;
  std::string title;
  std::vector<std::string> authors;
  std::optional<std::string> abstract;
  std::optional<std::string> arxiv_id;     // normalized, version-stripped
  std::optional<std::string> external_id;  // scholarly-graph work id
  std::optional<std::string> url;
  std::optional<long> citation_count;
  std::optional<bool> important;
  bool unresolved = false;  // neither lookup could identify the work

  bool operator==(const CitationRecord&) const = default;
};

/// One benchmark task: a paper, its exemplar related-work section, and its
/// enriched citations.
struct PaperRecord {
  std::string arxiv_id;  // versioned, e.g. "2504.01234v1"
  std::string title;
  std::string abstract;
  std::vector<std::string> categories;
  std::string published;  // YYYY-MM-DD
  std::optional<std::string> comment;
  std::string related_work_latex;
  std::string related_work_clean;
  std::vector<CitationRecord> citations;

  bool operator==(const PaperRecord&) const = default;

  /// Version-stripped id ("2504.01234").
  std::string task_id() const;
  Date published_date() const;
};

/// Atomic facts extracted once from an exemplar and frozen alongside the
/// dataset so every system is scored against identical nuggets.
struct NuggetSet {
  std::string exemplar_id;  // task id
  std::vector<std::pair<std::string, bool>> nuggets;  // (text, vital)

  bool operator==(const NuggetSet&) const = default;
};

// --- JSONL dataset file -----------------------------------------------------

std::string to_json_line(const PaperRecord& record);
PaperRecord paper_record_from_json(const std::string& line);

void write_dataset(const std::filesystem::path& path,
                   const std::vector<PaperRecord>& records);
std::vector<PaperRecord> read_dataset(const std::filesystem::path& path);

/// Invariant violations for one record; empty means valid.
std::vector<std::string> validate_record(const PaperRecord& record,
                                         long max_related_words = 1000);
/// All violations across a dataset (prefixed with the record id).
std::vector<std::string> validate_dataset(const std::vector<PaperRecord>& records,
                                          long max_related_words = 1000);

// --- Nugget sidecar (<dataset>.nuggets.jsonl) --------------------------------

std::filesystem::path nugget_sidecar_path(const std::filesystem::path& dataset_path);
void write_nugget_sets(const std::filesystem::path& path,
                       const std::vector<NuggetSet>& sets);
std::vector<NuggetSet> read_nugget_sets(const std::filesystem::path& path);

}  // namespace synthbench
