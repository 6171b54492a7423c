#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "synthbench/archive.hpp"
#include "synthbench/atom.hpp"
#include "synthbench/bib.hpp"
#include "synthbench/config.hpp"
#include "synthbench/dataset.hpp"
#include "synthbench/http.hpp"
#include "synthbench/openalex.hpp"
#include "synthbench/util.hpp"

namespace synthbench {

/// Dataset-build settings, loadable from a key/value config file.
struct HarvestConfig {
  std::vector<std::string> categories;
  Date date_start{};
  Date date_end{};
  bool require_accepted = false;
  long max_related_words = 1000;
  std::filesystem::path output_path;
  /// Regex override for the acceptance check; the default rule is a
  /// case-insensitive substring match for "accepted" or "published".
  std::optional<std::string> acceptance_pattern;
  int max_parallel = 4;
  int page_size = 100;  // listing page size per API request
  long max_records = 0;  // stop after this many accepted records (0 = no cap)
  std::filesystem::path cache_dir;  // disk cache root; empty = in-memory only
  std::string contact_email;
};

/// Builds and validates a HarvestConfig from `key = value` settings.
/// Throws Error("ConfigError") when a required field is missing or invalid.
HarvestConfig load_harvest_config(const KeyValueConfig& cfg);

/// Pure metadata predicate: the paper must be a v1 submission, published
/// inside [date_start, date_end], listed under at least one configured
/// category, and (when require_accepted) carry an acceptance note in its
/// comment field. No I/O.
bool filter_paper(const AtomEntry& meta, const HarvestConfig& config);

/// Versioned id ("2504.01234v1") from a feed entry id or bare id string.
std::string versioned_id_from_raw(const std::string& raw_id);

/// Where candidate papers, their sources, and title lookups come from.
class PaperSource {
 public:
  virtual ~PaperSource() = default;
  /// Candidate metadata for one category within the window.
  virtual std::vector<AtomEntry> list(const std::string& category, const Date& start,
                                      const Date& end) = 0;
  /// Raw e-print bytes for a versioned id; nullopt when none is available.
  virtual std::optional<std::string> fetch_source(const std::string& versioned_id) = 0;
  /// Title search used for citation resolution.
  virtual std::vector<AtomEntry> search_title(const std::string& title, int k) = 0;
  /// Metadata for specific ids, keyed by normalized id.
  virtual std::map<std::string, AtomEntry> lookup(const std::vector<std::string>& ids) = 0;
};

/// Live source backed by the ArXiv Atom API and e-print endpoint.
class ArxivPaperSource : public PaperSource {
 public:
  explicit ArxivPaperSource(std::shared_ptr<HttpTransport> transport,
                            std::string api_base = "https://export.arxiv.org/api/query",
                            std::string eprint_base = "https://export.arxiv.org/e-print/",
                            int page_size = 100);

  std::vector<AtomEntry> list(const std::string& category, const Date& start,
                              const Date& end) override;
  std::optional<std::string> fetch_source(const std::string& versioned_id) override;
  std::vector<AtomEntry> search_title(const std::string& title, int k) override;
  std::map<std::string, AtomEntry> lookup(const std::vector<std::string>& ids) override;

 private:
  AtomFeed fetch_feed(const std::string& query_suffix);

  std::shared_ptr<HttpTransport> transport_;
  std::string api_base_;
  std::string eprint_base_;
  int page_size_;
};

/// Scripted source for offline runs and tests.
class FixturePaperSource : public PaperSource {
 public:
  /// A candidate paper; `archive` is the raw e-print body (tar/gzip/plain
  /// TeX), nullopt meaning the e-print endpoint has nothing for it.
  void add_paper(AtomEntry entry, std::optional<std::string> archive);
  /// A work that title search / id lookup can resolve (citation targets).
  void add_known_work(AtomEntry entry);

  std::vector<AtomEntry> list(const std::string& category, const Date& start,
                              const Date& end) override;
  std::optional<std::string> fetch_source(const std::string& versioned_id) override;
  std::vector<AtomEntry> search_title(const std::string& title, int k) override;
  std::map<std::string, AtomEntry> lookup(const std::vector<std::string>& ids) override;

 private:
  std::vector<AtomEntry> papers_;
  std::map<std::string, std::optional<std::string>> archives_;  // versioned id
  std::vector<AtomEntry> known_works_;
};

/// Inlines \input{...}/\include{...} directives using the archive's file map
/// so sections split across files are visible to the section extractor.
std::string expand_inputs(const std::string& source, const FileMap& files,
                          int max_depth = 10);

/// Resolves one bibliography entry to an enriched citation. Resolution order:
/// an ArXiv id embedded in the entry, then ArXiv title search (exact
/// case-insensitive match first, then punctuation-insensitive), then the
/// scholarly graph at >= 0.9 title similarity. Fields the lookups cannot
/// supply are left absent; a record neither source recognizes is flagged
/// unresolved.
CitationRecord enrich_citation(const BibEntry& entry, PaperSource& arxiv,
                               OpenAlexClient& graph);

struct HarvestResult {
  std::vector<PaperRecord> records;
  std::vector<std::string> skipped;  // "id: reason" per rejected candidate
  long citation_total = 0;
  long citation_arxiv = 0;  // citations resolved to an ArXiv id
};

/// End-to-end dataset builder. Progress is checkpointed to an adjacent
/// "<output>.partial" file after every accepted record, so an interrupted
/// run resumes without refetching; the final dataset write is sorted by id
/// and therefore byte-identical across re-runs over the same snapshot.
class Harvester {
 public:
  Harvester(HarvestConfig config, std::shared_ptr<PaperSource> source,
            std::shared_ptr<OpenAlexClient> graph);

  HarvestResult run();

  /// Assembles one record from candidate metadata. Returns the skip reason
  /// when any stage rejects the paper.
  std::variant<PaperRecord, std::string> build_record(const AtomEntry& meta);

 private:
  HarvestConfig config_;
  std::shared_ptr<PaperSource> source_;
  std::shared_ptr<OpenAlexClient> graph_;
};

}  // namespace synthbench
