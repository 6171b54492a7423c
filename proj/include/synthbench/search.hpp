#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "synthbench/cache.hpp"
#include "synthbench/dataset.hpp"
#include "synthbench/http.hpp"
#include "synthbench/util.hpp"

namespace synthbench {

struct SearchResult {
  std::string title;
  std::string snippet;  // abstract or provider excerpt
  std::string url;
  std::optional<std::string> arxiv_id;  // normalized when known
  std::optional<Date> published;

  bool operator==(const SearchResult&) const = default;
};

/// Leakage guard: results published after the query paper's publication date
/// never leave a provider. Undated results are dropped — the rule is total.
struct CutoffPolicy {
  Date cutoff_date;
};

std::vector<SearchResult> apply_cutoff(std::vector<SearchResult> results,
                                       const CutoffPolicy& cutoff);

class SearchProvider {
 public:
  virtual ~SearchProvider() = default;
  /// Up to k results, provider-relevance order, all published <= cutoff.
  virtual std::vector<SearchResult> search(const std::string& query, int k,
                                           const CutoffPolicy& cutoff) = 0;
  virtual std::string name() const = 0;
};

/// ArXiv API client: relevance-sorted keyword search plus id-list metadata
/// lookup (used to grade cited sources).
class ArxivSearchProvider : public SearchProvider {
 public:
  ArxivSearchProvider(std::shared_ptr<HttpTransport> transport,
                      std::string base_url = "https://export.arxiv.org/api/query");
  std::vector<SearchResult> search(const std::string& query, int k,
                                   const CutoffPolicy& cutoff) override;
  std::string name() const override { return "arxiv"; }

  /// Metadata by id, independent of any cutoff (ids the report already cites).
  std::map<std::string, SearchResult> lookup(const std::vector<std::string>& ids);

 private:
  std::vector<SearchResult> fetch(const std::string& query_params);

  std::shared_ptr<HttpTransport> transport_;
  std::string base_url_;
};

/// Web search via the Tavily API. Results without a parseable publication
/// date are dropped by the cutoff rule.
class TavilyProvider : public SearchProvider {
 public:
  TavilyProvider(std::shared_ptr<HttpTransport> transport, std::string api_key,
                 std::string base_url = "https://api.tavily.com");
  std::vector<SearchResult> search(const std::string& query, int k,
                                   const CutoffPolicy& cutoff) override;
  std::string name() const override { return "tavily"; }

 private:
  std::shared_ptr<HttpTransport> transport_;
  std::string api_key_;
  std::string base_url_;
};

/// Web search via the Parallel API; same date conservatism as Tavily.
class ParallelProvider : public SearchProvider {
 public:
  ParallelProvider(std::shared_ptr<HttpTransport> transport, std::string api_key,
                   std::string base_url = "https://api.parallel.ai");
  std::vector<SearchResult> search(const std::string& query, int k,
                                   const CutoffPolicy& cutoff) override;
  std::string name() const override { return "parallel"; }

 private:
  std::shared_ptr<HttpTransport> transport_;
  std::string api_key_;
  std::string base_url_;
};

/// Ablation provider: ignores the query and returns the task's labeled
/// important references. Cited works predate the citing paper by
/// construction, so results are stamped with the task's own date.
class OracleProvider : public SearchProvider {
 public:
  explicit OracleProvider(PaperRecord task);
  std::vector<SearchResult> search(const std::string& query, int k,
                                   const CutoffPolicy& cutoff) override;
  std::string name() const override { return "oracle"; }

 private:
  PaperRecord task_;
};

/// Offline provider driven by JSONL rules:
///   {"query_contains": "...", "results": [{title, snippet, url, arxiv_id,
///    published}]}
/// First matching rule wins; empty "query_contains" matches everything.
class FixtureProvider : public SearchProvider {
 public:
  struct Rule {
    std::string query_contains;
    std::vector<SearchResult> results;
  };

  explicit FixtureProvider(std::vector<Rule> rules);
  static FixtureProvider from_file(const std::filesystem::path& path);

  std::vector<SearchResult> search(const std::string& query, int k,
                                   const CutoffPolicy& cutoff) override;
  std::string name() const override { return "fixture"; }
  long call_count() const { return calls_; }

 private:
  std::vector<Rule> rules_;
  long calls_ = 0;
};

/// Decorator caching full responses keyed by (provider, query, k, cutoff),
/// so warm reruns issue zero provider calls.
class CachedSearchProvider : public SearchProvider {
 public:
  CachedSearchProvider(std::shared_ptr<SearchProvider> inner,
                       std::shared_ptr<DiskKv> cache);
  std::vector<SearchResult> search(const std::string& query, int k,
                                   const CutoffPolicy& cutoff) override;
  std::string name() const override { return inner_->name(); }

 private:
  std::shared_ptr<SearchProvider> inner_;
  std::shared_ptr<DiskKv> cache_;
};

// JSON round-trip for cacheable results (exposed for fixtures and tests).
std::string search_results_to_json(const std::vector<SearchResult>& results);
std::vector<SearchResult> search_results_from_json(const std::string& json_text);

}  // namespace synthbench
