#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "synthbench/cache.hpp"
#include "synthbench/http.hpp"

namespace synthbench {

struct OpenAlexWork {
  std::string id;  // bare work id ("W...")
  std::string title;
  std::optional<std::string> abstract;
  std::optional<long> cited_by_count;
  std::optional<std::string> doi;       // bare DOI, no resolver prefix
  std::optional<std::string> arxiv_id;  // normalized, when a location links ArXiv
  std::optional<std::string> landing_url;
};

/// Rebuilds abstract text from the (word -> positions) inverted index the
/// scholarly-graph API publishes instead of plain text.
std::string reconstruct_abstract(
    const std::vector<std::pair<std::string, std::vector<long>>>& index);

/// Scholarly-graph client: citation counts and fuzzy title resolution.
/// Responses (including not-found outcomes) are cached so warm reruns issue
/// zero network calls.
class OpenAlexClient {
 public:
  OpenAlexClient(std::shared_ptr<HttpTransport> transport, std::string contact_email,
                 std::shared_ptr<DiskKv> cache = nullptr,
                 std::string base_url = "https://api.openalex.org");

  /// Count for an ArXiv id (resolved through its registered DOI) or a bare
  /// work id. Absent — never zero — when the work is unresolvable.
  std::optional<long> fetch_citation_count(const std::string& id);

  /// Best title-search hit at or above min_similarity, else nullopt.
  std::optional<OpenAlexWork> find_by_title(const std::string& title,
                                            double min_similarity = 0.9);

 private:
  std::string get_body(const std::string& url);  // "" encodes not-found

  std::shared_ptr<HttpTransport> transport_;
  std::string contact_email_;
  std::shared_ptr<DiskKv> cache_;
  std::string base_url_;
};

}  // namespace synthbench
