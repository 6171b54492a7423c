#include "synthbench/search.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

#include "synthbench/arxiv_id.hpp"
#include "synthbench/atom.hpp"

namespace synthbench {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::vector<SearchResult> apply_cutoff(std::vector<SearchResult> results,
                                       const CutoffPolicy& cutoff) {
  std::erase_if(results, [&](const SearchResult& r) {
    return !r.published || !(*r.published <= cutoff.cutoff_date);
  });
  return results;
}

namespace {

void truncate(std::vector<SearchResult>& results, int k) {
  if (k >= 0 && results.size() > static_cast<size_t>(k))
    results.resize(static_cast<size_t>(k));
}

std::optional<Date> parse_result_date(const std::string& raw) {
  if (raw.size() >= 10) return parse_date(raw.substr(0, 10));
  return parse_date(raw);
}

}  // namespace

// --- serialization -----------------------------------------------------------

std::string search_results_to_json(const std::vector<SearchResult>& results) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : results) {
    ordered_json j;
    j["title"] = r.title;
    j["snippet"] = r.snippet;
    j["url"] = r.url;
    if (r.arxiv_id) j["arxiv_id"] = *r.arxiv_id;
    if (r.published) j["published"] = r.published->str();
    arr.push_back(std::move(j));
  }
  return arr.dump();
}

std::vector<SearchResult> search_results_from_json(const std::string& json_text) {
  std::vector<SearchResult> results;
  json arr = json::parse(json_text);
  for (const auto& j : arr) {
    SearchResult r;
    r.title = j.value("title", "");
    r.snippet = j.value("snippet", "");
    r.url = j.value("url", "");
    if (j.contains("arxiv_id"))
      r.arxiv_id = normalize_arxiv_id(j.at("arxiv_id").get<std::string>());
    if (j.contains("published"))
      r.published = parse_result_date(j.at("published").get<std::string>());
    results.push_back(std::move(r));
  }
  return results;
}

// --- ArXiv -------------------------------------------------------------------

ArxivSearchProvider::ArxivSearchProvider(std::shared_ptr<HttpTransport> transport,
                                         std::string base_url)
    : transport_(std::move(transport)), base_url_(std::move(base_url)) {}

std::vector<SearchResult> ArxivSearchProvider::fetch(const std::string& query_params) {
  HttpResponse resp = transport_->get(base_url_ + query_params, {});
  if (!resp.ok())
    throw Error("Unavailable",
                "arxiv api returned status " + std::to_string(resp.status));
  AtomFeed feed = parse_atom_feed(resp.body);
  std::vector<SearchResult> results;
  for (const auto& e : feed.entries) {
    SearchResult r;
    r.title = collapse_ws(e.title);
    r.snippet = collapse_ws(e.summary);
    r.arxiv_id = e.arxiv_id;
    r.url = arxiv_abs_url(e.arxiv_id);
    if (!e.published.empty()) r.published = parse_result_date(e.published);
    results.push_back(std::move(r));
  }
  return results;
}

std::vector<SearchResult> ArxivSearchProvider::search(const std::string& query, int k,
                                                      const CutoffPolicy& cutoff) {
  if (trim(query).empty()) throw Error("BadQuery", "empty search query");
  std::string params = "?search_query=all:" + url_encode(query) +
                       "&start=0&max_results=" + std::to_string(k) +
                       "&sortBy=relevance&sortOrder=descending";
  auto results = apply_cutoff(fetch(params), cutoff);
  truncate(results, k);
  return results;
}

std::map<std::string, SearchResult> ArxivSearchProvider::lookup(
    const std::vector<std::string>& ids) {
  std::map<std::string, SearchResult> found;
  if (ids.empty()) return found;
  std::string joined;
  for (const auto& id : ids) {
    if (!joined.empty()) joined += ",";
    joined += id;
  }
  std::string params = "?id_list=" + url_encode(joined) +
                       "&max_results=" + std::to_string(ids.size());
  for (auto& r : fetch(params))
    if (r.arxiv_id) found[normalize_arxiv_id(*r.arxiv_id)] = std::move(r);
  return found;
}

// --- Tavily --------------------------------------------------------------------

TavilyProvider::TavilyProvider(std::shared_ptr<HttpTransport> transport,
                               std::string api_key, std::string base_url)
    : transport_(std::move(transport)),
      api_key_(std::move(api_key)),
      base_url_(std::move(base_url)) {}

std::vector<SearchResult> TavilyProvider::search(const std::string& query, int k,
                                                 const CutoffPolicy& cutoff) {
  if (trim(query).empty()) throw Error("BadQuery", "empty search query");
  json body = {{"api_key", api_key_},
               {"query", query},
               {"max_results", k},
               {"search_depth", "advanced"}};
  Headers headers = {{"Authorization", "Bearer " + api_key_}};
  HttpResponse resp =
      transport_->post(base_url_ + "/search", body.dump(), "application/json", headers);
  if (!resp.ok())
    throw Error("Unavailable",
                "tavily returned status " + std::to_string(resp.status));
  std::vector<SearchResult> results;
  json j = json::parse(resp.body);
  for (const auto& item : j.value("results", json::array())) {
    SearchResult r;
    r.title = item.value("title", "");
    r.snippet = item.value("content", "");
    r.url = item.value("url", "");
    if (auto id = arxiv_id_from_url(r.url)) r.arxiv_id = *id;
    std::string date = item.value("published_date", item.value("publish_date", ""));
    if (!date.empty()) r.published = parse_result_date(date);
    results.push_back(std::move(r));
  }
  results = apply_cutoff(std::move(results), cutoff);
  truncate(results, k);
  return results;
}

// --- Parallel ------------------------------------------------------------------

ParallelProvider::ParallelProvider(std::shared_ptr<HttpTransport> transport,
                                   std::string api_key, std::string base_url)
    : transport_(std::move(transport)),
      api_key_(std::move(api_key)),
      base_url_(std::move(base_url)) {}

std::vector<SearchResult> ParallelProvider::search(const std::string& query, int k,
                                                   const CutoffPolicy& cutoff) {
  if (trim(query).empty()) throw Error("BadQuery", "empty search query");
  json body = {{"objective", query}, {"max_results", k}};
  Headers headers = {{"x-api-key", api_key_}};
  HttpResponse resp = transport_->post(base_url_ + "/v1beta/search", body.dump(),
                                       "application/json", headers);
  if (!resp.ok())
    throw Error("Unavailable",
                "parallel returned status " + std::to_string(resp.status));
  std::vector<SearchResult> results;
  json j = json::parse(resp.body);
  for (const auto& item : j.value("results", json::array())) {
    SearchResult r;
    r.title = item.value("title", "");
    r.url = item.value("url", "");
    if (item.contains("excerpts")) {
      for (const auto& ex : item.at("excerpts")) {
        if (!r.snippet.empty()) r.snippet += " ";
        r.snippet += ex.get<std::string>();
      }
    }
    if (auto id = arxiv_id_from_url(r.url)) r.arxiv_id = *id;
    std::string date = item.value("published_date", item.value("publish_date", ""));
    if (!date.empty()) r.published = parse_result_date(date);
    results.push_back(std::move(r));
  }
  results = apply_cutoff(std::move(results), cutoff);
  truncate(results, k);
  return results;
}

// --- Oracle --------------------------------------------------------------------

OracleProvider::OracleProvider(PaperRecord task) : task_(std::move(task)) {}

std::vector<SearchResult> OracleProvider::search(const std::string&, int k,
                                                 const CutoffPolicy& cutoff) {
  std::vector<SearchResult> results;
  Date task_date = task_.published_date();
  for (const auto& c : task_.citations) {
    if (!c.important.value_or(false)) continue;
    SearchResult r;
    r.title = c.title;
    r.snippet = c.abstract.value_or("");
    if (c.arxiv_id) {
      r.arxiv_id = normalize_arxiv_id(*c.arxiv_id);
      r.url = arxiv_abs_url(*r.arxiv_id);
    } else if (c.url) {
      r.url = *c.url;
    }
    r.published = task_date;  // cited works predate the citing paper
    results.push_back(std::move(r));
  }
  results = apply_cutoff(std::move(results), cutoff);
  truncate(results, k);
  return results;
}

// --- Fixture -------------------------------------------------------------------

FixtureProvider::FixtureProvider(std::vector<Rule> rules) : rules_(std::move(rules)) {}

FixtureProvider FixtureProvider::from_file(const std::filesystem::path& path) {
  std::vector<Rule> rules;
  size_t line_no = 0;
  for (const auto& line : split(read_file(path), '\n')) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      Rule rule;
      rule.query_contains = j.value("query_contains", "");
      rule.results = search_results_from_json(j.at("results").dump());
      rules.push_back(std::move(rule));
    } catch (const std::exception& e) {
      throw Error("FixtureError",
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return FixtureProvider(std::move(rules));
}

std::vector<SearchResult> FixtureProvider::search(const std::string& query, int k,
                                                  const CutoffPolicy& cutoff) {
  ++calls_;
  for (const auto& rule : rules_) {
    if (!rule.query_contains.empty() &&
        query.find(rule.query_contains) == std::string::npos)
      continue;
    auto results = apply_cutoff(rule.results, cutoff);
    truncate(results, k);
    return results;
  }
  return {};
}

// --- caching decorator -----------------------------------------------------------

CachedSearchProvider::CachedSearchProvider(std::shared_ptr<SearchProvider> inner,
                                           std::shared_ptr<DiskKv> cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {}

std::vector<SearchResult> CachedSearchProvider::search(const std::string& query, int k,
                                                       const CutoffPolicy& cutoff) {
  std::string key =
      sha256_hex("search\x1f" + inner_->name() + '\x1f' + query + '\x1f' +
                 std::to_string(k) + '\x1f' + cutoff.cutoff_date.str());
  if (auto hit = cache_->get(key)) return search_results_from_json(*hit);
  auto results = inner_->search(query, k, cutoff);
  cache_->put(key, search_results_to_json(results));
  return results;
}

}  // namespace synthbench
