#include "synthbench/openalex.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

#include "synthbench/arxiv_id.hpp"
#include "synthbench/util.hpp"

namespace synthbench {

using nlohmann::json;

namespace {

constexpr const char* kNotFound = "\x01not-found";

std::string strip_prefix(const std::string& value, const std::string& prefix) {
  return value.starts_with(prefix) ? value.substr(prefix.size()) : value;
}

OpenAlexWork parse_work(const json& j) {
  OpenAlexWork w;
  w.id = strip_prefix(j.value("id", ""), "https://openalex.org/");
  w.title = j.value("display_name", "");
  if (j.contains("cited_by_count") && j.at("cited_by_count").is_number())
    w.cited_by_count = j.at("cited_by_count").get<long>();
  if (j.contains("doi") && j.at("doi").is_string())
    w.doi = strip_prefix(j.at("doi").get<std::string>(), "https://doi.org/");
  if (j.contains("abstract_inverted_index") &&
      j.at("abstract_inverted_index").is_object()) {
    std::vector<std::pair<std::string, std::vector<long>>> index;
    for (const auto& [word, positions] : j.at("abstract_inverted_index").items())
      index.emplace_back(word, positions.get<std::vector<long>>());
    std::string abstract = reconstruct_abstract(index);
    if (!abstract.empty()) w.abstract = abstract;
  }
  if (j.contains("primary_location") && j.at("primary_location").is_object()) {
    const auto& loc = j.at("primary_location");
    if (loc.contains("landing_page_url") && loc.at("landing_page_url").is_string())
      w.landing_url = loc.at("landing_page_url").get<std::string>();
  }
  if (w.doi && to_lower(*w.doi).starts_with("10.48550/arxiv."))
    w.arxiv_id = normalize_arxiv_id(w.doi->substr(std::string("10.48550/arxiv.").size()));
  else if (w.landing_url)
    if (auto id = arxiv_id_from_url(*w.landing_url)) w.arxiv_id = *id;
  return w;
}

}  // namespace

std::string reconstruct_abstract(
    const std::vector<std::pair<std::string, std::vector<long>>>& index) {
  long max_pos = -1;
  for (const auto& [word, positions] : index)
    for (long p : positions) max_pos = std::max(max_pos, p);
  if (max_pos < 0) return "";
  std::vector<std::string> words(static_cast<size_t>(max_pos) + 1);
  for (const auto& [word, positions] : index)
    for (long p : positions)
      if (p >= 0) words[static_cast<size_t>(p)] = word;
  std::string out;
  for (const auto& w : words) {
    if (w.empty()) continue;
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

OpenAlexClient::OpenAlexClient(std::shared_ptr<HttpTransport> transport,
                               std::string contact_email, std::shared_ptr<DiskKv> cache,
                               std::string base_url)
    : transport_(std::move(transport)),
      contact_email_(std::move(contact_email)),
      cache_(cache ? std::move(cache) : std::make_shared<DiskKv>("")),
      base_url_(std::move(base_url)) {}

std::string OpenAlexClient::get_body(const std::string& url) {
  std::string full = url;
  if (!contact_email_.empty())
    full += (full.find('?') == std::string::npos ? "?" : "&") +
            std::string("mailto=") + url_encode(contact_email_);
  std::string key = sha256_hex("openalex\x1f" + full);
  if (auto hit = cache_->get(key)) return *hit == kNotFound ? "" : *hit;
  HttpResponse resp = transport_->get(full, {});
  if (resp.status == 404) {
    cache_->put(key, kNotFound);
    return "";
  }
  if (!resp.ok())
    throw Error("Unavailable",
                "scholarly-graph api returned " + std::to_string(resp.status));
  cache_->put(key, resp.body);
  return resp.body;
}

std::optional<long> OpenAlexClient::fetch_citation_count(const std::string& id) {
  std::string path;
  if (is_arxiv_id(id)) {
    path = "/works/doi:10.48550/arXiv." + normalize_arxiv_id(id);
  } else if (!id.empty() && (id[0] == 'W' || id[0] == 'w')) {
    path = "/works/" + id;
  } else {
    return std::nullopt;
  }
  std::string body = get_body(base_url_ + path);
  if (body.empty()) return std::nullopt;
  try {
    OpenAlexWork w = parse_work(json::parse(body));
    return w.cited_by_count;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::optional<OpenAlexWork> OpenAlexClient::find_by_title(const std::string& title,
                                                          double min_similarity) {
  std::string query = collapse_ws(title);
  // Commas separate filters in the API's query grammar.
  std::replace(query.begin(), query.end(), ',', ' ');
  if (trim(query).empty()) return std::nullopt;
  std::string url =
      base_url_ + "/works?filter=title.search:" + url_encode(query) + "&per-page=5";
  std::string body = get_body(url);
  if (body.empty()) return std::nullopt;

  std::optional<OpenAlexWork> best;
  double best_sim = -1.0;  // first hit wins ties (API relevance order)
  try {
    json j = json::parse(body);
    for (const auto& item : j.value("results", json::array())) {
      OpenAlexWork w = parse_work(item);
      double sim = title_similarity(title, w.title);
      if (sim >= min_similarity && sim > best_sim) {
        best_sim = sim;
        best = std::move(w);
      }
    }
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return best;
}

}  // namespace synthbench
