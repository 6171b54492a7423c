#include "synthbench/harvest.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <set>

#include "synthbench/arxiv_id.hpp"
#include "synthbench/tex.hpp"

namespace synthbench {

namespace {

std::string compact_date(const Date& d) {
  std::string s = d.str();
  s.erase(std::remove(s.begin(), s.end(), '-'), s.end());
  return s;
}

bool ends_with_ci(const std::string& s, const std::string& suffix) {
  if (s.size() < suffix.size()) return false;
  return to_lower(s.substr(s.size() - suffix.size())) == suffix;
}

/// An ArXiv id stated directly in the entry (eprint field, URL, or an
/// explicit arXiv: token in free-text fields).
std::optional<std::string> embedded_arxiv_id(const BibEntry& entry) {
  if (const auto* ep = entry.find("eprint")) {
    std::string norm = normalize_arxiv_id(trim(*ep));
    if (is_arxiv_id(norm)) return norm;
    if (auto from_url = arxiv_id_from_url(*ep)) return from_url;
  }
  for (const char* field : {"url", "howpublished", "note", "journal"}) {
    if (const auto* v = entry.find(field)) {
      if (auto id = arxiv_id_from_url(*v)) return id;
      auto ids = extract_arxiv_ids(*v);
      if (!ids.empty()) return ids.front();
    }
  }
  return std::nullopt;
}

std::vector<std::string> split_authors(const std::string& field) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos <= field.size()) {
    size_t next = field.find(" and ", pos);
    std::string piece =
        field.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    std::string name = collapse_ws(strip_tex_markup(piece));
    if (!name.empty()) out.push_back(std::move(name));
    if (next == std::string::npos) break;
    pos = next + 5;
  }
  return out;
}

}  // namespace

HarvestConfig load_harvest_config(const KeyValueConfig& cfg) {
  HarvestConfig out;
  out.categories = cfg.get_list("categories");
  if (out.categories.empty())
    throw Error("ConfigError", "categories must be a non-empty list");
  auto start = cfg.get_date("date_start");
  auto end = cfg.get_date("date_end");
  if (!start || !end)
    throw Error("ConfigError", "date_start and date_end must be YYYY-MM-DD dates");
  if (*end < *start) throw Error("ConfigError", "date_start must not exceed date_end");
  out.date_start = *start;
  out.date_end = *end;
  out.require_accepted = cfg.get_bool("require_accepted").value_or(false);
  out.max_related_words = cfg.get_int("max_related_words").value_or(1000);
  if (out.max_related_words <= 0)
    throw Error("ConfigError", "max_related_words must be positive");
  auto path = cfg.get("output_path");
  if (!path || path->empty()) throw Error("ConfigError", "output_path is required");
  out.output_path = *path;
  out.acceptance_pattern = cfg.get_raw("acceptance_pattern");
  if (out.acceptance_pattern) {
    try {
      std::regex probe(*out.acceptance_pattern, std::regex::icase);
    } catch (const std::regex_error& e) {
      throw Error("ConfigError", std::string("acceptance_pattern: ") + e.what());
    }
  }
  out.max_parallel = static_cast<int>(cfg.get_int("max_parallel").value_or(4));
  out.page_size = static_cast<int>(cfg.get_int("page_size").value_or(100));
  out.max_records = cfg.get_int("max_records").value_or(0);
  out.cache_dir = cfg.get_or("cache_dir", "");
  out.contact_email = cfg.get_or("contact_email", "");
  if (out.contact_email.empty())
    if (const char* env = std::getenv("SYNTHBENCH_CONTACT_EMAIL")) out.contact_email = env;
  return out;
}

std::string versioned_id_from_raw(const std::string& raw_id) {
  std::string id = trim(raw_id);
  if (size_t pos = id.find("/abs/"); pos != std::string::npos) id = id.substr(pos + 5);
  return id;
}

bool filter_paper(const AtomEntry& meta, const HarvestConfig& config) {
  std::string versioned = versioned_id_from_raw(meta.raw_id);
  // "v1" must be the literal suffix; later versions may predate the window.
  if (versioned.size() < 2 || versioned.substr(versioned.size() - 2) != "v1")
    return false;
  auto published = parse_date(meta.published.substr(0, std::min<size_t>(10, meta.published.size())));
  if (!published || *published < config.date_start || config.date_end < *published)
    return false;
  bool category_ok = false;
  for (const auto& c : meta.categories)
    category_ok = category_ok || std::find(config.categories.begin(),
                                           config.categories.end(),
                                           c) != config.categories.end();
  if (!category_ok) return false;
  if (config.require_accepted) {
    if (config.acceptance_pattern) {
      std::regex re(*config.acceptance_pattern, std::regex::icase);
      if (!std::regex_search(meta.comment, re)) return false;
    } else if (!contains_ci(meta.comment, "accepted") &&
               !contains_ci(meta.comment, "published")) {
      return false;
    }
  }
  return true;
}

// --- ArxivPaperSource --------------------------------------------------------

ArxivPaperSource::ArxivPaperSource(std::shared_ptr<HttpTransport> transport,
                                   std::string api_base, std::string eprint_base,
                                   int page_size)
    : transport_(std::move(transport)),
      api_base_(std::move(api_base)),
      eprint_base_(std::move(eprint_base)),
      page_size_(page_size) {}

AtomFeed ArxivPaperSource::fetch_feed(const std::string& query_suffix) {
  auto resp = transport_->get(api_base_ + "?" + query_suffix, {});
  if (!resp.ok())
    throw Error("Unavailable", "listing API returned status " + std::to_string(resp.status));
  return parse_atom_feed(resp.body);
}

std::vector<AtomEntry> ArxivPaperSource::list(const std::string& category,
                                              const Date& start, const Date& end) {
  std::vector<AtomEntry> out;
  const std::string query = "cat:" + category + " AND submittedDate:[" +
                            compact_date(start) + "0000 TO " + compact_date(end) + "2359]";
  for (long offset = 0;; offset += page_size_) {
    const std::string suffix = "search_query=" + url_encode(query) +
                               "&start=" + std::to_string(offset) +
                               "&max_results=" + std::to_string(page_size_) +
                               "&sortBy=submittedDate&sortOrder=descending";
    AtomFeed feed = fetch_feed(suffix);
    const size_t got = feed.entries.size();
    for (auto& e : feed.entries) out.push_back(std::move(e));
    if (got < static_cast<size_t>(page_size_)) break;
    if (feed.total_results >= 0 && offset + page_size_ >= feed.total_results) break;
  }
  return out;
}

std::optional<std::string> ArxivPaperSource::fetch_source(const std::string& versioned_id) {
  auto resp = transport_->get(eprint_base_ + versioned_id, {});
  if (resp.status == 404) return std::nullopt;
  if (!resp.ok())
    throw Error("Unavailable", "e-print fetch for " + versioned_id + " returned status " +
                                   std::to_string(resp.status));
  return resp.body;
}

std::vector<AtomEntry> ArxivPaperSource::search_title(const std::string& title, int k) {
  const std::string query = "ti:\"" + title + "\"";
  const std::string suffix = "search_query=" + url_encode(query) +
                             "&start=0&max_results=" + std::to_string(k);
  return fetch_feed(suffix).entries;
}

std::map<std::string, AtomEntry> ArxivPaperSource::lookup(
    const std::vector<std::string>& ids) {
  std::map<std::string, AtomEntry> out;
  if (ids.empty()) return out;
  std::string joined;
  for (const auto& id : ids) {
    if (!joined.empty()) joined += ",";
    joined += id;
  }
  const std::string suffix =
      "id_list=" + url_encode(joined) + "&max_results=" + std::to_string(ids.size());
  for (auto& e : fetch_feed(suffix).entries) out.emplace(e.arxiv_id, std::move(e));
  return out;
}

// --- FixturePaperSource ------------------------------------------------------

void FixturePaperSource::add_paper(AtomEntry entry, std::optional<std::string> archive) {
  archives_[versioned_id_from_raw(entry.raw_id)] = std::move(archive);
  papers_.push_back(std::move(entry));
}

void FixturePaperSource::add_known_work(AtomEntry entry) {
  known_works_.push_back(std::move(entry));
}

std::vector<AtomEntry> FixturePaperSource::list(const std::string& category,
                                                const Date& start, const Date& end) {
  std::vector<AtomEntry> out;
  for (const auto& e : papers_) {
    if (std::find(e.categories.begin(), e.categories.end(), category) == e.categories.end())
      continue;
    auto pub = parse_date(e.published.substr(0, std::min<size_t>(10, e.published.size())));
    if (!pub || *pub < start || end < *pub) continue;
    out.push_back(e);
  }
  return out;
}

std::optional<std::string> FixturePaperSource::fetch_source(const std::string& versioned_id) {
  auto it = archives_.find(versioned_id);
  if (it == archives_.end()) return std::nullopt;
  return it->second;
}

std::vector<AtomEntry> FixturePaperSource::search_title(const std::string& title, int k) {
  std::vector<std::pair<double, const AtomEntry*>> scored;
  for (const auto& pool : {&known_works_, &papers_})
    for (const auto& e : *pool) {
      double sim = title_similarity(e.title, title);
      if (sim >= 0.5) scored.emplace_back(sim, &e);
    }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<AtomEntry> out;
  for (const auto& [sim, e] : scored) {
    out.push_back(*e);
    if (static_cast<int>(out.size()) >= k) break;
  }
  return out;
}

std::map<std::string, AtomEntry> FixturePaperSource::lookup(
    const std::vector<std::string>& ids) {
  std::map<std::string, AtomEntry> out;
  for (const auto& raw : ids) {
    std::string want = normalize_arxiv_id(raw);
    for (const auto& pool : {&known_works_, &papers_})
      for (const auto& e : *pool)
        if (e.arxiv_id == want) out.emplace(want, e);
  }
  return out;
}

// --- Record assembly ---------------------------------------------------------

std::string expand_inputs(const std::string& source, const FileMap& files, int max_depth) {
  if (max_depth <= 0) return source;
  std::string out;
  out.reserve(source.size());
  size_t i = 0;
  while (i < source.size()) {
    if (source[i] == '\\') {
      size_t j = i + 1;
      while (j < source.size() && std::isalpha(static_cast<unsigned char>(source[j]))) ++j;
      const std::string cmd = source.substr(i + 1, j - i - 1);
      if ((cmd == "input" || cmd == "include") && j < source.size() && source[j] == '{') {
        const size_t close = source.find('}', j);
        if (close != std::string::npos) {
          const std::string name = trim(source.substr(j + 1, close - j - 1));
          auto it = files.find(name);
          if (it == files.end()) it = files.find(name + ".tex");
          if (it != files.end()) out += expand_inputs(it->second, files, max_depth - 1);
          i = close + 1;
          continue;
        }
      }
    }
    out += source[i];
    ++i;
  }
  return out;
}

CitationRecord enrich_citation(const BibEntry& entry, PaperSource& arxiv,
                               OpenAlexClient& graph) {
  CitationRecord rec;
  rec.bib_key = entry.key;
  rec.title = bib_title(entry);
  if (const auto* a = entry.find("author")) rec.authors = split_authors(*a);
  if (const auto* u = entry.find("url")) {
    std::string t = trim(*u);
    if (!t.empty()) rec.url = t;
  }

  if (auto id = embedded_arxiv_id(entry)) rec.arxiv_id = *id;

  if (!rec.arxiv_id && !rec.title.empty()) {
    auto hits = arxiv.search_title(rec.title, 5);
    const std::string want_ci = to_lower(collapse_ws(rec.title));
    const std::string want_norm = normalize_for_match(rec.title);
    const AtomEntry* exact = nullptr;
    const AtomEntry* fuzzy = nullptr;
    for (const auto& h : hits) {
      if (!exact && to_lower(collapse_ws(h.title)) == want_ci) exact = &h;
      if (!fuzzy && normalize_for_match(h.title) == want_norm) fuzzy = &h;
    }
    if (const AtomEntry* hit = exact ? exact : fuzzy) {
      rec.arxiv_id = hit->arxiv_id;
      if (!hit->summary.empty()) rec.abstract = collapse_ws(hit->summary);
    }
  }

  if (rec.arxiv_id) {
    if (!rec.abstract) {
      auto found = arxiv.lookup({*rec.arxiv_id});
      auto it = found.find(normalize_arxiv_id(*rec.arxiv_id));
      if (it != found.end()) {
        if (!it->second.summary.empty()) rec.abstract = collapse_ws(it->second.summary);
        if (rec.title.empty()) rec.title = collapse_ws(it->second.title);
      }
    }
    if (!rec.url) rec.url = arxiv_abs_url(*rec.arxiv_id);
    rec.citation_count = graph.fetch_citation_count(*rec.arxiv_id);
  } else if (!rec.title.empty()) {
    if (auto work = graph.find_by_title(rec.title)) {
      rec.external_id = work->id;
      rec.citation_count = work->cited_by_count;
      if (!rec.abstract && work->abstract) rec.abstract = *work->abstract;
      if (work->arxiv_id) {
        rec.arxiv_id = work->arxiv_id;
        if (!rec.url) rec.url = arxiv_abs_url(*work->arxiv_id);
      } else if (!rec.url && work->landing_url) {
        rec.url = *work->landing_url;
      }
    }
  }

  rec.unresolved = !rec.arxiv_id && !rec.external_id;
  return rec;
}

// --- Harvester ----------------------------------------------------------------

Harvester::Harvester(HarvestConfig config, std::shared_ptr<PaperSource> source,
                     std::shared_ptr<OpenAlexClient> graph)
    : config_(std::move(config)), source_(std::move(source)), graph_(std::move(graph)) {}

std::variant<PaperRecord, std::string> Harvester::build_record(const AtomEntry& meta) {
  const std::string vid = versioned_id_from_raw(meta.raw_id);
  auto body = source_->fetch_source(vid);
  if (!body) return std::string("no source archive available");

  FileMap files;
  try {
    files = extract_source_archive(*body);
  } catch (const Error& e) {
    return std::string("malformed source archive: ") + e.what();
  }
  if (files.empty()) return std::string("no LaTeX source (pdf-only submission)");

  // Try \documentclass holders first, then every other .tex file.
  std::vector<std::string> order;
  std::vector<std::string> others;
  for (const auto& [path, content] : files) {
    if (!ends_with_ci(path, ".tex")) continue;
    if (content.find("\\documentclass") != std::string::npos)
      order.push_back(path);
    else
      others.push_back(path);
  }
  order.insert(order.end(), others.begin(), others.end());
  if (order.empty()) return std::string("no .tex file in source");

  std::optional<RelatedWorkSection> section;
  for (const auto& path : order) {
    try {
      section = extract_related_work(expand_inputs(files.at(path), files));
      break;
    } catch (const Error&) {
      continue;
    }
  }
  if (!section) return std::string("no related-work section");

  std::string bib_source;
  for (const auto& [path, content] : files) {
    if (!ends_with_ci(path, ".bib")) continue;
    bib_source += content;
    bib_source += "\n";
  }
  if (bib_source.empty()) return std::string("no .bib file");
  ParsedBib bib;
  try {
    bib = parse_bib(bib_source);
  } catch (const Error& e) {
    return std::string("unparseable bibliography: ") + e.what();
  }

  if (section->cleaned.empty())
    return std::string("related-work section empty after cleaning");
  const long words = word_count(section->cleaned);
  if (words > config_.max_related_words)
    return "related-work section over the word budget (" + std::to_string(words) +
           " words)";

  std::vector<std::string> keys;
  std::set<std::string> seen_keys;
  for (const auto& k : section->citation_keys)
    if (seen_keys.insert(k).second) keys.push_back(k);

  std::map<std::string, const BibEntry*> by_key;
  for (const auto& e : bib.entries) by_key.emplace(e.key, &e);

  std::vector<const BibEntry*> to_enrich;
  for (const auto& k : keys) {
    auto it = by_key.find(k);
    if (it == by_key.end()) {
      spdlog::warn("{}: citation key '{}' missing from bibliography", vid, k);
      continue;
    }
    const BibEntry* e = it->second;
    if (bib_title(*e).empty() && !e->find("url") && !embedded_arxiv_id(*e)) {
      spdlog::warn("{}: citation '{}' has no title, url, or id; dropped", vid, k);
      continue;
    }
    to_enrich.push_back(e);
  }

  std::vector<CitationRecord> citations(to_enrich.size());
  parallel_for(to_enrich.size(), config_.max_parallel,
               [&](size_t i) { citations[i] = enrich_citation(*to_enrich[i], *source_, *graph_); });

  PaperRecord rec;
  rec.arxiv_id = vid;
  rec.title = collapse_ws(meta.title);
  rec.abstract = collapse_ws(meta.summary);
  rec.categories = meta.categories;
  rec.published = meta.published.substr(0, std::min<size_t>(10, meta.published.size()));
  if (!meta.comment.empty()) rec.comment = meta.comment;
  rec.related_work_latex = section->raw_latex;
  rec.related_work_clean = section->cleaned;
  rec.citations = std::move(citations);

  auto violations = validate_record(rec, config_.max_related_words);
  if (!violations.empty()) return "invariant violation: " + violations.front();
  return rec;
}

HarvestResult Harvester::run() {
  if (config_.categories.empty() || config_.date_end < config_.date_start)
    throw Error("ConfigError", "invalid harvest configuration");

  std::filesystem::path partial = config_.output_path;
  partial += ".partial";

  std::map<std::string, PaperRecord> done;  // versioned id -> record
  if (std::filesystem::exists(partial)) {
    // Lenient line-wise load: a torn final line from an interrupted run is
    // dropped rather than poisoning the resume.
    std::ifstream in(partial, std::ios::binary);
    std::string line;
    size_t dropped = 0;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      try {
        PaperRecord r = paper_record_from_json(line);
        done.emplace(r.arxiv_id, std::move(r));
      } catch (const std::exception&) {
        ++dropped;
      }
    }
    spdlog::info("resuming: {} checkpointed records ({} unreadable lines dropped)",
                 done.size(), dropped);
  }

  std::vector<AtomEntry> candidates;
  std::set<std::string> seen;
  for (const auto& cat : config_.categories)
    for (auto& e : source_->list(cat, config_.date_start, config_.date_end))
      if (seen.insert(e.arxiv_id).second) candidates.push_back(std::move(e));
  std::sort(candidates.begin(), candidates.end(),
            [](const AtomEntry& a, const AtomEntry& b) { return a.arxiv_id < b.arxiv_id; });

  HarvestResult result;
  std::ofstream checkpoint(partial, std::ios::app | std::ios::binary);
  long accepted = static_cast<long>(done.size());
  for (const auto& meta : candidates) {
    if (config_.max_records > 0 && accepted >= config_.max_records) break;
    if (!filter_paper(meta, config_)) continue;
    const std::string vid = versioned_id_from_raw(meta.raw_id);
    if (done.count(vid)) continue;

    std::variant<PaperRecord, std::string> built;
    try {
      built = build_record(meta);
    } catch (const Error& e) {
      built = std::string(e.what());
    }
    if (auto* reason = std::get_if<std::string>(&built)) {
      result.skipped.push_back(vid + ": " + *reason);
      spdlog::warn("skipping {}: {}", vid, *reason);
      continue;
    }
    PaperRecord rec = std::move(std::get<PaperRecord>(built));
    checkpoint << to_json_line(rec) << "\n";
    checkpoint.flush();
    done.emplace(rec.arxiv_id, std::move(rec));
    ++accepted;
  }
  checkpoint.close();

  for (auto& [id, rec] : done) {
    result.citation_total += static_cast<long>(rec.citations.size());
    for (const auto& c : rec.citations)
      if (c.arxiv_id) ++result.citation_arxiv;
    result.records.push_back(std::move(rec));
  }

  auto violations = validate_dataset(result.records, config_.max_related_words);
  if (!violations.empty())
    throw Error("ValidationError",
                violations.front() +
                    (violations.size() > 1
                         ? " (+" + std::to_string(violations.size() - 1) + " more)"
                         : ""));

  write_dataset(config_.output_path, result.records);
  std::error_code ec;
  std::filesystem::remove(partial, ec);
  return result;
}

}  // namespace synthbench
