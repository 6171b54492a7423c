#include "synthbench/dataset.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

#include "synthbench/arxiv_id.hpp"

namespace synthbench {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json citation_to_json(const CitationRecord& c) {
  ordered_json j;
  j["bib_key"] = c.bib_key;
  j["title"] = c.title;
  j["authors"] = c.authors;
  if (c.abstract) j["abstract"] = *c.abstract;
  if (c.arxiv_id) j["arxiv_id"] = *c.arxiv_id;
  if (c.external_id) j["external_id"] = *c.external_id;
  if (c.url) j["url"] = *c.url;
  if (c.citation_count) j["citation_count"] = *c.citation_count;
  if (c.important) j["important"] = *c.important;
  if (c.unresolved) j["unresolved"] = true;
  return j;
}

CitationRecord citation_from_json(const ordered_json& j) {
  CitationRecord c;
  c.bib_key = j.value("bib_key", "");
  c.title = j.value("title", "");
  if (j.contains("authors"))
    c.authors = j.at("authors").get<std::vector<std::string>>();
  if (j.contains("abstract")) c.abstract = j.at("abstract").get<std::string>();
  if (j.contains("arxiv_id")) c.arxiv_id = j.at("arxiv_id").get<std::string>();
  if (j.contains("external_id")) c.external_id = j.at("external_id").get<std::string>();
  if (j.contains("url")) c.url = j.at("url").get<std::string>();
  if (j.contains("citation_count")) c.citation_count = j.at("citation_count").get<long>();
  if (j.contains("important")) c.important = j.at("important").get<bool>();
  c.unresolved = j.value("unresolved", false);
  return c;
}

}  // namespace

std::string PaperRecord::task_id() const { return normalize_arxiv_id(arxiv_id); }

Date PaperRecord::published_date() const {
  auto d = parse_date(published);
  if (!d) throw Error("DatasetError", "record " + arxiv_id + " has bad date: " + published);
  return *d;
}

std::string to_json_line(const PaperRecord& r) {
  ordered_json j;
  j["arxiv_id"] = r.arxiv_id;
  j["title"] = r.title;
  j["abstract"] = r.abstract;
  j["categories"] = r.categories;
  j["published"] = r.published;
  if (r.comment) j["comment"] = *r.comment;
  j["related_work_latex"] = r.related_work_latex;
  j["related_work_clean"] = r.related_work_clean;
  ordered_json cites = ordered_json::array();
  for (const auto& c : r.citations) cites.push_back(citation_to_json(c));
  j["citations"] = std::move(cites);
  return j.dump();
}

PaperRecord paper_record_from_json(const std::string& line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const std::exception& e) {
    throw Error("DatasetError", std::string("bad JSON line: ") + e.what());
  }
  PaperRecord r;
  r.arxiv_id = j.value("arxiv_id", "");
  r.title = j.value("title", "");
  r.abstract = j.value("abstract", "");
  if (j.contains("categories"))
    r.categories = j.at("categories").get<std::vector<std::string>>();
  r.published = j.value("published", "");
  if (j.contains("comment")) r.comment = j.at("comment").get<std::string>();
  r.related_work_latex = j.value("related_work_latex", "");
  r.related_work_clean = j.value("related_work_clean", "");
  if (j.contains("citations"))
    for (const auto& cj : j.at("citations")) r.citations.push_back(citation_from_json(cj));
  return r;
}

void write_dataset(const std::filesystem::path& path,
                   const std::vector<PaperRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += to_json_line(r);
    out += '\n';
  }
  write_file(path, out);
}

std::vector<PaperRecord> read_dataset(const std::filesystem::path& path) {
  std::vector<PaperRecord> records;
  std::ifstream in(path);
  if (!in) throw Error("NotFound", "cannot open dataset file: " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    records.push_back(paper_record_from_json(line));
  }
  return records;
}

std::vector<std::string> validate_record(const PaperRecord& r, long max_related_words) {
  std::vector<std::string> v;
  if (!r.arxiv_id.ends_with("v1")) v.push_back("arxiv_id version is not v1");
  if (!is_arxiv_id(r.arxiv_id)) v.push_back("arxiv_id is not a valid identifier");
  if (!parse_date(r.published)) v.push_back("published is not a YYYY-MM-DD date");
  if (trim(r.related_work_clean).empty()) v.push_back("related_work_clean is empty");
  long words = word_count(r.related_work_clean);
  if (words > max_related_words)
    v.push_back("related_work_clean has " + std::to_string(words) + " words > " +
                std::to_string(max_related_words));
  for (const auto& c : r.citations) {
    if (c.title.empty() && !c.url && !c.arxiv_id)
      v.push_back("citation " + c.bib_key + " lacks title, url, and arxiv_id");
    if (c.citation_count && *c.citation_count < 0)
      v.push_back("citation " + c.bib_key + " has negative citation_count");
  }
  return v;
}

std::vector<std::string> validate_dataset(const std::vector<PaperRecord>& records,
                                          long max_related_words) {
  std::vector<std::string> all;
  for (const auto& r : records)
    for (auto& v : validate_record(r, max_related_words))
      all.push_back(r.arxiv_id + ": " + v);
  return all;
}

std::filesystem::path nugget_sidecar_path(const std::filesystem::path& dataset_path) {
  return dataset_path.string() + ".nuggets.jsonl";
}

void write_nugget_sets(const std::filesystem::path& path,
                       const std::vector<NuggetSet>& sets) {
  std::string out;
  for (const auto& s : sets) {
    ordered_json j;
    j["exemplar_id"] = s.exemplar_id;
    ordered_json arr = ordered_json::array();
    for (const auto& [text, vital] : s.nuggets)
      arr.push_back(ordered_json{{"text", text}, {"vital", vital}});
    j["nuggets"] = std::move(arr);
    out += j.dump();
    out += '\n';
  }
  write_file(path, out);
}

std::vector<NuggetSet> read_nugget_sets(const std::filesystem::path& path) {
  std::vector<NuggetSet> sets;
  std::ifstream in(path);
  if (!in) throw Error("NotFound", "cannot open nugget file: " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ordered_json j = ordered_json::parse(line);
    NuggetSet s;
    s.exemplar_id = j.value("exemplar_id", "");
    if (j.contains("nuggets"))
      for (const auto& nj : j.at("nuggets"))
        s.nuggets.emplace_back(nj.value("text", ""), nj.value("vital", false));
    sets.push_back(std::move(s));
  }
  return sets;
}

}  // namespace synthbench
