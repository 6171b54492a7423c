#include "synthbench/report.hpp"

#include <cctype>
#include <regex>
#include <set>

#include "synthbench/arxiv_id.hpp"
#include "synthbench/util.hpp"

namespace synthbench {

namespace {

// Tokens that end with '.' without ending a sentence.
const std::set<std::string>& abbreviations() {
  static const std::set<std::string> kAbbrev = {
      "al",  "e.g", "i.e",  "etc",  "vs",   "cf",   "fig", "figs", "eq",
      "eqs", "sec", "secs", "no",   "dr",   "prof", "mr",  "mrs",  "ms",
      "jr",  "sr",  "st",   "resp", "approx", "dept", "univ", "inc",
      "ltd", "pp",  "vol",  "ch",   "ed",   "eds",  "rev", "et"};
  return kAbbrev;
}

bool is_heading(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && line[i] == '#') ++i;
  return i >= 1 && i <= 6 && i < line.size() && line[i] == ' ';
}

std::string heading_text(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && line[i] == '#') ++i;
  return trim(line.substr(i));
}

bool is_reference_heading(std::string_view line) {
  std::string t = to_lower(is_heading(line) ? heading_text(line) : trim(line));
  while (!t.empty() && (t.back() == ':' || t.back() == '*')) t.pop_back();
  while (!t.empty() && t.front() == '*') t.erase(t.begin());
  return t == "references" || t == "bibliography" || t == "reference list" ||
         t == "works cited";
}

// "[3] https://arxiv.org/abs/..." style line: a reference-list item even
// when no heading introduced it.
bool is_reference_item(std::string_view line) {
  static const std::regex kItem(R"(^\s*\[\d+\]\s+.*)");
  std::string s(line);
  if (!std::regex_match(s, kItem)) return false;
  std::string lower = to_lower(s);
  return lower.find("http://") != std::string::npos ||
         lower.find("https://") != std::string::npos ||
         lower.find("arxiv:") != std::string::npos;
}

std::vector<int> markers_in(std::string_view text) {
  static const std::regex kMarker(R"(\[(\d+)\])");
  std::vector<int> out;
  auto begin = std::cregex_iterator(text.data(), text.data() + text.size(), kMarker);
  for (auto it = begin; it != std::cregex_iterator(); ++it)
    out.push_back(std::stoi((*it)[1].str()));
  return out;
}

// Splits one paragraph (already joined to a single line) into sentences.
std::vector<std::string> split_paragraph(const std::string& para) {
  std::vector<std::string> out;
  std::size_t start = 0;
  std::size_t n = para.size();
  for (std::size_t i = 0; i < n; ++i) {
    char c = para[i];
    if (c != '.' && c != '?' && c != '!') continue;
    std::size_t j = i + 1;
    while (j < n && (para[j] == ')' || para[j] == ']' || para[j] == '"' || para[j] == '\''))
      ++j;
    if (j < n && para[j] != ' ') continue;  // e.g. a decimal point or "3.5x"
    if (c == '.') {
      // token immediately before the period
      std::size_t b = i;
      while (b > start && para[b - 1] != ' ') --b;
      std::string token = to_lower(para.substr(b, i - b));
      while (!token.empty() && (token.front() == '(' || token.front() == '[' ||
                                token.front() == '"'))
        token.erase(token.begin());
      bool single_initial = token.size() == 1 && std::isalpha(static_cast<unsigned char>(token[0]));
      if (abbreviations().count(token) || single_initial) continue;
      // require the next sentence to open with something sentence-like
      std::size_t k = j;
      while (k < n && para[k] == ' ') ++k;
      if (k < n) {
        char open = para[k];
        bool opens_sentence = std::isupper(static_cast<unsigned char>(open)) ||
                              std::isdigit(static_cast<unsigned char>(open)) ||
                              open == '[' || open == '(' || open == '"' ||
                              open == '*' || open == '-' || open == '#';
        if (!opens_sentence) continue;
      }
    }
    std::string sentence = trim(para.substr(start, j - start));
    if (!sentence.empty()) out.push_back(sentence);
    start = j;
  }
  std::string tail = trim(para.substr(start));
  if (!tail.empty()) out.push_back(tail);
  return out;
}

}  // namespace

std::vector<int> Report::content_sentence_indices() const {
  std::vector<int> out;
  for (const auto& s : sentences)
    if (s.is_content) out.push_back(s.index);
  return out;
}

std::vector<Sentence> segment_sentences(std::string_view text) {
  std::vector<Sentence> sentences;
  int next_index = 0;
  auto emit = [&](std::string line_text, bool content) {
    Sentence s;
    s.index = next_index++;
    s.text = std::move(line_text);
    s.cited_markers = markers_in(s.text);
    s.is_content = content;
    sentences.push_back(std::move(s));
  };

  std::string paragraph;
  auto flush = [&]() {
    if (paragraph.empty()) return;
    for (auto& sent : split_paragraph(paragraph)) emit(std::move(sent), true);
    paragraph.clear();
  };

  bool in_reference_region = false;
  for (const auto& raw_line : split(text, '\n')) {
    std::string line = trim(raw_line);
    if (line.empty()) {
      flush();
      continue;
    }
    if (is_heading(line)) {
      flush();
      in_reference_region = is_reference_heading(line);
      emit(line, false);
      continue;
    }
    if (in_reference_region || is_reference_item(line)) {
      flush();
      emit(line, false);
      continue;
    }
    if (is_reference_heading(line)) {
      flush();
      in_reference_region = true;
      emit(line, false);
      continue;
    }
    if (line[0] == '-' || line[0] == '*') {
      // list items are their own paragraphs
      flush();
      paragraph = line;
      flush();
      continue;
    }
    if (!paragraph.empty()) paragraph += ' ';
    paragraph += line;
  }
  flush();
  return sentences;
}

Report parse_report(std::string_view text) {
  Report report;
  report.text = std::string(text);
  report.sentences = segment_sentences(text);

  for (const auto& s : report.sentences) {
    if (!s.is_content) continue;
    for (int m : s.cited_markers) report.inline_citations.emplace_back(s.index, m);
  }

  report.references = extract_arxiv_ids(text);

  static const std::regex kItem(R"(^\s*\[(\d+)\]\s+(.*)$)");
  for (const auto& raw_line : split(text, '\n')) {
    std::string line = trim(raw_line);
    std::smatch m;
    if (!std::regex_match(line, m, kItem)) continue;
    int marker = std::stoi(m[1].str());
    std::string rest = trim(m[2].str());
    if (report.marker_refs.count(marker)) continue;  // first definition wins
    auto ids = extract_arxiv_ids(rest);
    if (!ids.empty()) {
      report.marker_refs[marker] = ids.front();
      continue;
    }
    static const std::regex kUrl(R"((https?://\S+))");
    std::smatch um;
    if (std::regex_search(rest, um, kUrl)) {
      std::string url = um[1].str();
      while (!url.empty() && (url.back() == '.' || url.back() == ',' || url.back() == ')'))
        url.pop_back();
      report.marker_refs[marker] = url;
    } else if (!rest.empty()) {
      report.marker_refs[marker] = rest;
    }
  }
  return report;
}

ReportStats report_stats(const Report& report) {
  ReportStats stats;
  stats.chars = utf8_length(report.text);
  stats.words = word_count(report.text);
  for (const auto& s : report.sentences)
    if (s.is_content) ++stats.sentences;
  stats.unique_refs = static_cast<long>(report.references.size());
  stats.inline_citations = static_cast<long>(report.inline_citations.size());
  return stats;
}

}  // namespace synthbench
