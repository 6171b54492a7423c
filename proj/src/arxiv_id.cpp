#include "synthbench/arxiv_id.hpp"

#include <cctype>
#include <regex>
#include <set>

#include "synthbench/util.hpp"

namespace synthbench {

namespace {

// New style: YYMM.NNNN or YYMM.NNNNN. Old style: archive(.subject)/YYMMNNN.
const std::regex kNewStyle(R"(^\d{4}\.\d{4,5}$)");
const std::regex kOldStyle(R"(^[a-z-]+(\.[a-z-]+)?/\d{7}$)");

std::string strip_version(std::string_view id) {
  std::string s(id);
  auto v = s.rfind('v');
  if (v != std::string::npos && v + 1 < s.size()) {
    bool digits = true;
    for (std::size_t i = v + 1; i < s.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) digits = false;
    if (digits) s.resize(v);
  }
  return s;
}

}  // namespace

std::string normalize_arxiv_id(std::string_view id) {
  return strip_version(to_lower(trim(id)));
}

bool is_arxiv_id(std::string_view id) {
  std::string n = normalize_arxiv_id(id);
  return std::regex_match(n, kNewStyle) || std::regex_match(n, kOldStyle);
}

std::optional<std::string> arxiv_id_from_url(std::string_view url) {
  std::string s = trim(url);
  std::string lower = to_lower(s);
  auto take = [&](std::size_t start) -> std::optional<std::string> {
    std::string rest = s.substr(start);
    // Cut at query/fragment, trailing punctuation, ".pdf" suffix.
    for (char stop : {'?', '#'})
      if (auto p = rest.find(stop); p != std::string::npos) rest.resize(p);
    while (!rest.empty() && (rest.back() == '/' || rest.back() == '.' || rest.back() == ',' ||
                             rest.back() == ')' || rest.back() == ']'))
      rest.pop_back();
    if (rest.size() > 4 && to_lower(rest).ends_with(".pdf")) rest.resize(rest.size() - 4);
    std::string n = normalize_arxiv_id(rest);
    if (is_arxiv_id(n)) return n;
    return std::nullopt;
  };

  for (std::string_view marker : {"arxiv.org/abs/", "arxiv.org/pdf/"}) {
    auto p = lower.find(marker);
    if (p != std::string::npos) return take(p + marker.size());
  }
  if (lower.starts_with("arxiv:")) return take(6);
  if (is_arxiv_id(s)) return normalize_arxiv_id(s);
  return std::nullopt;
}

std::vector<std::string> extract_arxiv_ids(std::string_view text) {
  static const std::regex kRef(
      R"((arxiv\.org/(?:abs|pdf)/|arxiv:\s?)([a-zA-Z.-]+/\d{7}|\d{4}\.\d{4,5})(v\d+)?)",
      std::regex::icase);
  std::vector<std::string> out;
  std::set<std::string> seen;
  auto begin = std::cregex_iterator(text.data(), text.data() + text.size(), kRef);
  for (auto it = begin; it != std::cregex_iterator(); ++it) {
    std::string id = normalize_arxiv_id((*it)[2].str());
    if (is_arxiv_id(id) && seen.insert(id).second) out.push_back(id);
  }
  return out;
}

std::string arxiv_abs_url(std::string_view id) {
  return "https://arxiv.org/abs/" + normalize_arxiv_id(id);
}

}  // namespace synthbench
