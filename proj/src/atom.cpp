#include "synthbench/atom.hpp"

#include <cstdlib>

#include "synthbench/arxiv_id.hpp"
#include "synthbench/util.hpp"

namespace synthbench {

std::string xml_unescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    if (s[i] != '&') {
      out += s[i++];
      continue;
    }
    auto semi = s.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) {
      out += s[i++];
      continue;
    }
    std::string_view ent = s.substr(i + 1, semi - i - 1);
    if (ent == "amp")
      out += '&';
    else if (ent == "lt")
      out += '<';
    else if (ent == "gt")
      out += '>';
    else if (ent == "quot")
      out += '"';
    else if (ent == "apos")
      out += '\'';
    else if (!ent.empty() && ent[0] == '#') {
      long cp = std::strtol(std::string(ent.substr(ent[1] == 'x' || ent[1] == 'X' ? 2 : 1)).c_str(),
                            nullptr, ent[1] == 'x' || ent[1] == 'X' ? 16 : 10);
      // Encode the code point back as UTF-8.
      if (cp < 0x80) {
        out += static_cast<char>(cp);
      } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
      } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
      } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
      }
    } else {
      out += s[i];
      ++i;
      continue;
    }
    i = semi + 1;
  }
  return out;
}

namespace {

// Finds the body of the next <tag ...>...</tag>, matching any namespace
// prefix (e.g. "arxiv:comment" for tag "comment" with prefix requested).
// Returns npos-pair when absent.
struct TagHit {
  std::size_t body_begin = std::string_view::npos;
  std::size_t body_end = std::string_view::npos;
  std::string attrs;
  bool found() const { return body_begin != std::string_view::npos; }
};

TagHit find_tag(std::string_view xml, std::string_view tag, std::size_t from = 0) {
  std::string open = "<" + std::string(tag);
  std::string close = "</" + std::string(tag) + ">";
  std::size_t pos = from;
  while (true) {
    pos = xml.find(open, pos);
    if (pos == std::string_view::npos) return {};
    char next = pos + open.size() < xml.size() ? xml[pos + open.size()] : '\0';
    if (next != '>' && next != ' ' && next != '\t' && next != '\n' && next != '/') {
      pos += open.size();
      continue;  // e.g. matched "<link" inside "<linkback"
    }
    auto gt = xml.find('>', pos);
    if (gt == std::string_view::npos) return {};
    TagHit hit;
    hit.attrs = std::string(xml.substr(pos + open.size(), gt - pos - open.size()));
    if (!hit.attrs.empty() && hit.attrs.back() == '/') {  // self-closing
      hit.body_begin = hit.body_end = gt + 1;
      return hit;
    }
    auto end = xml.find(close, gt + 1);
    if (end == std::string_view::npos) return {};
    hit.body_begin = gt + 1;
    hit.body_end = end;
    return hit;
  }
}

std::string tag_text(std::string_view xml, std::string_view tag) {
  // Accept both bare and namespaced forms ("comment" / "arxiv:comment").
  TagHit hit = find_tag(xml, tag);
  if (!hit.found()) {
    for (std::string_view ns : {"arxiv:", "opensearch:", "atom:"}) {
      hit = find_tag(xml, std::string(ns) + std::string(tag));
      if (hit.found()) break;
    }
  }
  if (!hit.found()) return "";
  return collapse_ws(xml_unescape(xml.substr(hit.body_begin, hit.body_end - hit.body_begin)));
}

std::string attr_value(std::string_view attrs, std::string_view name) {
  std::string needle = std::string(name) + "=\"";
  auto p = attrs.find(needle);
  if (p == std::string_view::npos) return "";
  auto start = p + needle.size();
  auto end = attrs.find('"', start);
  if (end == std::string_view::npos) return "";
  return xml_unescape(attrs.substr(start, end - start));
}

AtomEntry parse_entry(std::string_view body) {
  AtomEntry e;
  e.raw_id = tag_text(body, "id");
  if (auto id = arxiv_id_from_url(e.raw_id)) e.arxiv_id = *id;
  e.title = tag_text(body, "title");
  e.summary = tag_text(body, "summary");
  e.published = tag_text(body, "published");
  e.updated = tag_text(body, "updated");
  e.comment = tag_text(body, "comment");
  e.journal_ref = tag_text(body, "journal_ref");

  for (std::size_t pos = 0;;) {
    TagHit a = find_tag(body, "author", pos);
    if (!a.found()) break;
    std::string name = tag_text(body.substr(a.body_begin, a.body_end - a.body_begin), "name");
    if (!name.empty()) e.authors.push_back(name);
    pos = a.body_end + 1;
  }

  // Primary category first, then the <category> terms in order (deduped).
  TagHit primary = find_tag(body, "arxiv:primary_category");
  if (primary.found()) {
    std::string term = attr_value(primary.attrs, "term");
    if (!term.empty()) e.categories.push_back(term);
  }
  for (std::size_t pos = 0;;) {
    TagHit c = find_tag(body, "category", pos);
    if (!c.found()) break;
    std::string term = attr_value(c.attrs, "term");
    bool dup = false;
    for (const auto& t : e.categories) dup = dup || t == term;
    if (!term.empty() && !dup) e.categories.push_back(term);
    pos = c.body_end + 1;
  }
  return e;
}

}  // namespace

AtomFeed parse_atom_feed(std::string_view xml) {
  TagHit feed = find_tag(xml, "feed");
  if (!feed.found()) throw Error("FeedError", "document contains no <feed> element");
  std::string_view body = xml.substr(feed.body_begin, feed.body_end - feed.body_begin);

  AtomFeed out;
  std::string total = tag_text(body, "totalResults");
  if (!total.empty()) out.total_results = std::strtol(total.c_str(), nullptr, 10);

  for (std::size_t pos = 0;;) {
    TagHit e = find_tag(body, "entry", pos);
    if (!e.found()) break;
    out.entries.push_back(parse_entry(body.substr(e.body_begin, e.body_end - e.body_begin)));
    pos = e.body_end + 1;
  }
  return out;
}

}  // namespace synthbench
