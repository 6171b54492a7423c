#pragma once

#include <string>
#include <vector>

namespace synthbench {

/// One <entry> from an ArXiv Atom feed, with fields already unescaped and
/// whitespace-collapsed where appropriate.
struct AtomEntry {
  std::string arxiv_id;  // normalized, version-stripped
  std::string raw_id;    // as published, e.g. "http://arxiv.org/abs/2310.12345v2"
  std::string title;
  std::string summary;
  std::string published;  // ISO datetime as given
  std::string updated;
  std::vector<std::string> authors;
  std::vector<std::string> categories;  // term attributes, primary first
  std::string comment;                  // arxiv:comment, empty if absent
  std::string journal_ref;              // arxiv:journal_ref, empty if absent
};

struct AtomFeed {
  std::vector<AtomEntry> entries;
  long total_results = -1;  // opensearch:totalResults, -1 if absent
};

/// Decodes the XML entities used by the ArXiv feed (&amp; &lt; &gt; &quot;
/// &apos; and numeric references).
std::string xml_unescape(std::string_view s);

/// Parses an ArXiv Atom feed. Tolerant of namespace prefixes; throws
/// Error("FeedError") when the document has no <feed> element at all.
AtomFeed parse_atom_feed(std::string_view xml);

}  // namespace synthbench
