#pragma once

#include <string>
#include <vector>

namespace synthbench {

/// One bibliography entry. Field values are stored with the outer braces or
/// quotes removed, string macros resolved, and whitespace collapsed; inner
/// braces are kept verbatim (use bib_title for a display/match form).
struct BibEntry {
  std::string key;
  std::string entry_type;  // lowercased, e.g. "inproceedings"
  std::vector<std::pair<std::string, std::string>> fields;  // name (lowercased) -> value

  const std::string* find(std::string_view name) const;
  bool operator==(const BibEntry&) const = default;
};

struct ParsedBib {
  std::vector<BibEntry> entries;
  std::vector<std::string> skipped;  // one reason per malformed entry
};

/// Parses BibTeX source. @string macros are resolved, '#' concatenation is
/// applied, brace nesting is respected, and malformed entries are skipped
/// with a logged reason. Throws Error("EmptyBibliography") when nothing
/// parses.
ParsedBib parse_bib(std::string_view bib_source);

/// Entry title with braces and commands stripped; empty when absent.
std::string bib_title(const BibEntry& entry);

/// Round-trippable serialization: parse_bib(serialize_bib(x)).entries == x.
std::string serialize_bib(const std::vector<BibEntry>& entries);

}  // namespace synthbench
