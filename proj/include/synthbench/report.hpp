#pragma once

#include <map>
#include <string>
#include <vector>

namespace synthbench {

/// Version tag for the sentence segmenter; emitted alongside scores so any
/// number can be traced to the exact segmentation rules that produced it.
inline constexpr const char* kSegmenterVersion = "sb-seg-1";

struct Sentence {
  int index = 0;                   // ordinal over all sentences in the report
  std::string text;
  std::vector<int> cited_markers;  // bracketed numeric markers, in order
  bool is_content = true;          // false: headings and reference-list lines
};

struct ReportStats {
  long chars = 0;      // UTF-8 code points of the full text
  long words = 0;      // whitespace tokens, excluding pure [k] marker tokens
  long sentences = 0;  // content sentences only
  long unique_refs = 0;
  long inline_citations = 0;
};

/// A normalized report: the unit every metric consumes.
struct Report {
  std::string text;
  std::vector<Sentence> sentences;
  /// (sentence index, marker) for every marker in a content sentence.
  std::vector<std::pair<int, int>> inline_citations;
  /// Normalized ArXiv ids found anywhere in the text, first-appearance order.
  std::vector<std::string> references;
  /// Marker -> reference target from a trailing reference list: a normalized
  /// ArXiv id when one is present on the line, otherwise the first URL,
  /// otherwise the line remainder.
  std::map<int, std::string> marker_refs;

  std::vector<int> content_sentence_indices() const;
};

/// Deterministic, abbreviation-safe segmentation. Markdown headings and
/// reference-list lines become sentences with is_content=false; blank lines
/// produce nothing.
std::vector<Sentence> segment_sentences(std::string_view text);

Report parse_report(std::string_view text);

ReportStats report_stats(const Report& report);

}  // namespace synthbench
