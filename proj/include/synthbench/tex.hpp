#pragma once

#include <string>
#include <vector>

namespace synthbench {

/// The located related-work section of one paper's LaTeX source.
struct RelatedWorkSection {
  std::string heading;                     // heading text, markup stripped
  std::string raw_latex;                   // verbatim body as found
  std::string cleaned;                     // clean_latex(raw_latex)
  std::vector<std::string> citation_keys;  // in-order expansion, duplicates kept
  bool clean_warning = false;              // unbalanced environment encountered
};

struct CleanedLatex {
  std::string text;
  bool warning = false;  // set when an environment could not be balanced
};

/// Default case-insensitive substrings accepted as a related-work heading.
std::vector<std::string> default_related_work_names();

/// Finds the first sectioning command whose title contains one of `names`
/// (case-insensitive) and returns its body up to the next same-or-higher
/// level sectioning command. Throws Error("NotFound") when no heading
/// matches; callers skip such papers.
RelatedWorkSection extract_related_work(std::string_view latex_source,
                                        const std::vector<std::string>& names =
                                            default_related_work_names());

/// Prose cleanup of a LaTeX body:
///   - comments removed (a '%' not escaped with a backslash starts one)
///   - figure/table/subfigure/wrap environments deleted whole
///   - \label and \footnote removed; \ref-family dropped
///   - cite-family commands replaced by bracketed numeric placeholders,
///     numbered by first appearance of each unique key
///   - formatting commands unwrapped; math spans left untouched
///   - whitespace normalized
/// The result is a fixed point: clean_latex(clean_latex(x)) == clean_latex(x).
CleanedLatex clean_latex(std::string_view section);

/// In-order expansion of all cite-family command keys (comments ignored,
/// comma lists expanded, duplicates preserved).
std::vector<std::string> extract_citation_keys(std::string_view latex);

/// Removes LaTeX commands and braces for loose text matching
/// ("{{LLM}-based {E}val}" -> "LLM-based Eval").
std::string strip_tex_markup(std::string_view text);

}  // namespace synthbench
