#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "synthbench/dataset.hpp"
#include "synthbench/judge.hpp"
#include "synthbench/report.hpp"

namespace synthbench {

/// Reference target (ArXiv id, URL, or other marker target) -> the snippet
/// the generating system saw for it, or a title+abstract fallback.
using SnippetMap = std::map<std::string, std::string>;

/// (claim, evidence) -> supported. Must be monotone in evidence for the
/// window-monotonicity property to hold.
using EntailmentFn = std::function<bool(const std::string&, const std::string&)>;

struct CitationAudit {
  int sentence_index = 0;
  int marker = 0;
  std::string ref_target;  // empty when the marker resolves to nothing
  bool verdict = false;
  std::string note;  // "", "unresolved marker", "missing snippet"
};

struct PrecisionResult {
  double score = 0.0;
  long citations = 0;
  long flagged = 0;  // citations scored 0 without consulting the judge
  std::vector<CitationAudit> audit;
};

/// Mean per-citation support: each inline citation passes iff its one source
/// snippet supports at least one claim in the citing sentence. Reports with
/// zero inline citations score 0 and are flagged.
PrecisionResult citation_precision(const Report& report, const SnippetMap& snippets,
                                   const EntailmentFn& supports_any,
                                   RunLog* log = nullptr, size_t max_parallel = 8);

struct SentenceAudit {
  int sentence_index = 0;
  std::string sentence;
  std::vector<std::string> evidence_ids;
  bool verdict = false;
};

struct CoverageResult {
  double score = 0.0;
  std::vector<SentenceAudit> audit;
};

/// Mean per-content-sentence entailment against the union of snippets cited
/// within `window` content sentences on either side, plus the query context
/// (always included; uncited sentences are scored against it alone).
CoverageResult claim_coverage(const Report& report, const SnippetMap& snippets,
                              const std::string& query_ctx, int window,
                              const EntailmentFn& supports_all,
                              size_t max_parallel = 8);

/// claim_coverage for every window in [min_window, max_window].
std::map<int, double> claim_coverage_sweep(const Report& report,
                                           const SnippetMap& snippets,
                                           const std::string& query_ctx, int min_window,
                                           int max_window,
                                           const EntailmentFn& supports_all,
                                           size_t max_parallel = 8);

/// Judge-backed entailment under each rubric.
EntailmentFn any_claim_entailment(Judge& judge);
EntailmentFn all_claims_entailment(Judge& judge);

/// Exemplar-mode wiring: resolves the exemplar's [k] markers to its citation
/// records (first-appearance order of unique keys in the LaTeX source) and
/// registers title+abstract snippets for them.
void attach_exemplar_citations(Report& report, const PaperRecord& task,
                               SnippetMap& snippets);

}  // namespace synthbench
