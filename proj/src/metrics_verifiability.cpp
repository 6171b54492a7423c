#include "synthbench/metrics_verifiability.hpp"

#include <algorithm>
#include <set>

#include "synthbench/arxiv_id.hpp"
#include "synthbench/tex.hpp"
#include "synthbench/util.hpp"

namespace synthbench {

PrecisionResult citation_precision(const Report& report, const SnippetMap& snippets,
                                   const EntailmentFn& supports_any, RunLog* log,
                                   size_t max_parallel) {
  PrecisionResult result;
  result.citations = static_cast<long>(report.inline_citations.size());
  if (report.inline_citations.empty()) {
    ++result.flagged;
    if (log) log->flag("citation_precision", "report has no inline citations");
    return result;
  }

  result.audit.resize(report.inline_citations.size());
  for (size_t i = 0; i < report.inline_citations.size(); ++i) {
    auto [sentence_index, marker] = report.inline_citations[i];
    CitationAudit& a = result.audit[i];
    a.sentence_index = sentence_index;
    a.marker = marker;
    auto target = report.marker_refs.find(marker);
    if (target == report.marker_refs.end()) {
      a.note = "unresolved marker";
    } else {
      a.ref_target = target->second;
      if (!snippets.count(target->second)) a.note = "missing snippet";
    }
  }

  parallel_for(result.audit.size(), max_parallel, [&](size_t i) {
    CitationAudit& a = result.audit[i];
    if (!a.note.empty()) return;  // already scored 0
    const std::string& sentence =
        report.sentences[static_cast<size_t>(a.sentence_index)].text;
    a.verdict = supports_any(sentence, snippets.at(a.ref_target));
  });

  long supported = 0;
  for (const auto& a : result.audit) {
    if (!a.note.empty()) {
      ++result.flagged;
      if (log)
        log->flag("citation_precision",
                  a.note + " for marker [" + std::to_string(a.marker) +
                      "] in sentence " + std::to_string(a.sentence_index));
    }
    if (a.verdict) ++supported;
  }
  result.score = static_cast<double>(supported) / static_cast<double>(result.citations);
  return result;
}

namespace {

/// Evidence for one sentence: markers cited within the window, resolved and
/// deduplicated in ascending marker order, prefixed by the query context.
struct Evidence {
  std::vector<std::string> ids;
  std::string text;
};

Evidence gather_evidence(const Report& report, const SnippetMap& snippets,
                         const std::string& query_ctx,
                         const std::vector<int>& content, size_t position,
                         int window) {
  std::set<int> markers;
  size_t lo = position >= static_cast<size_t>(window)
                  ? position - static_cast<size_t>(window)
                  : 0;
  size_t hi = std::min(content.size() - 1, position + static_cast<size_t>(window));
  for (size_t p = lo; p <= hi; ++p) {
    const Sentence& s = report.sentences[static_cast<size_t>(content[p])];
    markers.insert(s.cited_markers.begin(), s.cited_markers.end());
  }

  Evidence ev;
  if (!query_ctx.empty()) ev.text = "Query context:\n" + query_ctx;
  std::set<std::string> seen;
  for (int m : markers) {
    auto target = report.marker_refs.find(m);
    if (target == report.marker_refs.end()) continue;
    auto snippet = snippets.find(target->second);
    if (snippet == snippets.end()) continue;
    if (!seen.insert(target->second).second) continue;
    ev.ids.push_back(target->second);
    if (!ev.text.empty()) ev.text += "\n\n";
    ev.text += "[" + std::to_string(m) + "] " + snippet->second;
  }
  return ev;
}

}  // namespace

CoverageResult claim_coverage(const Report& report, const SnippetMap& snippets,
                              const std::string& query_ctx, int window,
                              const EntailmentFn& supports_all, size_t max_parallel) {
  CoverageResult result;
  std::vector<int> content = report.content_sentence_indices();
  if (content.empty()) return result;

  result.audit.resize(content.size());
  for (size_t p = 0; p < content.size(); ++p) {
    SentenceAudit& a = result.audit[p];
    a.sentence_index = content[p];
    a.sentence = report.sentences[static_cast<size_t>(content[p])].text;
  }
  parallel_for(content.size(), max_parallel, [&](size_t p) {
    Evidence ev = gather_evidence(report, snippets, query_ctx, content, p, window);
    SentenceAudit& a = result.audit[p];
    a.evidence_ids = std::move(ev.ids);
    a.verdict = supports_all(a.sentence, ev.text);
  });

  long covered = 0;
  for (const auto& a : result.audit) covered += a.verdict ? 1 : 0;
  result.score = static_cast<double>(covered) / static_cast<double>(content.size());
  return result;
}

std::map<int, double> claim_coverage_sweep(const Report& report,
                                           const SnippetMap& snippets,
                                           const std::string& query_ctx, int min_window,
                                           int max_window,
                                           const EntailmentFn& supports_all,
                                           size_t max_parallel) {
  std::map<int, double> scores;
  for (int w = min_window; w <= max_window; ++w)
    scores[w] =
        claim_coverage(report, snippets, query_ctx, w, supports_all, max_parallel).score;
  return scores;
}

EntailmentFn any_claim_entailment(Judge& judge) {
  return [&judge](const std::string& claim, const std::string& evidence) {
    return judge.check_entailment(claim, evidence, EntailmentRubric::AnyClaim);
  };
}

EntailmentFn all_claims_entailment(Judge& judge) {
  return [&judge](const std::string& claim, const std::string& evidence) {
    return judge.check_entailment(claim, evidence, EntailmentRubric::AllClaims);
  };
}

void attach_exemplar_citations(Report& report, const PaperRecord& task,
                               SnippetMap& snippets) {
  std::vector<std::string> unique_keys;
  std::set<std::string> seen;
  for (const auto& key : extract_citation_keys(task.related_work_latex))
    if (seen.insert(key).second) unique_keys.push_back(key);

  for (size_t i = 0; i < unique_keys.size(); ++i) {
    const CitationRecord* cite = nullptr;
    for (const auto& c : task.citations)
      if (c.bib_key == unique_keys[i]) {
        cite = &c;
        break;
      }
    if (!cite) continue;
    std::string target = cite->arxiv_id ? normalize_arxiv_id(*cite->arxiv_id)
                         : cite->url    ? *cite->url
                                        : "bib:" + cite->bib_key;
    std::string snippet = cite->title;
    if (cite->abstract && !cite->abstract->empty()) {
      if (!snippet.empty()) snippet += "\n";
      snippet += *cite->abstract;
    }
    int marker = static_cast<int>(i) + 1;
    report.marker_refs[marker] = target;
    if (!snippet.empty()) snippets[target] = snippet;
  }
}

}  // namespace synthbench
