#include "synthbench/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>

#include "synthbench/arxiv_id.hpp"
#include "synthbench/prompts.hpp"

namespace synthbench {

using ordered_json = nlohmann::ordered_json;

PipelineConfig load_pipeline_config(const KeyValueConfig& cfg) {
  PipelineConfig out;
  out.num_rounds = static_cast<int>(cfg.get_int("num_rounds").value_or(out.num_rounds));
  out.queries_per_round =
      static_cast<int>(cfg.get_int("queries_per_round").value_or(out.queries_per_round));
  out.search_k = static_cast<int>(cfg.get_int("search_k").value_or(out.search_k));
  out.final_k = static_cast<int>(cfg.get_int("final_k").value_or(out.final_k));
  out.generator_model = cfg.get_or("generator_model", out.generator_model);
  out.operator_model = cfg.get_or("operator_model", out.operator_model);
  out.provider = cfg.get_or("provider", out.provider);
  out.background_chars =
      static_cast<int>(cfg.get_int("background_chars").value_or(out.background_chars));
  if (out.num_rounds < 1 || out.queries_per_round < 1 || out.search_k < 1 ||
      out.final_k < 1)
    throw Error("ConfigError",
                "num_rounds, queries_per_round, search_k, and final_k must be positive");
  if (out.background_chars < 0)
    throw Error("ConfigError", "background_chars must be non-negative");
  return out;
}

CandidateDoc candidate_from(const SearchResult& hit, int round) {
  CandidateDoc doc;
  doc.title = hit.title;
  doc.snippet = hit.snippet;
  doc.url = hit.url;
  doc.arxiv_id = hit.arxiv_id;
  doc.published = hit.published;
  doc.round_found = round;
  return doc;
}

std::string task_topic(const PaperRecord& task) {
  return "Title: " + task.title + "\n\nAbstract: " + task.abstract;
}

std::string doc_text(const CandidateDoc& doc) {
  if (doc.snippet.empty()) return doc.title;
  return doc.title + "\n" + doc.snippet;
}

std::vector<std::string> generate_queries(Judge& judge, const std::string& model,
                                          const std::string& topic,
                                          const std::string& background, int n,
                                          const std::string& date) {
  const std::string prompt = prompts::search_queries(topic, background, n, date);
  bool parse_ok = false;
  const std::string raw = judge.complete_validated(
      task::kQueryGen, model, prompt,
      [](const std::string& s) {
        auto parsed = parse_string_array(s);
        return parsed.has_value() && !parsed->empty();
      },
      parse_ok);
  if (!parse_ok) {
    judge.log().flag(task::kQueryGen, "no parseable queries; proceeding with none");
    return {};
  }
  std::vector<std::string> out;
  std::set<std::string> seen;
  const auto parsed = parse_string_array(raw);
  for (const auto& q : *parsed) {
    std::string cleaned = collapse_ws(q);
    if (cleaned.empty()) continue;
    if (!seen.insert(to_lower(cleaned)).second) {
      judge.log().flag(task::kQueryGen, "duplicate query dropped: " + cleaned);
      continue;
    }
    out.push_back(std::move(cleaned));
    if (static_cast<int>(out.size()) == n) break;
  }
  if (static_cast<int>(out.size()) < n)
    judge.log().flag(task::kQueryGen, "wanted " + std::to_string(n) + " queries, got " +
                                          std::to_string(out.size()));
  return out;
}

std::vector<CandidateDoc> semantic_filter(Judge& judge, const std::string& model,
                                          const std::vector<CandidateDoc>& docs,
                                          const std::string& topic) {
  std::vector<char> keep(docs.size(), 1);
  parallel_for(docs.size(), judge.config().max_parallel, [&](size_t i) {
    const std::string prompt = prompts::sem_filter(doc_text(docs[i]), topic);
    bool parse_ok = false;
    const std::string raw = judge.complete_validated(
        task::kSemFilter, model, prompt,
        [](const std::string& s) { return parse_true_false(s).has_value(); }, parse_ok);
    if (!parse_ok) {
      judge.log().flag(task::kSemFilter, "unparseable verdict; keeping doc");
      keep[i] = 1;  // recall-preserving default
    } else {
      keep[i] = *parse_true_false(raw) ? 1 : 0;
    }
  });
  std::vector<CandidateDoc> out;
  for (size_t i = 0; i < docs.size(); ++i)
    if (keep[i]) out.push_back(docs[i]);
  return out;
}

std::optional<int> parse_topk_choice(const std::string& raw) {
  auto lines = split(raw, '\n');
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    const std::string line = to_lower(*it);
    const bool one = line.find("document 1") != std::string::npos;
    const bool two = line.find("document 2") != std::string::npos;
    if (one == two) {
      if (one) return std::nullopt;  // both named on the answer line: ambiguous
      continue;
    }
    return one ? 1 : 2;
  }
  return std::nullopt;
}

std::vector<CandidateDoc> semantic_topk(Judge& judge, const std::string& model,
                                        std::vector<CandidateDoc> docs,
                                        const std::string& topic, int k) {
  if (k < 1) throw Error("ConfigError", "top-k requires k >= 1");
  const size_t n = docs.size();
  if (n <= 1) return docs;

  // True when `a` should rank above `b`; unparseable verdicts keep the
  // earlier (retrieval-order) doc first, which also serves as the tie-break.
  auto prefers_first = [&](const CandidateDoc& a, const CandidateDoc& b) {
    const std::string prompt = prompts::sem_topk_compare(topic, doc_text(a), doc_text(b));
    bool parse_ok = false;
    const std::string raw = judge.complete_validated(
        task::kSemTopk, model, prompt,
        [](const std::string& s) { return parse_topk_choice(s).has_value(); }, parse_ok);
    if (!parse_ok) {
      judge.log().flag(task::kSemTopk, "unparseable comparison; keeping retrieval order");
      return true;
    }
    return *parse_topk_choice(raw) == 1;
  };

  // Bottom-up merge reduction: deterministic given cached judgments, stable
  // with respect to retrieval order, and parallel across blocks of a pass.
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  for (size_t width = 1; width < n; width *= 2) {
    std::vector<size_t> next(order);
    const size_t num_blocks = (n + 2 * width - 1) / (2 * width);
    parallel_for(num_blocks, judge.config().max_parallel, [&](size_t bi) {
      const size_t lo = bi * 2 * width;
      const size_t mid = std::min(lo + width, n);
      const size_t hi = std::min(lo + 2 * width, n);
      size_t i = lo, j = mid, out = lo;
      while (i < mid && j < hi)
        next[out++] = prefers_first(docs[order[i]], docs[order[j]]) ? order[i++] : order[j++];
      while (i < mid) next[out++] = order[i++];
      while (j < hi) next[out++] = order[j++];
    });
    order = std::move(next);
  }

  std::vector<CandidateDoc> ranked;
  const size_t take = std::min<size_t>(static_cast<size_t>(k), n);
  ranked.reserve(take);
  for (size_t i = 0; i < take; ++i) ranked.push_back(std::move(docs[order[i]]));
  return ranked;
}

std::string aggregate_report(Judge& judge, const std::string& model,
                             std::vector<CandidateDoc>& docs, const std::string& topic,
                             const std::string& existing_content) {
  if (docs.empty()) throw Error("NoSources", "no documents survived to aggregation");

  std::string context;
  for (size_t i = 0; i < docs.size(); ++i) {
    docs[i].citation_number = static_cast<int>(i) + 1;
    if (!context.empty()) context += "\n\n";
    context += "[" + std::to_string(docs[i].citation_number) + "] " + docs[i].title +
               "\n" + docs[i].snippet;
  }

  const std::string prompt = prompts::sem_agg(
      topic, prompts::related_work_section_instructions(), existing_content, context);
  std::string body = judge.complete(task::kSemAgg, model, prompt);

  std::string text = trim(body);
  text += "\n\n## References\n\n";
  for (const auto& doc : docs)
    text += "[" + std::to_string(doc.citation_number) + "] " + doc.url + "\n";
  return text;
}

TaskRun run_pipeline(const PaperRecord& task, const PipelineConfig& cfg, Judge& judge,
                     SearchProvider& provider) {
  TaskRun run;
  run.task_id = task.task_id();
  try {
    const std::string topic = task_topic(task);
    const CutoffPolicy cutoff{task.published_date()};

    std::vector<CandidateDoc> candidates;
    std::set<std::string> seen;  // normalized id (or url) across rounds
    std::string background;

    for (int round = 1; round <= cfg.num_rounds; ++round) {
      auto queries = generate_queries(judge, cfg.operator_model, topic, background,
                                      cfg.queries_per_round, task.published);
      run.queries.insert(run.queries.end(), queries.begin(), queries.end());

      std::vector<std::vector<SearchResult>> hits(queries.size());
      parallel_for(queries.size(), judge.config().max_parallel, [&](size_t qi) {
        hits[qi] = provider.search(queries[qi], cfg.search_k, cutoff);
      });

      std::string round_titles;
      for (size_t qi = 0; qi < hits.size(); ++qi) {
        for (const auto& hit : hits[qi]) {
          ++run.candidates_seen;
          if (!round_titles.empty()) round_titles += "; ";
          round_titles += hit.title;
          const std::string key = hit.arxiv_id ? *hit.arxiv_id : normalize_for_match(hit.url);
          if (!seen.insert(key).second) continue;
          candidates.push_back(candidate_from(hit, round));
        }
      }
      if (!background.empty() && !round_titles.empty()) background += "; ";
      background += round_titles;
      if (static_cast<int>(background.size()) > cfg.background_chars)
        background.resize(static_cast<size_t>(cfg.background_chars));
    }

    auto kept = semantic_filter(judge, cfg.operator_model, candidates, topic);
    auto ranked = semantic_topk(judge, cfg.operator_model, std::move(kept), topic,
                                cfg.final_k);
    run.report_text = aggregate_report(judge, cfg.generator_model, ranked, topic);
    run.final_docs = std::move(ranked);
  } catch (const Error& e) {
    run.failed = true;
    run.failure = e.what();
    spdlog::warn("pipeline failed for {}: {}", run.task_id, run.failure);
  }
  return run;
}

std::vector<std::string> leakage_violations(const std::vector<CandidateDoc>& docs,
                                            const Date& cutoff) {
  std::vector<std::string> out;
  for (const auto& doc : docs) {
    const std::string label = doc.arxiv_id ? *doc.arxiv_id : doc.url;
    if (!doc.published)
      out.push_back(label + ": no publication date");
    else if (cutoff < *doc.published)
      out.push_back(label + ": " + doc.published->str());
  }
  return out;
}

std::vector<int> dangling_markers(const Report& report, size_t num_docs) {
  std::vector<int> out;
  std::set<int> seen;
  for (const auto& [sentence, marker] : report.inline_citations)
    if ((marker < 1 || marker > static_cast<int>(num_docs)) && seen.insert(marker).second)
      out.push_back(marker);
  return out;
}

std::map<std::string, std::string> snippet_map_for(const std::vector<CandidateDoc>& docs) {
  std::map<std::string, std::string> out;
  for (const auto& doc : docs) {
    const std::string key = doc.arxiv_id ? *doc.arxiv_id : doc.url;
    if (key.empty()) continue;
    out.emplace(key, doc_text(doc));
  }
  return out;
}

void write_candidate_docs(const std::filesystem::path& path,
                          const std::vector<CandidateDoc>& docs) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("IoError", "cannot open " + path.string() + " for writing");
  for (const auto& doc : docs) {
    ordered_json j;
    j["title"] = doc.title;
    j["snippet"] = doc.snippet;
    j["url"] = doc.url;
    if (doc.arxiv_id) j["arxiv_id"] = *doc.arxiv_id;
    if (doc.published) j["published"] = doc.published->str();
    j["round_found"] = doc.round_found;
    j["citation_number"] = doc.citation_number;
    out << j.dump() << "\n";
  }
}

std::vector<CandidateDoc> read_candidate_docs(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoError", "cannot open " + path.string());
  std::vector<CandidateDoc> out;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto j = nlohmann::json::parse(line);
    CandidateDoc doc;
    doc.title = j.value("title", "");
    doc.snippet = j.value("snippet", "");
    doc.url = j.value("url", "");
    if (j.contains("arxiv_id")) doc.arxiv_id = normalize_arxiv_id(j["arxiv_id"].get<std::string>());
    if (j.contains("published")) doc.published = parse_date(j["published"].get<std::string>());
    doc.round_found = j.value("round_found", 0);
    doc.citation_number = j.value("citation_number", 0);
    out.push_back(std::move(doc));
  }
  return out;
}

}  // namespace synthbench
