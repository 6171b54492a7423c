#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "synthbench/cache.hpp"
#include "synthbench/http.hpp"

namespace synthbench {

// Task kinds routed through the gateway. The first seven are evaluation
// judges; the rest are reference-pipeline operator calls sharing the same
// transport, cache, and retry plumbing.
namespace task {
inline constexpr const char* kPairwiseOrg = "pairwise_org";
inline constexpr const char* kRelevance = "relevance";
inline constexpr const char* kEntailment = "entailment";
inline constexpr const char* kNuggetExtract = "nugget_extract";
inline constexpr const char* kNuggetLabel = "nugget_label";
inline constexpr const char* kNuggetMatch = "nugget_match";
inline constexpr const char* kReferenceImportance = "reference_importance";
inline constexpr const char* kSemFilter = "sem_filter";
inline constexpr const char* kSemTopk = "sem_topk";
inline constexpr const char* kSemAgg = "sem_agg";
inline constexpr const char* kQueryGen = "query_gen";
}  // namespace task

struct CompletionRequest {
  std::string task_kind;
  std::string model;
  std::string prompt;
  int max_tokens = 0;  // 0: backend default
};

/// Digest identifying one completion: sha256(task_kind, model, prompt).
std::string judge_cache_key(const CompletionRequest& req);

class JudgeBackend {
 public:
  virtual ~JudgeBackend() = default;
  virtual std::string complete(const CompletionRequest& req) = 0;
  virtual std::string name() const = 0;
};

/// OpenAI-style chat-completions backend.
struct HttpJudgeOptions {
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key;
  int default_max_tokens = 2048;
};

class HttpJudgeBackend : public JudgeBackend {
 public:
  HttpJudgeBackend(std::shared_ptr<HttpTransport> transport, HttpJudgeOptions options);
  std::string complete(const CompletionRequest& req) override;
  std::string name() const override { return "http"; }

 private:
  std::shared_ptr<HttpTransport> transport_;
  HttpJudgeOptions options_;
};

/// Thread-safe run log: parse failures and other flags, never silently dropped.
class RunLog {
 public:
  void flag(const std::string& task_kind, const std::string& note);
  std::vector<std::string> entries() const;
  long flag_count() const;

 private:
  mutable std::mutex mu_;
  std::vector<std::string> entries_;
};

enum class OrgDecision { A, B, TIE };
enum class NuggetMatchGrade { Support, Partial, None };

/// AllClaims: evidence must support every aspect of the claim (coverage).
/// AnyClaim: evidence must support at least one claim (citation precision).
enum class EntailmentRubric { AllClaims, AnyClaim };

struct JudgeConfig {
  std::string general_model = "gpt-4o-2024-08-06";
  std::string nugget_model = "gpt-4.1-2025-04-14";
  int max_retries = 2;        // re-asks appended with a format reminder
  bool graded_relevance = true;  // false: binary rubric mapped {0->0, 1->2}
  size_t max_parallel = 8;
};

/// Single gateway to LLM judges: renders prompts, caches completions by
/// digest, retries with format reminders, and parses verdicts; every parse
/// failure yields a conservative fallback plus a RunLog flag.
class Judge {
 public:
  Judge(std::shared_ptr<JudgeBackend> backend, JudgeConfig config,
        std::shared_ptr<DiskKv> cache, std::shared_ptr<RunLog> log);

  // -- evaluation operations --
  OrgDecision pairwise_organization(const std::string& paper_ctx,
                                    const std::string& answer_a,
                                    const std::string& answer_b);
  int grade_relevance(const std::string& paper_title, const std::string& paper_abstract,
                      const std::string& related_work, const std::string& ref_title,
                      const std::string& ref_abstract);
  bool check_entailment(const std::string& claim, const std::string& references_text,
                        EntailmentRubric rubric = EntailmentRubric::AllClaims);
  std::vector<std::string> nuggetize(const std::string& exemplar_text);
  bool nugget_is_vital(const std::string& nugget, const std::string& exemplar_text);
  NuggetMatchGrade match_nugget(const std::string& nugget, const std::string& report_text);
  bool reference_is_important(const std::string& title, const std::string& abstract,
                              const std::string& related_work,
                              const std::string& cited_title,
                              const std::string& cited_authors,
                              const std::string& cited_content);

  // -- pipeline operator calls (same plumbing, different models allowed) --
  /// Raw completion with caching but no parse-retry loop.
  std::string complete(const std::string& task_kind, const std::string& model,
                       const std::string& prompt);
  /// Completion with the parse-retry loop: `accept` returns true when the
  /// completion is well-formed. Returns the last completion and sets
  /// `parse_ok`.
  std::string complete_validated(const std::string& task_kind, const std::string& model,
                                 const std::string& prompt,
                                 const std::function<bool(const std::string&)>& accept,
                                 bool& parse_ok);

  const JudgeConfig& config() const { return config_; }
  RunLog& log() { return *log_; }
  const DiskKv& cache() const { return *cache_; }
  std::string model_for(const std::string& task_kind) const;

 private:
  std::shared_ptr<JudgeBackend> backend_;
  JudgeConfig config_;
  std::shared_ptr<DiskKv> cache_;
  std::shared_ptr<RunLog> log_;
};

// Verdict parsers (exposed for tests; total: nullopt = unparseable).
std::optional<char> parse_org_decision(const std::string& raw);
std::optional<int> parse_final_score(const std::string& raw);
std::optional<bool> parse_binary_answer(const std::string& raw);
std::optional<std::vector<std::string>> parse_string_array(const std::string& raw);
std::optional<bool> parse_vital(const std::string& raw);
std::optional<NuggetMatchGrade> parse_match_grade(const std::string& raw);
std::optional<bool> parse_true_false(const std::string& raw);

}  // namespace synthbench
