#include "synthbench/judge.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <regex>

#include "synthbench/prompts.hpp"
#include "synthbench/util.hpp"

namespace synthbench {

using nlohmann::json;

std::string judge_cache_key(const CompletionRequest& req) {
  return sha256_hex(req.task_kind + '\x1f' + req.model + '\x1f' + req.prompt);
}

// --- HTTP backend ------------------------------------------------------------

HttpJudgeBackend::HttpJudgeBackend(std::shared_ptr<HttpTransport> transport,
                                   HttpJudgeOptions options)
    : transport_(std::move(transport)), options_(std::move(options)) {}

std::string HttpJudgeBackend::complete(const CompletionRequest& req) {
  json body = {
      {"model", req.model},
      {"messages", json::array({json{{"role", "user"}, {"content", req.prompt}}})},
      {"temperature", 0},
      {"max_tokens", req.max_tokens > 0 ? req.max_tokens : options_.default_max_tokens},
  };
  Headers headers;
  if (!options_.api_key.empty())
    headers["Authorization"] = "Bearer " + options_.api_key;
  HttpResponse resp = transport_->post(options_.base_url + "/chat/completions",
                                       body.dump(), "application/json", headers);
  if (!resp.ok())
    throw Error("JudgeHttpError", "chat completion returned status " +
                                      std::to_string(resp.status) + ": " +
                                      resp.body.substr(0, 400));
  try {
    json j = json::parse(resp.body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const std::exception& e) {
    throw Error("JudgeHttpError", std::string("malformed completion response: ") + e.what());
  }
}

// --- run log -----------------------------------------------------------------

void RunLog::flag(const std::string& task_kind, const std::string& note) {
  std::lock_guard<std::mutex> lock(mu_);
  entries_.push_back(task_kind + ": " + note);
}

std::vector<std::string> RunLog::entries() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_;
}

long RunLog::flag_count() const {
  std::lock_guard<std::mutex> lock(mu_);
  return static_cast<long>(entries_.size());
}

// --- parsers -----------------------------------------------------------------

std::optional<char> parse_org_decision(const std::string& raw) {
  // Preferred: a JSON object with a "decision" field.
  auto start = raw.find('{');
  auto end = raw.rfind('}');
  if (start != std::string::npos && end != std::string::npos && end > start) {
    try {
      json j = json::parse(raw.substr(start, end - start + 1));
      if (j.contains("decision")) {
        std::string d = trim(j.at("decision").get<std::string>());
        if (d == "A" || d == "a") return 'A';
        if (d == "B" || d == "b") return 'B';
      }
    } catch (const std::exception&) {
      // fall through to the regex form
    }
  }
  static const std::regex kLoose(R"|("decision"\s*:\s*"?([ABab])"?)|");
  std::smatch m;
  if (std::regex_search(raw, m, kLoose))
    return static_cast<char>(std::toupper(m[1].str()[0]));
  return std::nullopt;
}

std::optional<int> parse_final_score(const std::string& raw) {
  static const std::regex kScore(R"(final score:\s*<?\s*([0-9]))", std::regex::icase);
  std::optional<int> last;
  auto begin = std::sregex_iterator(raw.begin(), raw.end(), kScore);
  for (auto it = begin; it != std::sregex_iterator(); ++it)
    last = std::stoi((*it)[1].str());
  return last;
}

std::optional<bool> parse_binary_answer(const std::string& raw) {
  static const std::regex kAnswer(R"(Answer:\s*([01]))", std::regex::icase);
  std::optional<bool> last;
  auto begin = std::sregex_iterator(raw.begin(), raw.end(), kAnswer);
  for (auto it = begin; it != std::sregex_iterator(); ++it)
    last = (*it)[1].str() == "1";
  return last;
}

std::optional<std::vector<std::string>> parse_string_array(const std::string& raw) {
  auto start = raw.find('[');
  auto end = raw.rfind(']');
  if (start == std::string::npos || end == std::string::npos || end <= start)
    return std::nullopt;
  try {
    json j = json::parse(raw.substr(start, end - start + 1));
    if (!j.is_array()) return std::nullopt;
    std::vector<std::string> out;
    for (const auto& item : j)
      if (item.is_string()) {
        std::string s = trim(item.get<std::string>());
        if (!s.empty()) out.push_back(s);
      }
    return out;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::optional<bool> parse_vital(const std::string& raw) {
  std::string lower = to_lower(raw);
  bool vital = lower.find("vital") != std::string::npos;
  bool okay = lower.find("okay") != std::string::npos ||
              lower.find("non-vital") != std::string::npos;
  if (lower.find("non-vital") != std::string::npos) return false;
  if (vital && !okay) return true;
  if (okay && !vital) return false;
  return std::nullopt;
}

std::optional<NuggetMatchGrade> parse_match_grade(const std::string& raw) {
  std::string lower = to_lower(raw);
  if (lower.find("partial_support") != std::string::npos ||
      lower.find("partial support") != std::string::npos)
    return NuggetMatchGrade::Partial;
  if (lower.find("not_support") != std::string::npos ||
      lower.find("not support") != std::string::npos ||
      lower.find("no_support") != std::string::npos)
    return NuggetMatchGrade::None;
  if (lower.find("support") != std::string::npos) return NuggetMatchGrade::Support;
  return std::nullopt;
}

std::optional<bool> parse_true_false(const std::string& raw) {
  // Decisions are read from the final line so chain-of-thought text that
  // mentions both words does not confuse the verdict.
  auto lines = split(raw, '\n');
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    std::string lower = to_lower(trim(*it));
    if (lower.empty()) continue;
    bool has_true = lower.find("true") != std::string::npos ||
                    lower == "yes" || lower.starts_with("yes");
    bool has_false = lower.find("false") != std::string::npos ||
                     lower == "no" || lower.starts_with("no,") || lower == "no.";
    if (has_true && !has_false) return true;
    if (has_false && !has_true) return false;
    if (has_true && has_false) return std::nullopt;
  }
  return std::nullopt;
}

// --- gateway -----------------------------------------------------------------

Judge::Judge(std::shared_ptr<JudgeBackend> backend, JudgeConfig config,
             std::shared_ptr<DiskKv> cache, std::shared_ptr<RunLog> log)
    : backend_(std::move(backend)),
      config_(std::move(config)),
      cache_(cache ? std::move(cache) : std::make_shared<DiskKv>("")),
      log_(log ? std::move(log) : std::make_shared<RunLog>()) {}

std::string Judge::model_for(const std::string& task_kind) const {
  if (task_kind == task::kNuggetExtract || task_kind == task::kNuggetLabel ||
      task_kind == task::kNuggetMatch)
    return config_.nugget_model;
  return config_.general_model;
}

std::string Judge::complete(const std::string& task_kind, const std::string& model,
                            const std::string& prompt) {
  CompletionRequest req{task_kind, model, prompt};
  std::string key = judge_cache_key(req);
  if (auto cached = cache_->get(key)) return *cached;
  std::string completion = backend_->complete(req);
  cache_->put(key, completion);
  return completion;
}

std::string Judge::complete_validated(const std::string& task_kind,
                                      const std::string& model,
                                      const std::string& prompt,
                                      const std::function<bool(const std::string&)>& accept,
                                      bool& parse_ok) {
  std::string asked = prompt;
  std::string completion;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    completion = complete(task_kind, model, asked);
    if (accept(completion)) {
      parse_ok = true;
      return completion;
    }
    // Appending the reminder changes the cache key, forcing a fresh ask.
    asked += "\n\n" + prompts::format_reminder(task_kind);
  }
  parse_ok = false;
  log_->flag(task_kind, "unparseable completion after " +
                            std::to_string(config_.max_retries) + " retries: " +
                            collapse_ws(completion).substr(0, 160));
  return completion;
}

OrgDecision Judge::pairwise_organization(const std::string& paper_ctx,
                                         const std::string& answer_a,
                                         const std::string& answer_b) {
  auto one_call = [&](const std::string& first, const std::string& second,
                      bool& ok) -> char {
    std::string prompt = prompts::pairwise_organization(paper_ctx, first, second);
    std::string raw = complete_validated(
        task::kPairwiseOrg, model_for(task::kPairwiseOrg), prompt,
        [](const std::string& r) { return parse_org_decision(r).has_value(); }, ok);
    if (!ok) return 'T';
    return *parse_org_decision(raw);
  };

  bool ok1 = false, ok2 = false;
  char forward = one_call(answer_a, answer_b, ok1);   // A = answer_a
  char backward = one_call(answer_b, answer_a, ok2);  // A = answer_b
  if (!ok1 || !ok2) return OrgDecision::TIE;
  bool a_wins = forward == 'A' && backward == 'B';
  bool b_wins = forward == 'B' && backward == 'A';
  if (a_wins) return OrgDecision::A;
  if (b_wins) return OrgDecision::B;
  return OrgDecision::TIE;
}

int Judge::grade_relevance(const std::string& paper_title,
                           const std::string& paper_abstract,
                           const std::string& related_work, const std::string& ref_title,
                           const std::string& ref_abstract) {
  bool graded = config_.graded_relevance;
  std::string prompt = prompts::relevance(paper_title, paper_abstract, related_work,
                                          ref_title, ref_abstract, graded);
  int max_grade = graded ? 2 : 1;
  bool ok = false;
  std::string raw = complete_validated(
      task::kRelevance, model_for(task::kRelevance), prompt,
      [&](const std::string& r) {
        auto s = parse_final_score(r);
        return s && *s >= 0 && *s <= max_grade;
      },
      ok);
  if (!ok) return 0;
  int score = *parse_final_score(raw);
  if (!graded) score = score == 1 ? 2 : 0;  // binary mode maps {0->0, 1->2}
  return score;
}

bool Judge::check_entailment(const std::string& claim,
                             const std::string& references_text,
                             EntailmentRubric rubric) {
  std::string prompt = prompts::attribution(claim, references_text,
                                            rubric == EntailmentRubric::AllClaims);
  bool ok = false;
  std::string raw = complete_validated(
      task::kEntailment, model_for(task::kEntailment), prompt,
      [](const std::string& r) { return parse_binary_answer(r).has_value(); }, ok);
  if (!ok) return false;
  return *parse_binary_answer(raw);
}

std::vector<std::string> Judge::nuggetize(const std::string& exemplar_text) {
  std::string prompt = prompts::nugget_extract(exemplar_text);
  bool ok = false;
  std::string raw = complete_validated(
      task::kNuggetExtract, model_for(task::kNuggetExtract), prompt,
      [](const std::string& r) {
        auto arr = parse_string_array(r);
        return arr && !arr->empty();
      },
      ok);
  if (!ok) return {};
  auto nuggets = *parse_string_array(raw);
  if (nuggets.size() > 30) nuggets.resize(30);
  return nuggets;
}

bool Judge::nugget_is_vital(const std::string& nugget, const std::string& exemplar_text) {
  std::string prompt = prompts::nugget_label(nugget, exemplar_text);
  bool ok = false;
  std::string raw = complete_validated(
      task::kNuggetLabel, model_for(task::kNuggetLabel), prompt,
      [](const std::string& r) { return parse_vital(r).has_value(); }, ok);
  if (!ok) return false;  // conservative: unlabeled nuggets are non-vital
  return *parse_vital(raw);
}

NuggetMatchGrade Judge::match_nugget(const std::string& nugget,
                                     const std::string& report_text) {
  std::string prompt = prompts::nugget_match(nugget, report_text);
  bool ok = false;
  std::string raw = complete_validated(
      task::kNuggetMatch, model_for(task::kNuggetMatch), prompt,
      [](const std::string& r) { return parse_match_grade(r).has_value(); }, ok);
  if (!ok) return NuggetMatchGrade::None;
  return *parse_match_grade(raw);
}

bool Judge::reference_is_important(const std::string& title, const std::string& abstract,
                                   const std::string& related_work,
                                   const std::string& cited_title,
                                   const std::string& cited_authors,
                                   const std::string& cited_content) {
  std::string prompt = prompts::reference_importance(title, abstract, related_work,
                                                     cited_title, cited_authors,
                                                     cited_content);
  bool ok = false;
  std::string raw = complete_validated(
      task::kReferenceImportance, model_for(task::kReferenceImportance), prompt,
      [](const std::string& r) { return parse_true_false(r).has_value(); }, ok);
  if (!ok) return false;  // conservative: inflates no one's coverage
  return *parse_true_false(raw);
}

}  // namespace synthbench
