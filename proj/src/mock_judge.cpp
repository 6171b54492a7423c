#include "synthbench/mock_judge.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <regex>

#include "synthbench/util.hpp"

namespace synthbench {

using nlohmann::json;

namespace {

/// Text after `begin` up to the earliest of `ends` (or end of prompt).
std::string section_between(const std::string& prompt, const std::string& begin,
                            const std::vector<std::string>& ends) {
  auto start = prompt.find(begin);
  if (start == std::string::npos) return "";
  start += begin.size();
  size_t stop = prompt.size();
  for (const auto& end : ends) {
    auto pos = prompt.find(end, start);
    if (pos != std::string::npos && pos < stop) stop = pos;
  }
  auto next_section = prompt.find("\n\n###", start);
  if (next_section != std::string::npos && next_section < stop) stop = next_section;
  return trim(prompt.substr(start, stop - start));
}

std::string tag_between(const std::string& prompt, const std::string& open,
                        const std::string& close) {
  auto start = prompt.find(open);
  if (start == std::string::npos) return "";
  start += open.size();
  auto stop = prompt.find(close, start);
  if (stop == std::string::npos) stop = prompt.size();
  return trim(prompt.substr(start, stop - start));
}

std::string first_line(const std::string& text) {
  auto pos = text.find('\n');
  return trim(pos == std::string::npos ? text : text.substr(0, pos));
}

std::vector<std::string> naive_sentences(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '\n') c = ' ';
    current += c;
    bool ender = c == '.' || c == '?' || c == '!';
    bool boundary = ender && (i + 1 == text.size() || text[i + 1] == ' ' ||
                              text[i + 1] == '\n');
    if (boundary) {
      std::string s = trim(current);
      if (s.size() > 2) out.push_back(s);
      current.clear();
    }
  }
  std::string tail = trim(current);
  if (tail.size() > 2) out.push_back(tail);
  return out;
}

std::string org_default(const std::string& prompt) {
  std::string a = section_between(prompt, "### Candidate related-work section A\n", {});
  std::string b = section_between(prompt, "### Candidate related-work section B\n",
                                  {"\n\nOutput your answer"});
  const char* decision = b.size() > a.size() ? "B" : "A";
  return std::string("{\"decision\": \"") + decision +
         "\", \"explanation\": \"Scripted verdict based on candidate length.\"}";
}

std::string relevance_default(const std::string& prompt) {
  std::string context =
      section_between(prompt, "### Ground-truth related-work section:\n", {});
  std::string candidate =
      section_between(prompt, "### Candidate reference paper:\n", {"\n\nReturn only"});
  std::string title = normalize_for_match(first_line(candidate));
  std::string haystack = normalize_for_match(context);
  int score = 0;
  if (!title.empty() && haystack.find(title) != std::string::npos) {
    score = 2;
  } else {
    for (const auto& word : split(title, ' ')) {
      if (word.size() >= 5 && haystack.find(word) != std::string::npos) {
        score = 1;
        break;
      }
    }
  }
  bool binary = prompt.find("<0 or 1>") != std::string::npos;
  if (binary) score = score > 0 ? 1 : 0;
  return "### final score: " + std::to_string(score);
}

std::string entailment_default(const std::string& prompt) {
  std::string claim = section_between(prompt, "### CLAIM:\n", {});
  std::string refs =
      section_between(prompt, "### REFERENCES:\n", {"\n\nJudgment Criteria:"});
  bool supported = !claim.empty() &&
                   normalize_for_match(refs).find(normalize_for_match(claim)) !=
                       std::string::npos;
  return supported ? "Answer: 1" : "Answer: 0";
}

std::string nugget_extract_default(const std::string& prompt) {
  std::string passage = section_between(prompt, "### PASSAGE:\n", {"\n\nOutput a JSON"});
  auto sentences = naive_sentences(passage);
  if (sentences.size() > 30) sentences.resize(30);
  json arr = json::array();
  for (const auto& s : sentences) arr.push_back(s);
  return arr.dump();
}

std::string nugget_match_default(const std::string& prompt) {
  std::string report = section_between(prompt, "### REPORT:\n", {});
  std::string nugget = section_between(prompt, "### NUGGET:\n", {"\n\nAnswer with"});
  bool contained = !nugget.empty() &&
                   normalize_for_match(report).find(normalize_for_match(nugget)) !=
                       std::string::npos;
  return contained ? "support" : "not_support";
}

std::string topk_default(const std::string& prompt) {
  std::string a = section_between(prompt, "### Document 1:\n", {});
  std::string b = section_between(prompt, "### Document 2:\n", {"\n\nThink step"});
  return b.size() > a.size() ? "Document 2" : "Document 1";
}

std::string query_gen_default(const std::string& prompt) {
  std::string topic = tag_between(prompt, "<Report topic>\n", "\n</Report topic>");
  int n = 2;
  std::smatch m;
  static const std::regex kCount(R"(Generate (\d+) distinct)");
  if (std::regex_search(prompt, m, kCount)) n = std::stoi(m[1].str());
  auto words = split(collapse_ws(topic), ' ');
  if (words.size() > 8) words.resize(8);
  std::string base;
  for (const auto& w : words) base += (base.empty() ? "" : " ") + w;
  if (base.empty()) base = "open problems";
  static const std::vector<std::string> kAngles = {"methods",      "benchmarks",
                                                   "survey",       "evaluation",
                                                   "applications", "models"};
  json queries = json::array();
  for (int i = 0; i < n; ++i)
    queries.push_back(base + " " + kAngles[static_cast<size_t>(i) % kAngles.size()]);
  return json{{"queries", queries}}.dump();
}

std::string agg_default(const std::string& prompt) {
  std::string topic = tag_between(prompt, "<User Query>\n", "\n</User Query>");
  std::string context = tag_between(prompt, "<Source material>\n", "\n</Source material>");
  // Context blocks arrive as "[k] Title" header lines followed by snippets.
  static const std::regex kHeader(R"(^\[(\d+)\]\s*(.*)$)");
  std::vector<std::pair<int, std::string>> docs;
  for (const auto& line : split(context, '\n')) {
    std::smatch m;
    std::string l = trim(line);
    if (std::regex_match(l, m, kHeader))
      docs.emplace_back(std::stoi(m[1].str()), trim(m[2].str()));
  }
  std::string body = "## Related Work\n\n";
  if (docs.empty()) {
    body += "No source material was provided for " + first_line(topic) + "\n";
    return body;
  }
  std::string para;
  for (const auto& [num, title] : docs) {
    if (!para.empty()) para += " ";
    para += (title.empty() ? std::string("An uncited source") : title) +
            " studies a closely related problem [" + std::to_string(num) + "].";
  }
  body += para + "\n";
  return body;
}

}  // namespace

ScriptedBackend::ScriptedBackend(std::vector<MockRule> rules)
    : rules_(std::move(rules)) {}

std::vector<MockRule> ScriptedBackend::load_rules(const std::filesystem::path& path) {
  std::string content = read_file(path.string());
  std::vector<MockRule> rules;
  size_t line_no = 0;
  for (const auto& line : split(content, '\n')) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      MockRule rule;
      rule.task = j.value("task", "");
      rule.contains = j.value("contains", "");
      rule.response = j.at("response").get<std::string>();
      rule.times = j.value("times", -1L);
      rules.push_back(std::move(rule));
    } catch (const std::exception& e) {
      throw Error("MockScriptError", path.string() + ":" + std::to_string(line_no) +
                                         ": " + e.what());
    }
  }
  return rules;
}

std::string ScriptedBackend::complete(const CompletionRequest& req) {
  std::lock_guard<std::mutex> lock(mu_);
  ++calls_[req.task_kind];
  last_prompts_[req.task_kind] = req.prompt;
  for (auto& rule : rules_) {
    if (rule.times == 0) continue;
    if (!rule.task.empty() && rule.task != req.task_kind) continue;
    if (!rule.contains.empty() && req.prompt.find(rule.contains) == std::string::npos)
      continue;
    if (rule.times > 0) --rule.times;
    return rule.response;
  }
  return default_response(req);
}

std::string ScriptedBackend::default_response(const CompletionRequest& req) const {
  const std::string& kind = req.task_kind;
  if (kind == task::kPairwiseOrg) return org_default(req.prompt);
  if (kind == task::kRelevance) return relevance_default(req.prompt);
  if (kind == task::kEntailment) return entailment_default(req.prompt);
  if (kind == task::kNuggetExtract) return nugget_extract_default(req.prompt);
  if (kind == task::kNuggetLabel) return "vital";
  if (kind == task::kNuggetMatch) return nugget_match_default(req.prompt);
  if (kind == task::kReferenceImportance) return "True";
  if (kind == task::kSemFilter) return "True";
  if (kind == task::kSemTopk) return topk_default(req.prompt);
  if (kind == task::kSemAgg) return agg_default(req.prompt);
  if (kind == task::kQueryGen) return query_gen_default(req.prompt);
  return "OK";
}

long ScriptedBackend::call_count() const {
  std::lock_guard<std::mutex> lock(mu_);
  long total = 0;
  for (const auto& [kind, n] : calls_) total += n;
  return total;
}

long ScriptedBackend::call_count(const std::string& task_kind) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = calls_.find(task_kind);
  return it == calls_.end() ? 0 : it->second;
}

std::string ScriptedBackend::last_prompt(const std::string& task_kind) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = last_prompts_.find(task_kind);
  return it == last_prompts_.end() ? "" : it->second;
}

}  // namespace synthbench
