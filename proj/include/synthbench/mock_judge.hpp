#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "synthbench/judge.hpp"

namespace synthbench {

/// One scripted response. Rules are tried in order; the first whose task kind
/// and prompt-substring both match wins. An empty `task` or `contains`
/// matches anything. `times` caps how often the rule fires (-1 = unlimited);
/// an exhausted rule is skipped, so later rules or the built-in default take
/// over — handy for exercising retry paths with one bad completion.
struct MockRule {
  std::string task;
  std::string contains;
  std::string response;
  long times = -1;
};

/// Deterministic offline judge backend. Without rules it synthesizes a
/// well-formed answer for every task kind from the prompt itself (comparing
/// candidate lengths, substring-matching claims against references, and so
/// on), so whole runs complete with zero network access and identical output
/// on every invocation.
class ScriptedBackend : public JudgeBackend {
 public:
  ScriptedBackend() = default;
  explicit ScriptedBackend(std::vector<MockRule> rules);

  /// Loads rules from a JSONL file: {"task","contains","response","times"}.
  static std::vector<MockRule> load_rules(const std::filesystem::path& path);

  std::string complete(const CompletionRequest& req) override;
  std::string name() const override { return "mock"; }

  long call_count() const;
  long call_count(const std::string& task_kind) const;
  std::string last_prompt(const std::string& task_kind) const;

 private:
  std::string default_response(const CompletionRequest& req) const;

  mutable std::mutex mu_;
  std::vector<MockRule> rules_;
  std::map<std::string, long> calls_;
  std::map<std::string, std::string> last_prompts_;
};

}  // namespace synthbench
