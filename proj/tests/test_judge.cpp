#include <doctest.h>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <memory>

#include "synthbench/judge.hpp"
#include "synthbench/mock_judge.hpp"
#include "synthbench/prompts.hpp"
#include "synthbench/util.hpp"

using namespace synthbench;
using nlohmann::json;

namespace {

/// Transport fake returning one canned chat-completions response.
class FakeTransport : public HttpTransport {
 public:
  explicit FakeTransport(HttpResponse canned) : canned_(std::move(canned)) {}
  HttpResponse get(const std::string&, const Headers&) override { return canned_; }
  HttpResponse post(const std::string& url, const std::string& body,
                    const std::string& content_type, const Headers& headers) override {
    ++count_;
    last_url = url;
    last_body = body;
    last_content_type = content_type;
    last_headers = headers;
    return canned_;
  }
  size_t request_count() const override { return count_; }

  std::string last_url, last_body, last_content_type;
  Headers last_headers;

 private:
  HttpResponse canned_;
  size_t count_ = 0;
};

Judge make_judge(std::shared_ptr<JudgeBackend> backend, JudgeConfig cfg = {}) {
  return Judge(std::move(backend), std::move(cfg), std::make_shared<DiskKv>(),
               std::make_shared<RunLog>());
}

}  // namespace

TEST_CASE("cache keys differ across task kind, model, and prompt") {
  CompletionRequest base{"relevance", "m1", "p1"};
  std::string k = judge_cache_key(base);
  CHECK(k == judge_cache_key(base));
  CHECK(k.size() == 64);
  CHECK(k != judge_cache_key({"entailment", "m1", "p1"}));
  CHECK(k != judge_cache_key({"relevance", "m2", "p1"}));
  CHECK(k != judge_cache_key({"relevance", "m1", "p2"}));
}

TEST_CASE("verdict parsers accept the documented formats and reject noise") {
  SUBCASE("organization decision") {
    CHECK(*parse_org_decision(R"({"decision": "A", "explanation": "tighter"})") == 'A');
    CHECK(*parse_org_decision("Sure!\n{\"decision\": \"b\", \"explanation\": \"x\"}") ==
          'B');
    CHECK(*parse_org_decision("\"decision\": A") == 'A');
    CHECK(!parse_org_decision("I prefer the first one").has_value());
    CHECK(!parse_org_decision(R"({"decision": "C"})").has_value());
  }
  SUBCASE("final score") {
    CHECK(*parse_final_score("### final score: 2") == 2);
    CHECK(*parse_final_score("### Final Score: 0") == 0);
    CHECK(*parse_final_score("### final score: <1") == 1);
    CHECK(*parse_final_score("draft: final score: 0\n### final score: 2") == 2);
    CHECK(!parse_final_score("score is two").has_value());
  }
  SUBCASE("binary answer") {
    CHECK(*parse_binary_answer("Answer: 1") == true);
    CHECK(*parse_binary_answer("answer: 0") == false);
    CHECK(*parse_binary_answer("Answer: 0\nWait, Answer: 1") == true);
    CHECK(!parse_binary_answer("Answer: yes").has_value());
  }
  SUBCASE("string array") {
    auto arr = parse_string_array("Here you go:\n[\"one\", \"two\", \" \"]\nDone.");
    REQUIRE(arr.has_value());
    REQUIRE(arr->size() == 2);
    CHECK((*arr)[0] == "one");
    CHECK(!parse_string_array("{\"not\": \"an array\"}").has_value());
    CHECK(!parse_string_array("no brackets at all").has_value());
  }
  SUBCASE("vital label") {
    CHECK(*parse_vital("vital") == true);
    CHECK(*parse_vital("Okay.") == false);
    CHECK(*parse_vital("non-vital") == false);
    CHECK(!parse_vital("hmm").has_value());
    CHECK(!parse_vital("vital or okay, hard to say").has_value());
  }
  SUBCASE("match grade") {
    CHECK(*parse_match_grade("support") == NuggetMatchGrade::Support);
    CHECK(*parse_match_grade("partial_support") == NuggetMatchGrade::Partial);
    CHECK(*parse_match_grade("It does not support the nugget") ==
          NuggetMatchGrade::None);
    CHECK(!parse_match_grade("unclear").has_value());
  }
  SUBCASE("true/false reads the last decisive line") {
    CHECK(*parse_true_false("Is it relevant? Could be false...\nTrue") == true);
    CHECK(*parse_true_false("False") == false);
    CHECK(*parse_true_false("Yes") == true);
    CHECK(!parse_true_false("True or False, who knows").has_value());
    CHECK(!parse_true_false("maybe").has_value());
  }
}

TEST_CASE("completions are cached by digest and persist across instances") {
  auto backend = std::make_shared<ScriptedBackend>();
  auto cache_path = std::filesystem::temp_directory_path() / "sb_judge_cache.jsonl";
  std::filesystem::remove(cache_path);
  auto cache = std::make_shared<DiskKv>(cache_path);
  Judge judge(backend, {}, cache, std::make_shared<RunLog>());

  std::string first = judge.complete(task::kSemFilter, "m", "prompt one");
  std::string again = judge.complete(task::kSemFilter, "m", "prompt one");
  CHECK(first == again);
  CHECK(backend->call_count() == 1);
  judge.complete(task::kSemFilter, "m", "prompt two");
  CHECK(backend->call_count() == 2);

  // A fresh judge over the same cache file answers without the backend.
  auto backend2 = std::make_shared<ScriptedBackend>();
  Judge judge2(backend2, {}, std::make_shared<DiskKv>(cache_path),
               std::make_shared<RunLog>());
  CHECK(judge2.complete(task::kSemFilter, "m", "prompt one") == first);
  CHECK(backend2->call_count() == 0);
  std::filesystem::remove(cache_path);
}

TEST_CASE("validated completion retries with a format reminder then falls back") {
  SUBCASE("one bad completion recovers on retry") {
    auto backend = std::make_shared<ScriptedBackend>(std::vector<MockRule>{
        {"relevance", "", "mumble", 1}});
    auto log = std::make_shared<RunLog>();
    Judge judge(backend, {}, std::make_shared<DiskKv>(), log);
    bool ok = false;
    std::string raw = judge.complete_validated(
        task::kRelevance, "m", prompts::relevance("T", "A", "RW", "RT", "RA", true),
        [](const std::string& r) { return parse_final_score(r).has_value(); }, ok);
    CHECK(ok);
    CHECK(parse_final_score(raw).has_value());
    CHECK(backend->call_count() == 2);
    CHECK(backend->last_prompt(task::kRelevance).find("Reminder:") !=
          std::string::npos);
    CHECK(log->flag_count() == 0);
  }
  SUBCASE("persistent garbage exhausts retries and flags the run") {
    auto backend = std::make_shared<ScriptedBackend>(std::vector<MockRule>{
        {"relevance", "", "mumble", -1}});
    auto log = std::make_shared<RunLog>();
    Judge judge(backend, {}, std::make_shared<DiskKv>(), log);
    int score = 7;
    {
      Judge j2(backend, {}, std::make_shared<DiskKv>(), log);
      score = j2.grade_relevance("T", "A", "RW", "RT", "RA");
    }
    CHECK(score == 0);  // conservative fallback
    CHECK(backend->call_count() == 3);  // initial ask + two retries
    CHECK(log->flag_count() == 1);
    (void)judge;
  }
}

TEST_CASE("pairwise organization judges both orders and demands agreement") {
  std::string long_text = "This candidate has many more words than the other one.";
  std::string short_text = "Terse.";

  SUBCASE("consistent preference for the underlying report") {
    auto backend = std::make_shared<ScriptedBackend>();
    Judge judge = make_judge(backend);
    CHECK(judge.pairwise_organization("ctx", long_text, short_text) == OrgDecision::A);
    CHECK(judge.pairwise_organization("ctx", short_text, long_text) == OrgDecision::B);
    // The second call swaps positions, so both of its prompts were cached.
    CHECK(backend->call_count(task::kPairwiseOrg) == 2);
  }
  SUBCASE("position bias collapses to a tie") {
    auto backend = std::make_shared<ScriptedBackend>(std::vector<MockRule>{
        {"pairwise_org", "", R"({"decision": "A", "explanation": "first"})", -1}});
    Judge judge = make_judge(backend);
    CHECK(judge.pairwise_organization("ctx", long_text, short_text) ==
          OrgDecision::TIE);
  }
  SUBCASE("identical candidates tie") {
    Judge judge = make_judge(std::make_shared<ScriptedBackend>());
    CHECK(judge.pairwise_organization("ctx", long_text, long_text) == OrgDecision::TIE);
  }
}

TEST_CASE("relevance grading routes rubric modes") {
  SUBCASE("graded mode passes scores through") {
    auto backend = std::make_shared<ScriptedBackend>();
    Judge judge = make_judge(backend);
    int central = judge.grade_relevance(
        "Paper", "Abs", "We build on Dense Retrieval Transformers here.",
        "Dense Retrieval Transformers", "About retrieval.");
    CHECK(central == 2);
    int partial = judge.grade_relevance("Paper", "Abs",
                                        "We discuss retrieval systems broadly.",
                                        "Unrelated Title", "About retrieval systems.");
    CHECK(partial == 0);
    CHECK(backend->last_prompt(task::kRelevance).find("<0, 1 or 2>") !=
          std::string::npos);
  }
  SUBCASE("binary mode maps a positive verdict to grade 2") {
    JudgeConfig cfg;
    cfg.graded_relevance = false;
    auto backend = std::make_shared<ScriptedBackend>();
    Judge judge = make_judge(backend, cfg);
    int mapped = judge.grade_relevance(
        "Paper", "Abs", "We build on Dense Retrieval Transformers here.",
        "Dense Retrieval Transformers", "About retrieval.");
    CHECK(mapped == 2);
    CHECK(backend->last_prompt(task::kRelevance).find("<0 or 1>") !=
          std::string::npos);
    CHECK(judge.grade_relevance("Paper", "Abs", "Totally different themes.",
                                "Zzz Qqq", "Nope.") == 0);
  }
}

TEST_CASE("typed operations parse scripted defaults end to end") {
  Judge judge = make_judge(std::make_shared<ScriptedBackend>());

  CHECK(judge.check_entailment("cats purr",
                               "[1] Studies show cats purr when content.") == true);
  CHECK(judge.check_entailment("dogs fly", "[1] Studies about cats.") == false);

  auto nuggets = judge.nuggetize("First fact here. Second fact there. Third one.");
  REQUIRE(nuggets.size() == 3);
  CHECK(nuggets[0] == "First fact here.");

  CHECK(judge.nugget_is_vital("any nugget", "passage") == true);
  CHECK(judge.match_nugget("second fact", "First fact here. Second fact there.") ==
        NuggetMatchGrade::Support);
  CHECK(judge.match_nugget("absent fact", "Nothing relevant.") ==
        NuggetMatchGrade::None);
  CHECK(judge.reference_is_important("T", "A", "RW", "CT", "CA", "CC") == true);
}

TEST_CASE("model routing sends nugget tasks to the nugget model") {
  Judge judge = make_judge(std::make_shared<ScriptedBackend>());
  CHECK(judge.model_for(task::kNuggetExtract) == judge.config().nugget_model);
  CHECK(judge.model_for(task::kNuggetLabel) == judge.config().nugget_model);
  CHECK(judge.model_for(task::kNuggetMatch) == judge.config().nugget_model);
  CHECK(judge.model_for(task::kRelevance) == judge.config().general_model);
  CHECK(judge.model_for(task::kSemAgg) == judge.config().general_model);
}

TEST_CASE("http backend speaks the chat-completions protocol") {
  json ok_body = {
      {"choices",
       json::array({json{{"message", json{{"role", "assistant"},
                                          {"content", "Answer: 1"}}}}})}};
  auto transport = std::make_shared<FakeTransport>(HttpResponse{200, ok_body.dump()});
  HttpJudgeOptions opts;
  opts.base_url = "https://judge.example/v1";
  opts.api_key = "sk-test";
  HttpJudgeBackend backend(transport, opts);

  std::string content = backend.complete({"entailment", "model-x", "the prompt", 64});
  CHECK(content == "Answer: 1");
  CHECK(transport->last_url == "https://judge.example/v1/chat/completions");
  CHECK(transport->last_content_type == "application/json");
  CHECK(transport->last_headers.at("Authorization") == "Bearer sk-test");
  json sent = json::parse(transport->last_body);
  CHECK(sent.at("model") == "model-x");
  CHECK(sent.at("temperature") == 0);
  CHECK(sent.at("max_tokens") == 64);
  CHECK(sent.at("messages").at(0).at("content") == "the prompt");

  SUBCASE("http errors carry the status") {
    HttpJudgeBackend bad(std::make_shared<FakeTransport>(HttpResponse{429, "slow down"}),
                         opts);
    try {
      bad.complete({"entailment", "m", "p"});
      FAIL("expected a throw");
    } catch (const Error& e) {
      CHECK(e.code() == "JudgeHttpError");
      CHECK(std::string(e.what()).find("429") != std::string::npos);
    }
  }
  SUBCASE("malformed payloads are rejected") {
    HttpJudgeBackend bad(
        std::make_shared<FakeTransport>(HttpResponse{200, "{\"choices\": []}"}), opts);
    CHECK_THROWS_AS(bad.complete({"entailment", "m", "p"}), Error);
  }
}
