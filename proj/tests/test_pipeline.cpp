#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <memory>

#include "synthbench/mock_judge.hpp"
#include "synthbench/pipeline.hpp"

using namespace synthbench;

namespace {

Judge make_judge(std::shared_ptr<JudgeBackend> backend,
                 std::shared_ptr<RunLog> log = std::make_shared<RunLog>()) {
  return Judge(std::move(backend), {}, std::make_shared<DiskKv>(), std::move(log));
}

CandidateDoc make_doc(const std::string& title, const std::string& snippet,
                      const std::string& id = "", const std::string& date = "2023-01-01") {
  CandidateDoc doc;
  doc.title = title;
  doc.snippet = snippet;
  if (!id.empty()) {
    doc.arxiv_id = id;
    doc.url = "https://arxiv.org/abs/" + id;
  } else {
    doc.url = "https://example.test/" + title;
  }
  if (!date.empty()) doc.published = *parse_date(date);
  return doc;
}

PaperRecord make_task() {
  PaperRecord task;
  task.arxiv_id = "2504.01234v1";
  task.title = "Streaming Joins Reconsidered";
  task.abstract = "We study streaming join algorithms under bounded memory.";
  task.categories = {"cs.DB"};
  task.published = "2025-04-10";
  task.related_work_clean = "Prior work exists.";
  return task;
}

SearchResult hit(const std::string& title, const std::string& id, const std::string& date) {
  SearchResult r;
  r.title = title;
  r.snippet = "Snippet about " + title;
  r.arxiv_id = id;
  r.url = "https://arxiv.org/abs/" + id;
  r.published = parse_date(date);
  return r;
}

}  // namespace

TEST_CASE("pipeline config carries documented defaults and validates") {
  auto cfg = load_pipeline_config(KeyValueConfig::parse(""));
  CHECK(cfg.num_rounds == 2);
  CHECK(cfg.queries_per_round == 2);
  CHECK(cfg.search_k == 50);
  CHECK(cfg.final_k == 30);

  auto tuned = load_pipeline_config(KeyValueConfig::parse(
      "num_rounds = 1\nfinal_k = 5\nprovider = fixture\noperator_model = m-op\n"));
  CHECK(tuned.num_rounds == 1);
  CHECK(tuned.final_k == 5);
  CHECK(tuned.provider == "fixture");
  CHECK(tuned.operator_model == "m-op");

  try {
    load_pipeline_config(KeyValueConfig::parse("search_k = 0\n"));
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.code() == "ConfigError");
  }
}

TEST_CASE("query generation parses, deduplicates, and logs shortfalls") {
  SUBCASE("scripted json array is returned as-is") {
    auto backend = std::make_shared<ScriptedBackend>(std::vector<MockRule>{
        {task::kQueryGen, "", R"({"queries": ["stream joins", "windowed joins"]})", -1}});
    auto judge = make_judge(backend);
    auto queries = generate_queries(judge, "m", "topic", "", 2, "2025-04-10");
    CHECK(queries == std::vector<std::string>{"stream joins", "windowed joins"});
    CHECK(judge.log().flag_count() == 0);
  }
  SUBCASE("duplicates are dropped and the shortfall is flagged") {
    auto backend = std::make_shared<ScriptedBackend>(std::vector<MockRule>{
        {task::kQueryGen, "", R"({"queries": ["same query", "Same Query"]})", -1}});
    auto judge = make_judge(backend);
    auto queries = generate_queries(judge, "m", "topic", "", 2, "2025-04-10");
    CHECK(queries == std::vector<std::string>{"same query"});
    CHECK(judge.log().flag_count() == 2);  // dup drop + shortfall
  }
  SUBCASE("an unparseable generator yields no queries but does not throw") {
    auto backend = std::make_shared<ScriptedBackend>(
        std::vector<MockRule>{{task::kQueryGen, "", "no json here", -1}});
    auto judge = make_judge(backend);
    CHECK(generate_queries(judge, "m", "topic", "", 2, "2025-04-10").empty());
    // one flag from the exhausted retry loop, one from the stage fallback
    CHECK(judge.log().flag_count() == 2);
  }
  SUBCASE("default mock emits the requested number of distinct queries") {
    auto judge = make_judge(std::make_shared<ScriptedBackend>());
    auto queries = generate_queries(judge, "m", "stream processing", "prior titles", 2,
                                    "2025-04-10");
    CHECK(queries.size() == 2);
    CHECK(queries[0] != queries[1]);
  }
}

TEST_CASE("semantic filter keeps judged-relevant docs in order") {
  std::vector<CandidateDoc> docs;
  for (int i = 1; i <= 6; ++i)
    docs.push_back(make_doc("Doc" + std::to_string(i), "about topic"));

  SUBCASE("all-accepting mock is the identity") {
    auto judge = make_judge(std::make_shared<ScriptedBackend>());
    CHECK(semantic_filter(judge, "m", docs, "q") == docs);
  }
  SUBCASE("scripted rejections keep ids {1,3,5} in original order") {
    std::vector<MockRule> rules;
    for (int i : {2, 4, 6})
      rules.push_back({task::kSemFilter, "Doc" + std::to_string(i), "False", -1});
    auto judge = make_judge(std::make_shared<ScriptedBackend>(rules));
    auto kept = semantic_filter(judge, "m", docs, "q");
    REQUIRE(kept.size() == 3);
    CHECK(kept[0].title == "Doc1");
    CHECK(kept[1].title == "Doc3");
    CHECK(kept[2].title == "Doc5");
  }
  SUBCASE("rejecting everything yields the empty set") {
    auto judge = make_judge(std::make_shared<ScriptedBackend>(
        std::vector<MockRule>{{task::kSemFilter, "", "False", -1}}));
    CHECK(semantic_filter(judge, "m", docs, "q").empty());
  }
  SUBCASE("an unparseable verdict keeps the doc and flags the log") {
    auto judge = make_judge(std::make_shared<ScriptedBackend>(
        std::vector<MockRule>{{task::kSemFilter, "Doc3", "hmm, unclear", -1},
                              {task::kSemFilter, "Doc4", "False", -1}}));
    auto kept = semantic_filter(judge, "m", docs, "q");
    REQUIRE(kept.size() == 5);  // Doc4 rejected, Doc3 kept by fallback
    CHECK(kept[2].title == "Doc3");
    // one flag from the exhausted retry loop, one from the stage fallback
    CHECK(judge.log().flag_count() == 2);
  }
}

TEST_CASE("topk choice parser reads the final decisive line") {
  CHECK(parse_topk_choice("Document 1") == 1);
  CHECK(parse_topk_choice("reasoning...\nDocument 2") == 2);
  CHECK(parse_topk_choice("Document 1 vs Document 2...\ndocument 2") == 2);
  CHECK_FALSE(parse_topk_choice("Document 1 or Document 2").has_value());
  CHECK_FALSE(parse_topk_choice("neither").has_value());
}

TEST_CASE("semantic top-k matches a sort oracle under the length comparator") {
  // The default mock prefers the longer document, so ranking must equal a
  // stable descending-length sort of the inputs.
  std::vector<CandidateDoc> docs = {
      make_doc("A", std::string(10, 'x')), make_doc("B", std::string(50, 'x')),
      make_doc("C", std::string(30, 'x')), make_doc("D", std::string(50, 'x')),
      make_doc("E", std::string(5, 'x')),  make_doc("F", std::string(40, 'x')),
  };
  auto backend = std::make_shared<ScriptedBackend>();
  auto judge = make_judge(backend);
  auto ranked = semantic_topk(judge, "m", docs, "q", 10);

  std::vector<CandidateDoc> oracle = docs;
  std::stable_sort(oracle.begin(), oracle.end(), [](const auto& a, const auto& b) {
    return doc_text(a).size() > doc_text(b).size();
  });
  CHECK(ranked == oracle);
  CHECK(ranked[0].title == "B");  // ties (B, D) keep retrieval order
  CHECK(ranked[1].title == "D");

  SUBCASE("k truncates the ranking") {
    auto top2 = semantic_topk(judge, "m", docs, "q", 2);
    REQUIRE(top2.size() == 2);
    CHECK(top2[0].title == "B");
    CHECK(top2[1].title == "D");
  }
  SUBCASE("a re-run is served entirely from the completion cache") {
    const long before = backend->call_count(task::kSemTopk);
    auto again = semantic_topk(judge, "m", docs, "q", 10);
    CHECK(again == ranked);
    CHECK(backend->call_count(task::kSemTopk) == before);
  }
  SUBCASE("fewer docs than k returns them all, still ranked") {
    std::vector<CandidateDoc> two = {docs[0], docs[1]};
    auto all = semantic_topk(judge, "m", two, "q", 30);
    REQUIRE(all.size() == 2);
    CHECK(all[0].title == "B");
  }
}

TEST_CASE("aggregation numbers docs densely and appends the reference list") {
  std::vector<CandidateDoc> docs = {make_doc("Alpha Paper", "sa", "2101.00001"),
                                    make_doc("Beta Paper", "sb", "2102.00002"),
                                    make_doc("Gamma Paper", "sc", "2103.00003")};

  SUBCASE("default mock cites every provided context") {
    auto judge = make_judge(std::make_shared<ScriptedBackend>());
    std::string text = aggregate_report(judge, "m", docs, "topic");
    CHECK(docs[0].citation_number == 1);
    CHECK(docs[2].citation_number == 3);
    Report report = parse_report(text);
    CHECK(report.marker_refs.at(1) == "2101.00001");
    CHECK(report.marker_refs.at(3) == "2103.00003");
    CHECK(dangling_markers(report, docs.size()).empty());
  }
  SUBCASE("a report citing a subset still lists every doc") {
    auto judge = make_judge(std::make_shared<ScriptedBackend>(std::vector<MockRule>{
        {task::kSemAgg, "", "Alpha is foundational [1]. Gamma refines it [3].", -1}}));
    std::string text = aggregate_report(judge, "m", docs, "topic");
    Report report = parse_report(text);
    std::vector<int> markers;
    for (const auto& [s, m] : report.inline_citations) markers.push_back(m);
    CHECK(markers == std::vector<int>{1, 3});
    CHECK(report.marker_refs.size() == 3);  // reference list is complete
  }
  SUBCASE("no docs is a hard error, not an empty report") {
    auto judge = make_judge(std::make_shared<ScriptedBackend>());
    std::vector<CandidateDoc> none;
    try {
      aggregate_report(judge, "m", none, "topic");
      FAIL("expected NoSources");
    } catch (const Error& e) {
      CHECK(e.code() == "NoSources");
    }
  }
}

TEST_CASE("full pipeline run against the fixture provider") {
  PaperRecord task = make_task();
  FixtureProvider provider({{"",
                             {hit("Alpha Paper", "2101.00001", "2021-01-01"),
                              hit("Beta Paper", "2102.00002", "2022-02-01"),
                              hit("Gamma Paper", "2103.00003", "2023-03-01")}}});
  auto backend = std::make_shared<ScriptedBackend>();
  auto judge = make_judge(backend);
  PipelineConfig cfg;

  TaskRun run = run_pipeline(task, cfg, judge, provider);
  REQUIRE_FALSE(run.failed);
  CHECK(run.task_id == "2504.01234");
  CHECK(run.queries.size() == 4);  // 2 rounds x 2 queries
  CHECK(run.candidates_seen <= 4L * cfg.search_k);
  REQUIRE(run.final_docs.size() == 3);  // deduplicated across rounds

  Report report = parse_report(run.report_text);
  CHECK(dangling_markers(report, run.final_docs.size()).empty());
  CHECK(leakage_violations(run.final_docs, task.published_date()).empty());
  CHECK(report.marker_refs.size() == 3);

  auto snippets = snippet_map_for(run.final_docs);
  REQUIRE(snippets.size() == 3);
  CHECK(snippets.at("2101.00001").find("Alpha Paper") == 0);

  SUBCASE("a warm cache replays the identical report") {
    const long before = backend->call_count();
    TaskRun again = run_pipeline(task, cfg, judge, provider);
    CHECK(again.report_text == run.report_text);
    CHECK(backend->call_count() == before);
  }
  SUBCASE("an empty provider surfaces as a task failure record") {
    FixtureProvider empty({});
    TaskRun failed = run_pipeline(task, cfg, judge, empty);
    CHECK(failed.failed);
    CHECK(failed.failure.find("NoSources") != std::string::npos);
    CHECK(failed.report_text.empty());
  }
}

TEST_CASE("leakage and citation-map checks catch violations") {
  std::vector<CandidateDoc> docs = {make_doc("ok", "s", "2101.00001", "2023-01-01"),
                                    make_doc("late", "s", "2102.00002", "2025-01-01"),
                                    make_doc("undated", "s", "2103.00003", "")};
  auto violations = leakage_violations(docs, *parse_date("2024-06-30"));
  REQUIRE(violations.size() == 2);
  CHECK(violations[0].find("2102.00002") != std::string::npos);
  CHECK(violations[1].find("no publication date") != std::string::npos);

  Report report = parse_report("Fact [1]. Claim [9].\n\n## References\n\n[1] u\n");
  auto dangling = dangling_markers(report, 3);
  CHECK(dangling == std::vector<int>{9});
}

TEST_CASE("sources sidecar round-trips with dates and numbers intact") {
  std::vector<CandidateDoc> docs = {make_doc("A", "sa", "2101.00001"),
                                    make_doc("B", "sb")};
  docs[0].citation_number = 1;
  docs[0].round_found = 2;
  docs[1].citation_number = 2;
  docs[1].published = std::nullopt;

  auto dir = std::filesystem::temp_directory_path() / "synthbench-pipeline-tests";
  std::filesystem::create_directories(dir);
  auto path = dir / "sources.jsonl";
  write_candidate_docs(path, docs);
  CHECK(read_candidate_docs(path) == docs);
}
