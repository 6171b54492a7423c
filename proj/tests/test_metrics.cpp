#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "synthbench/metrics_retrieval.hpp"
#include "synthbench/metrics_synthesis.hpp"
#include "synthbench/metrics_verifiability.hpp"
#include "synthbench/mock_judge.hpp"
#include "synthbench/report.hpp"

using namespace synthbench;

namespace {

Judge make_judge(std::shared_ptr<JudgeBackend> backend) {
  return Judge(std::move(backend), {}, std::make_shared<DiskKv>(),
               std::make_shared<RunLog>());
}

PaperRecord make_task(const std::string& id, const std::string& related_work) {
  PaperRecord r;
  r.arxiv_id = id + "v1";
  r.title = "Task " + id;
  r.abstract = "Abstract for " + id;
  r.categories = {"cs.CL"};
  r.published = "2025-04-01";
  r.related_work_latex = "\\section{Related Work}\n" + related_work;
  r.related_work_clean = related_work;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Synthesis metrics
// ---------------------------------------------------------------------------

TEST_CASE("win rate aggregates ties as half wins") {
  CHECK(org_win_rate(3, 1, 5) == doctest::Approx(0.7));
  CHECK(org_win_rate(0, 5, 5) == doctest::Approx(0.5));
  CHECK(org_win_rate(0, 0, 5) == doctest::Approx(0.0));
  CHECK(org_win_rate(0, 0, 0) == doctest::Approx(0.0));
}

TEST_CASE("organization score judges each report against its exemplar") {
  PaperRecord t1 = make_task("2501.00001", "Short exemplar.");
  PaperRecord t2 = make_task("2501.00002", "A much longer exemplar text that the "
                                           "default mock prefers over terse reports.");
  PaperRecord t3 = make_task("2501.00003", "Exemplar without any report.");
  std::map<std::string, std::string> reports = {
      {"2501.00001", "A detailed and well organized report, far longer than that."},
      {"2501.00002", "Tiny."},
  };
  auto log = std::make_shared<RunLog>();
  Judge judge(std::make_shared<ScriptedBackend>(), {}, std::make_shared<DiskKv>(), log);
  OrgResult res = organization_score(reports, {t1, t2, t3}, judge);

  CHECK(res.wins == 1);
  CHECK(res.losses == 1);
  CHECK(res.ties == 0);
  CHECK(res.skipped == 1);
  REQUIRE(res.per_report.size() == 2);
  CHECK(res.per_report[0].second == OrgOutcome::WIN);
  CHECK(res.per_report[1].second == OrgOutcome::LOSS);
  CHECK(res.win_rate == doctest::Approx(0.5));
  CHECK(log->flag_count() == 1);

  SUBCASE("reports identical to exemplars tie at one half") {
    std::map<std::string, std::string> mirror = {
        {"2501.00001", t1.related_work_clean},
        {"2501.00002", t2.related_work_clean},
    };
    Judge j2 = make_judge(std::make_shared<ScriptedBackend>());
    OrgResult self = organization_score(mirror, {t1, t2}, j2);
    CHECK(self.ties == 2);
    CHECK(self.win_rate == doctest::Approx(0.5));
  }
}

TEST_CASE("nugget coverage counts fully supported nuggets") {
  NuggetSet set;
  set.exemplar_id = "2501.00001";
  set.nuggets = {{"nugget alpha", true},
                 {"nugget bravo", false},
                 {"nugget charlie", false},
                 {"nugget delta", true},
                 {"nugget echo", false}};
  std::vector<MockRule> rules = {
      {"nugget_match", "nugget alpha", "support", -1},
      {"nugget_match", "nugget bravo", "support", -1},
      {"nugget_match", "nugget charlie", "partial_support", -1},
      {"nugget_match", "nugget delta", "not_support", -1},
      {"nugget_match", "nugget echo", "support", -1},
  };
  Judge judge = make_judge(std::make_shared<ScriptedBackend>(rules));
  NuggetCoverage cov = nugget_coverage("some report", set, judge);
  CHECK(cov.strict_all == doctest::Approx(0.6));  // 3 of 5 fully supported
  CHECK(cov.supported == 3);
  CHECK(cov.total == 5);
  REQUIRE(cov.vital_only.has_value());
  CHECK(*cov.vital_only == doctest::Approx(0.5));  // alpha yes, delta no
  CHECK(cov.vital_total == 2);

  SUBCASE("empty nugget sets are a configuration error") {
    NuggetSet empty{"2501.00001", {}};
    Judge j2 = make_judge(std::make_shared<ScriptedBackend>());
    CHECK_THROWS_AS(nugget_coverage("report", empty, j2), Error);
  }
  SUBCASE("no vital nuggets leaves the vital column empty") {
    NuggetSet plain{"x", {{"nugget bravo", false}}};
    Judge j2 = make_judge(std::make_shared<ScriptedBackend>(rules));
    CHECK(!nugget_coverage("r", plain, j2).vital_only.has_value());
  }
}

TEST_CASE("nugget sets come from the exemplar and are labeled") {
  PaperRecord task =
      make_task("2501.00004", "First fact stands alone. Second fact follows here.");
  Judge judge = make_judge(std::make_shared<ScriptedBackend>());
  NuggetSet set = build_nugget_set(task, judge);
  CHECK(set.exemplar_id == "2501.00004");
  REQUIRE(set.nuggets.size() == 2);
  CHECK(set.nuggets[0].first == "First fact stands alone.");
  CHECK(set.nuggets[0].second == true);  // default mock labels everything vital

  SUBCASE("an exemplar the judge cannot nuggetize is an error") {
    PaperRecord blank = make_task("2501.00005", "");
    Judge j2 = make_judge(std::make_shared<ScriptedBackend>());
    CHECK_THROWS_AS(build_nugget_set(blank, j2), Error);
  }
}

// ---------------------------------------------------------------------------
// Retrieval metrics
// ---------------------------------------------------------------------------

TEST_CASE("relevance rate is the normalized grade average") {
  RetrievedSet set;
  set.task_id = "t";
  set.sources = {"a", "b", "c"};
  set.grades = {{"a", 2}, {"b", 1}, {"c", 0}};
  CHECK(relevance_rate(set) == doctest::Approx(0.5));

  set.grades = {{"a", 2}, {"b", 2}, {"c", 2}};
  CHECK(relevance_rate(set) == doctest::Approx(1.0));

  RetrievedSet empty;
  CHECK(relevance_rate(empty) == doctest::Approx(0.0));

  SUBCASE("grades must key exactly the sources") {
    set.grades = {{"a", 2}, {"b", 2}};
    CHECK_THROWS_AS(relevance_rate(set), Error);
    set.grades = {{"a", 2}, {"b", 2}, {"z", 2}};
    CHECK_THROWS_AS(relevance_rate(set), Error);
    set.grades = {{"a", 2}, {"b", 2}, {"c", 3}};
    CHECK_THROWS_AS(relevance_rate(set), Error);
  }
}

TEST_CASE("reference coverage counts important hits and excludes empty keys") {
  RetrievedSet set;
  set.sources = {"a", "b", "x"};
  ExemplarKeySet keys;
  keys.important_ids = {"a", "b", "c", "d"};
  CHECK(*reference_coverage(set, keys) == doctest::Approx(0.5));

  keys.important_ids = {"x"};
  CHECK(*reference_coverage(set, keys) == doctest::Approx(1.0));

  keys.important_ids = {"nope"};
  CHECK(*reference_coverage(set, keys) == doctest::Approx(0.0));

  keys.important_ids = {"a", "b", "c", "d"};
  set.sources = {"a"};
  CHECK(*reference_coverage(set, keys) == doctest::Approx(0.25));

  keys.important_ids.clear();
  CHECK(!reference_coverage(set, keys).has_value());
}

TEST_CASE("document importance clamps the pooled median ratio") {
  std::vector<double> exemplar = {100, 200, 300, 400};  // median 250
  CHECK(document_importance(exemplar, exemplar) == doctest::Approx(1.0));
  CHECK(document_importance({500, 500, 500}, exemplar) == doctest::Approx(1.0));
  CHECK(document_importance({25}, exemplar) == doctest::Approx(0.1));
  CHECK(document_importance({}, exemplar) == doctest::Approx(0.0));

  CHECK_THROWS_AS(document_importance({1, 2}, {}), Error);
  CHECK_THROWS_AS(document_importance({1, 2}, {0, 0, 0}), Error);
  try {
    document_importance({1}, {});
  } catch (const Error& e) {
    CHECK(e.code() == "DegenerateBaselineMedian");
  }
}

TEST_CASE("formula outputs match a brute-force oracle on random inputs") {
  std::mt19937 rng(20250815);
  std::uniform_int_distribution<int> size_dist(0, 8);
  std::uniform_int_distribution<int> grade_dist(0, 2);
  std::uniform_int_distribution<int> count_dist(1, 2000);
  for (int trial = 0; trial < 50; ++trial) {
    int n = size_dist(rng);
    RetrievedSet set;
    set.task_id = "t";
    double grade_sum = 0;
    for (int i = 0; i < n; ++i) {
      std::string id = "id" + std::to_string(i);
      int g = grade_dist(rng);
      set.sources.push_back(id);
      set.grades[id] = g;
      grade_sum += g;
    }
    double expected_rr = n == 0 ? 0.0 : grade_sum / (2.0 * n);
    CHECK(relevance_rate(set) == doctest::Approx(expected_rr));

    ExemplarKeySet keys;
    int e = size_dist(rng);
    for (int i = 0; i < e; ++i)
      keys.important_ids.insert("id" + std::to_string(2 * i));  // overlap evens
    if (e == 0) {
      CHECK(!reference_coverage(set, keys).has_value());
    } else {
      long hits = 0;
      for (const auto& s : set.sources) hits += keys.important_ids.count(s) ? 1 : 0;
      CHECK(*reference_coverage(set, keys) ==
            doctest::Approx(static_cast<double>(hits) / e));
    }

    std::vector<double> sys, ex;
    for (int i = 0, m = size_dist(rng) + 1; i < m; ++i)
      sys.push_back(count_dist(rng));
    for (int i = 0, m = size_dist(rng) + 1; i < m; ++i) ex.push_back(count_dist(rng));
    auto middle = [](std::vector<double> v) {
      std::sort(v.begin(), v.end());
      size_t k = v.size() / 2;
      return v.size() % 2 == 1 ? v[k] : (v[k - 1] + v[k]) / 2.0;
    };
    double expected_di = std::min(middle(sys) / middle(ex), 1.0);
    CHECK(document_importance(sys, ex) == doctest::Approx(expected_di));
  }
}

TEST_CASE("grading a retrieved set consults metadata and flags gaps") {
  PaperRecord task = make_task(
      "2501.00006", "We build on Dense Retrieval Transformers for this work.");
  MetadataFn metadata = [](const std::string& id)
      -> std::optional<std::pair<std::string, std::string>> {
    if (id == "2101.00001")
      return std::make_pair(std::string("Dense Retrieval Transformers"),
                            std::string("A retrieval model."));
    if (id == "2101.00002")
      return std::make_pair(std::string("Zzz Qqq"), std::string("Other field."));
    return std::nullopt;
  };
  auto log = std::make_shared<RunLog>();
  Judge judge(std::make_shared<ScriptedBackend>(), {}, std::make_shared<DiskKv>(), log);
  RetrievedSet set = grade_retrieved_set(
      task, {"2101.00001", "2101.00002", "2101.00001", "2101.00404"}, metadata, judge);
  REQUIRE(set.sources.size() == 3);  // duplicate collapsed
  CHECK(set.grades.at("2101.00001") == 2);
  CHECK(set.grades.at("2101.00002") == 0);
  CHECK(set.grades.at("2101.00404") == 0);
  CHECK(log->flag_count() == 1);
  CHECK(relevance_rate(set) == doctest::Approx(2.0 / 6.0));
}

TEST_CASE("exemplar key sets and breakdown come from the citation records") {
  PaperRecord task = make_task("2501.00007", "Text.");
  CitationRecord important_arxiv;
  important_arxiv.bib_key = "a";
  important_arxiv.title = "A";
  important_arxiv.arxiv_id = "2101.00001";
  important_arxiv.citation_count = 100;
  important_arxiv.important = true;
  CitationRecord important_web = important_arxiv;
  important_web.bib_key = "b";
  important_web.arxiv_id.reset();
  important_web.citation_count.reset();
  CitationRecord plain_arxiv;
  plain_arxiv.bib_key = "c";
  plain_arxiv.title = "C";
  plain_arxiv.arxiv_id = "2101.00003";
  plain_arxiv.citation_count = 50;
  task.citations = {important_arxiv, important_web, plain_arxiv};

  ExemplarKeySet keys = exemplar_key_set(task);
  CHECK(keys.important_ids == std::set<std::string>{"2101.00001"});
  CHECK(keys.exemplar_cite_counts == std::vector<double>{100, 50});

  CitationsBreakdown b = citations_breakdown(task);
  CHECK(b.important_arxiv == 1);
  CHECK(b.important_non_arxiv == 1);
  CHECK(b.non_essential == 1);
}

// ---------------------------------------------------------------------------
// Verifiability metrics
// ---------------------------------------------------------------------------

namespace {

const char* kCitedReport =
    "## Findings\n"
    "First claim [1]. Second claim [2]. Third claim [3]. Fourth claim [4].\n"
    "\n"
    "## References\n"
    "[1] https://arxiv.org/abs/2101.00001\n"
    "[2] https://arxiv.org/abs/2101.00002\n"
    "[3] https://arxiv.org/abs/2101.00003\n"
    "[4] https://arxiv.org/abs/2101.00004\n";

}  // namespace

TEST_CASE("citation precision averages per-citation support") {
  Report report = parse_report(kCitedReport);
  REQUIRE(report.inline_citations.size() == 4);
  SnippetMap snippets = {{"2101.00001", "EVIDENCE one"},
                         {"2101.00002", "nothing here"},
                         {"2101.00004", "EVIDENCE four"}};
  EntailmentFn fn = [](const std::string&, const std::string& evidence) {
    return evidence.find("EVIDENCE") != std::string::npos;
  };
  auto log = std::make_shared<RunLog>();
  PrecisionResult res = citation_precision(report, snippets, fn, log.get());
  CHECK(res.citations == 4);
  CHECK(res.score == doctest::Approx(0.5));  // citations 1 and 4 supported
  CHECK(res.flagged == 1);                   // marker 3 has no snippet
  REQUIRE(res.audit.size() == 4);
  CHECK(res.audit[2].note == "missing snippet");
  CHECK(res.audit[1].verdict == false);
  CHECK(log->flag_count() == 1);

  SUBCASE("zero inline citations score zero with a flag") {
    Report bare = parse_report("Just prose without any markers.");
    auto log2 = std::make_shared<RunLog>();
    PrecisionResult empty = citation_precision(bare, snippets, fn, log2.get());
    CHECK(empty.score == doctest::Approx(0.0));
    CHECK(empty.citations == 0);
    CHECK(empty.flagged == 1);
    CHECK(log2->flag_count() == 1);
  }
  SUBCASE("markers with no reference-list entry are flagged") {
    Report dangling = parse_report("A claim [9].\n");
    PrecisionResult res2 = citation_precision(dangling, snippets, fn);
    CHECK(res2.score == doctest::Approx(0.0));
    CHECK(res2.audit[0].note == "unresolved marker");
  }
}

TEST_CASE("claim coverage unions evidence over the content-sentence window") {
  Report report = parse_report(
      "## T\n"
      "Alpha statement [1]. Beta statement. Gamma statement [2].\n"
      "\n"
      "## References\n"
      "[1] https://arxiv.org/abs/2101.00001\n"
      "[2] https://arxiv.org/abs/2101.00002\n");
  SnippetMap snippets = {{"2101.00001", "alpha evidence"},
                         {"2101.00002", "gamma evidence"}};
  EntailmentFn fn = [](const std::string&, const std::string& evidence) {
    return evidence.find("evidence") != std::string::npos;
  };

  CoverageResult w0 = claim_coverage(report, snippets, "background", 0, fn);
  CHECK(w0.score == doctest::Approx(2.0 / 3.0));  // Beta sees only the query ctx
  REQUIRE(w0.audit.size() == 3);
  CHECK(w0.audit[1].evidence_ids.empty());
  CHECK(w0.audit[0].evidence_ids == std::vector<std::string>{"2101.00001"});

  CoverageResult w1 = claim_coverage(report, snippets, "background", 1, fn);
  CHECK(w1.score == doctest::Approx(1.0));  // neighbors now cover Beta
  CHECK(w1.audit[1].evidence_ids ==
        std::vector<std::string>{"2101.00001", "2101.00002"});

  SUBCASE("query context alone can support uncited sentences") {
    EntailmentFn ctx_fn = [](const std::string&, const std::string& evidence) {
      return evidence.find("Query context:") != std::string::npos;
    };
    CHECK(claim_coverage(report, snippets, "anything", 0, ctx_fn).score ==
          doctest::Approx(1.0));
    CHECK(claim_coverage(report, snippets, "", 0, ctx_fn).score <
          doctest::Approx(1.0));
  }
  SUBCASE("no evidence at all scores zero under a strict judge") {
    EntailmentFn strict = [](const std::string&, const std::string& evidence) {
      return !evidence.empty();
    };
    CHECK(claim_coverage(report, {}, "", 0, strict).score == doctest::Approx(0.0));
  }
  SUBCASE("sweep is monotone in the window") {
    auto sweep = claim_coverage_sweep(report, snippets, "", 0, 5, fn);
    REQUIRE(sweep.size() == 6);
    for (int w = 1; w <= 5; ++w) CHECK(sweep[w] >= sweep[w - 1]);
  }
}

TEST_CASE("empty reports yield empty coverage") {
  Report empty = parse_report("");
  EntailmentFn fn = [](const std::string&, const std::string&) { return true; };
  CoverageResult res = claim_coverage(empty, {}, "ctx", 1, fn);
  CHECK(res.score == doctest::Approx(0.0));
  CHECK(res.audit.empty());
}

TEST_CASE("exemplar citations attach markers and title+abstract snippets") {
  PaperRecord task = make_task("2501.00008", "unused");
  task.related_work_latex =
      "\\section{Related Work}\nUses~\\cite{alpha} and \\cite{beta,gamma}, then "
      "\\cite{alpha} again.";
  CitationRecord alpha;
  alpha.bib_key = "alpha";
  alpha.title = "Alpha Paper";
  alpha.abstract = "Alpha abstract.";
  alpha.arxiv_id = "2101.00001";
  CitationRecord beta;
  beta.bib_key = "beta";
  beta.title = "Beta Paper";
  beta.url = "https://example.com/beta";
  CitationRecord gamma;
  gamma.bib_key = "gamma";
  gamma.title = "Gamma Paper";
  task.citations = {alpha, beta, gamma};

  Report report = parse_report("Uses [1] and [2][3], then [1] again.");
  SnippetMap snippets;
  attach_exemplar_citations(report, task, snippets);
  CHECK(report.marker_refs.at(1) == "2101.00001");
  CHECK(report.marker_refs.at(2) == "https://example.com/beta");
  CHECK(report.marker_refs.at(3) == "bib:gamma");
  CHECK(snippets.at("2101.00001") == "Alpha Paper\nAlpha abstract.");
  CHECK(snippets.at("bib:gamma") == "Gamma Paper");
}
