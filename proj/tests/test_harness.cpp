#include <doctest.h>

#include <filesystem>
#include <memory>

#include "synthbench/harness.hpp"
#include "synthbench/mock_judge.hpp"
#include "synthbench/pipeline.hpp"
#include "synthbench/util.hpp"

using namespace synthbench;

namespace fs = std::filesystem;

namespace {

Judge make_judge(std::shared_ptr<JudgeBackend> backend,
                 std::shared_ptr<DiskKv> cache = std::make_shared<DiskKv>()) {
  return Judge(std::move(backend), {}, std::move(cache), std::make_shared<RunLog>());
}

CitationRecord cite(const std::string& key, const std::string& title,
                    const std::string& id, const std::string& abstract, long count) {
  CitationRecord c;
  c.bib_key = key;
  c.title = title;
  c.authors = {"A. Author"};
  c.abstract = abstract;
  c.arxiv_id = id;
  c.url = "https://arxiv.org/abs/" + id;
  c.citation_count = count;
  return c;
}

/// Three tasks with known citation counts and scripted-judge-friendly text.
std::vector<PaperRecord> fixture_records() {
  PaperRecord a;
  a.arxiv_id = "2504.00001v1";
  a.title = "Alpha Synthesis Methods";
  a.abstract = "We study alpha synthesis.";
  a.categories = {"cs.IR"};
  a.published = "2025-04-10";
  a.related_work_latex =
      "Prior art covers dense retrieval for synthesis~\\cite{alpha}. "
      "Benchmarks matter~\\cite{beta}.";
  a.related_work_clean =
      "Prior art covers dense retrieval for synthesis [1]. Benchmarks matter [2].";
  a.citations = {cite("alpha", "Dense Retrieval Advances", "2101.00001",
                      "Dense retrieval advances for synthesis tasks.", 100),
                 cite("beta", "Benchmark Construction", "2102.00002",
                      "How to build benchmarks.", 400)};

  PaperRecord b;
  b.arxiv_id = "2504.00002v1";
  b.title = "Beta Benchmarks";
  b.abstract = "We survey beta benchmarks.";
  b.categories = {"cs.IR"};
  b.published = "2025-04-12";
  b.related_work_latex = "Beta work exists~\\cite{gamma}.";
  b.related_work_clean = "Beta work exists [1].";
  b.citations = {
      cite("gamma", "Gamma Grounding", "2103.00003", "Gamma grounding methods.", 50)};

  PaperRecord c;
  c.arxiv_id = "2504.00003v1";
  c.title = "Delta Directions";
  c.abstract = "We chart delta directions.";
  c.categories = {"cs.IR"};
  c.published = "2025-04-15";
  c.related_work_latex = "Delta methods abound~\\cite{delta}.";
  c.related_work_clean = "Delta methods abound [1].";
  c.citations = {cite("delta", "Delta Methods", "2104.00004", "Methods for delta.", 250)};

  return {a, b, c};
}

std::vector<NuggetSet> fixture_nuggets() {
  NuggetSet a;
  a.exemplar_id = "2504.00001";
  a.nuggets = {{"Prior art covers dense retrieval for synthesis [1].", true},
               {"Benchmarks matter [2].", true}};
  NuggetSet b;
  b.exemplar_id = "2504.00002";
  b.nuggets = {{"Beta work exists [1].", true}};
  NuggetSet c;
  c.exemplar_id = "2504.00003";
  c.nuggets = {{"Delta methods abound [1].", true}};
  return {a, b, c};
}

/// Reports for tasks A and B (task C deliberately has none). A cites through
/// its reference list only; B ships a sources sidecar as `synthesize` would.
void write_fixture_reports(const fs::path& dir) {
  fs::create_directories(dir);
  write_file(dir / "2504.00001.md",
             "## Related Work\n\n"
             "Dense retrieval advances for synthesis tasks [1]. Benchmarks matter [2].\n\n"
             "## References\n\n"
             "[1] https://arxiv.org/abs/2101.00001\n"
             "[2] https://arxiv.org/abs/2102.00002\n");
  write_file(dir / "2504.00002.md",
             "## Related Work\n\n"
             "Gamma grounding methods exist today [1].\n\n"
             "## References\n\n"
             "[1] https://arxiv.org/abs/2103.00003\n");
  CandidateDoc doc;
  doc.title = "Gamma Grounding";
  doc.snippet = "Gamma grounding methods.";
  doc.url = "https://arxiv.org/abs/2103.00003";
  doc.arxiv_id = "2103.00003";
  doc.published = *parse_date("2025-01-01");
  doc.round_found = 0;
  doc.citation_number = 1;
  write_candidate_docs(dir / "2504.00002.sources.jsonl", {doc});
}

/// Marks "Benchmark Construction" non-essential; mock default labels the rest
/// important. Scripts a TIE for task B's pairwise comparison.
std::vector<MockRule> fixture_rules() {
  return {
      {task::kReferenceImportance, "Benchmark Construction", "False", -1},
      {task::kPairwiseOrg, "Beta Benchmarks",
       "{\"decision\": \"B\", \"explanation\": \"scripted\"}", -1},
  };
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("agreement is the fraction of identical aligned labels") {
  CHECK(agreement({"A", "A", "B", "B"}, {"A", "B", "B", "B"}) == doctest::Approx(0.75));
  CHECK(agreement({"x", "y"}, {"x", "y"}) == doctest::Approx(1.0));
  CHECK(agreement({"x", "y"}, {"y", "x"}) == doctest::Approx(0.0));

  SUBCASE("length mismatch is an error") {
    CHECK_THROWS_WITH_AS(agreement({"A"}, {"A", "B"}), doctest::Contains("LengthMismatch"),
                         Error);
  }
  SUBCASE("empty lists are an error, not vacuous agreement") {
    CHECK_THROWS_WITH_AS(agreement({}, {}), doctest::Contains("EmptyLabels"), Error);
  }
}

TEST_CASE("read_labels skips blanks and trims whitespace") {
  TempDir tmp("sb-harness-labels");
  write_file(tmp.path / "labels.txt", "A\n\n  B \nC\n\n");
  CHECK(read_labels(tmp.path / "labels.txt") == std::vector<std::string>{"A", "B", "C"});
}

TEST_CASE("log_histogram bins log10(1+count) at fixed width") {
  // counts {0, 9, 99, 999} -> logs {0, 1, 2, 3} -> every other 0.5-wide bin.
  auto bins = log_histogram({0, 9, 99, 999});
  REQUIRE(bins.size() == 7);
  std::vector<long> counts;
  for (const auto& b : bins) counts.push_back(b.count);
  CHECK(counts == std::vector<long>{1, 0, 1, 0, 1, 0, 1});
  CHECK(bins[0].lo == doctest::Approx(0.0));
  CHECK(bins[0].hi == doctest::Approx(0.5));
  CHECK(bins[6].lo == doctest::Approx(3.0));
  CHECK(bins[6].hi == doctest::Approx(3.5));

  SUBCASE("empty input yields no bins") { CHECK(log_histogram({}).empty()); }
}

TEST_CASE("label_importance fills only undecided citations") {
  auto records = fixture_records();
  records[2].citations[0].important = false;  // pre-labeled; must not be touched
  auto backend = std::make_shared<ScriptedBackend>(fixture_rules());
  Judge judge = make_judge(backend);

  const long labeled = label_importance(records, judge);

  CHECK(labeled == 3);  // alpha, beta, gamma; delta was pre-labeled
  CHECK(records[0].citations[0].important == true);
  CHECK(records[0].citations[1].important == false);  // scripted "False"
  CHECK(records[1].citations[0].important == true);
  CHECK(records[2].citations[0].important == false);
  CHECK(backend->call_count(task::kReferenceImportance) == 3);
}

TEST_CASE("ensure_nugget_sets freezes the sidecar on first build") {
  TempDir tmp("sb-harness-nuggets");
  const fs::path dataset_path = tmp.path / "tasks.jsonl";
  auto records = fixture_records();

  Judge first = make_judge(std::make_shared<ScriptedBackend>());
  auto sets = ensure_nugget_sets(dataset_path, records, first);
  REQUIRE(sets.size() == 3);
  CHECK(sets[0].exemplar_id == "2504.00001");
  CHECK(sets[0].nuggets.size() == 2);  // one nugget per exemplar sentence
  CHECK(sets[0].nuggets[0].second == true);
  CHECK(fs::exists(nugget_sidecar_path(dataset_path)));

  SUBCASE("a later judge with different verdicts cannot change frozen sets") {
    std::vector<MockRule> swapped = {
        {task::kNuggetExtract, "", "[\"Entirely different nugget.\"]", -1}};
    Judge second = make_judge(std::make_shared<ScriptedBackend>(swapped));
    auto again = ensure_nugget_sets(dataset_path, records, second);
    CHECK(again == sets);
  }

  SUBCASE("new tasks are appended without rebuilding existing sets") {
    PaperRecord extra;
    extra.arxiv_id = "2505.00009v1";
    extra.title = "Epsilon Extras";
    extra.abstract = "Extra abstract.";
    extra.categories = {"cs.IR"};
    extra.published = "2025-05-01";
    extra.related_work_clean = "Epsilon work is new.";
    auto more = records;
    more.push_back(extra);
    Judge second = make_judge(std::make_shared<ScriptedBackend>());
    auto again = ensure_nugget_sets(dataset_path, more, second);
    REQUIRE(again.size() == 4);
    CHECK(std::vector<NuggetSet>(again.begin(), again.begin() + 3) == sets);
    CHECK(again[3].exemplar_id == "2505.00009");
  }
}

TEST_CASE("evaluate scores the three-task fixture to hand-computed values") {
  TempDir reports("sb-harness-reports");
  write_fixture_reports(reports.path);
  const auto records = fixture_records();
  const auto nuggets = fixture_nuggets();
  auto backend = std::make_shared<ScriptedBackend>(fixture_rules());
  Judge judge = make_judge(backend);
  EvalConfig config;
  config.system_name = "fixture-system";
  config.window = 1;

  const ScoreCard card = evaluate(records, reports.path, config, nuggets, judge);

  REQUIRE(card.tasks.size() == 3);
  const TaskScores& a = card.tasks[0];
  const TaskScores& b = card.tasks[1];
  const TaskScores& c = card.tasks[2];

  // Task A: nugget 1/2, relevance (1+1)/4, RC 1/1, precision 1/2, coverage 1/2.
  CHECK(a.has_report);
  CHECK(a.org == OrgOutcome::WIN);  // scripted judge prefers the longer text
  CHECK(a.nugget_coverage == doctest::Approx(0.5));
  CHECK(a.relevance_rate == doctest::Approx(0.5));
  CHECK(a.reference_coverage == doctest::Approx(1.0));
  CHECK(a.citation_precision == doctest::Approx(0.5));
  CHECK(a.claim_coverage.at(1) == doctest::Approx(0.5));
  CHECK(a.stats.inline_citations == 2);
  CHECK(a.retrieved.sources ==
        std::vector<std::string>{"2101.00001", "2102.00002"});

  // Task B: scripted TIE; report supports nothing it cites.
  CHECK(b.org == OrgOutcome::TIE);
  CHECK(b.nugget_coverage == doctest::Approx(0.0));
  CHECK(b.relevance_rate == doctest::Approx(0.0));
  CHECK(b.reference_coverage == doctest::Approx(1.0));
  CHECK(b.citation_precision == doctest::Approx(0.0));
  CHECK(b.claim_coverage.at(1) == doctest::Approx(0.0));
  CHECK(b.retrieved.sources == std::vector<std::string>{"2103.00003"});

  // Task C: no report — skipped, not zero-filled.
  CHECK_FALSE(c.has_report);
  CHECK_FALSE(c.org.has_value());
  CHECK_FALSE(c.nugget_coverage.has_value());
  CHECK(c.notes == std::vector<std::string>{"no report"});

  // Aggregates: unweighted means over the two scored tasks; DI pools
  // {100,400,50} (median 100) against {100,400,50,250} (median 175).
  const AggregateScores& agg = card.aggregate;
  CHECK(agg.organization == doctest::Approx(0.75));  // 1 win + half a tie, over 2
  CHECK(agg.org_wins == 1);
  CHECK(agg.org_ties == 1);
  CHECK(agg.org_losses == 0);
  CHECK(agg.org_skipped == 1);
  CHECK(*agg.nugget_coverage == doctest::Approx(0.25));
  CHECK(*agg.relevance_rate == doctest::Approx(0.25));
  CHECK(*agg.reference_coverage == doctest::Approx(1.0));
  CHECK(*agg.citation_precision == doctest::Approx(0.25));
  CHECK(agg.claim_coverage.at(1).value() == doctest::Approx(0.25));
  CHECK(*agg.document_importance == doctest::Approx(100.0 / 175.0));

  CHECK(card.manifest.tasks == 3);
  CHECK(card.manifest.reports == 2);
  CHECK(card.manifest.missing_cells == 0);
  CHECK_FALSE(card.manifest.dataset_digest.empty());
  CHECK_FALSE(card.manifest.judge_cache_digest.empty());

  SUBCASE("warm cache rerun is deterministic and issues zero new judge calls") {
    const long before = backend->call_count();
    const ScoreCard again = evaluate(records, reports.path, config, nuggets, judge);
    CHECK(backend->call_count() == before);

    TempDir out1("sb-harness-out1");
    TempDir out2("sb-harness-out2");
    write_scorecard(card, out1.path);
    write_scorecard(again, out2.path);
    CHECK(read_file(out1.path / "per_task.csv") == read_file(out2.path / "per_task.csv"));
    CHECK(read_file(out1.path / "aggregate.csv") ==
          read_file(out2.path / "aggregate.csv"));
  }

  SUBCASE("scorecard round-trips through the output directory") {
    TempDir out("sb-harness-roundtrip");
    write_scorecard(card, out.path);
    CHECK(fs::exists(out.path / "per_task.csv"));
    CHECK(fs::exists(out.path / "aggregate.csv"));
    CHECK(fs::exists(out.path / "scorecard.md"));
    CHECK(fs::exists(out.path / "manifest.json"));
    CHECK(fs::exists(out.path / "audits" / "2504.00001.json"));

    const ScoreCard back = read_scorecard(out.path);
    CHECK(back.system == "fixture-system");
    REQUIRE(back.tasks.size() == 3);
    CHECK(back.tasks[0].org == OrgOutcome::WIN);
    CHECK(back.tasks[0].nugget_coverage == doctest::Approx(0.5));
    CHECK_FALSE(back.tasks[2].has_report);
    CHECK(back.aggregate.organization == doctest::Approx(0.75));
    CHECK(*back.aggregate.document_importance == doctest::Approx(100.0 / 175.0));
    CHECK(back.aggregate.claim_coverage.at(1).value() == doctest::Approx(0.25));
    CHECK(back.manifest.reports == 2);
    CHECK(back.manifest.window == 1);
    CHECK(back.mean_stats.inline_citations == doctest::Approx(1.5));
  }

  SUBCASE("markdown table carries the grouped metric columns") {
    TempDir out("sb-harness-md");
    write_scorecard(card, out.path);
    const std::string md = read_file(out.path / "scorecard.md");
    CHECK(md.find("| fixture-system | 0.750 | 0.250 | 0.250 | 1.000 | 0.571 | 0.250 | "
                  "0.250 |") != std::string::npos);
    CHECK(md.find("Knowledge Synthesis") != std::string::npos);
    CHECK(md.find("Verifiability") != std::string::npos);
  }
}

TEST_CASE("evaluate sweeps every window when asked and stays monotone") {
  TempDir reports("sb-harness-sweep");
  write_fixture_reports(reports.path);
  auto backend = std::make_shared<ScriptedBackend>(fixture_rules());
  Judge judge = make_judge(backend);
  EvalConfig config;
  config.window = 1;
  config.sweep_windows = true;

  const ScoreCard card =
      evaluate(fixture_records(), reports.path, config, fixture_nuggets(), judge);

  const auto& sweep = card.aggregate.claim_coverage;
  REQUIRE(sweep.size() == 6);
  double prev = -1.0;
  for (int w = 0; w <= 5; ++w) {
    REQUIRE(sweep.at(w).has_value());
    CHECK(*sweep.at(w) >= prev);
    prev = *sweep.at(w);
  }
}

TEST_CASE("evaluate isolates failures to the affected task") {
  TempDir reports("sb-harness-isolation");
  write_fixture_reports(reports.path);
  const auto records = fixture_records();
  const auto nuggets = fixture_nuggets();
  EvalConfig config;

  Judge clean_judge = make_judge(std::make_shared<ScriptedBackend>(fixture_rules()));
  const ScoreCard before = evaluate(records, reports.path, config, nuggets, clean_judge);

  // Clobber task B's report; task A's row must not move.
  write_file(reports.path / "2504.00002.md", "Garbage with no citations at all.\n");
  fs::remove(reports.path / "2504.00002.sources.jsonl");
  Judge judge = make_judge(std::make_shared<ScriptedBackend>(fixture_rules()));
  const ScoreCard after = evaluate(records, reports.path, config, nuggets, judge);

  const TaskScores& a0 = before.tasks[0];
  const TaskScores& a1 = after.tasks[0];
  CHECK(a1.org == a0.org);
  CHECK(a1.nugget_coverage == a0.nugget_coverage);
  CHECK(a1.relevance_rate == a0.relevance_rate);
  CHECK(a1.reference_coverage == a0.reference_coverage);
  CHECK(a1.citation_precision == a0.citation_precision);
  CHECK(a1.claim_coverage == a0.claim_coverage);

  const TaskScores& b1 = after.tasks[1];
  CHECK(b1.has_report);
  CHECK(b1.nugget_coverage == doctest::Approx(0.0));
  CHECK(b1.relevance_rate == doctest::Approx(0.0));   // empty source set scores 0
  CHECK(b1.reference_coverage == doctest::Approx(0.0));
  CHECK(b1.citation_precision == doctest::Approx(0.0));  // zero citations, flagged
}

TEST_CASE("evaluate counts missing cells instead of zero-filling") {
  TempDir reports("sb-harness-missing");
  write_fixture_reports(reports.path);
  auto nuggets = fixture_nuggets();
  nuggets.erase(nuggets.begin() + 1);  // drop task B's frozen set
  Judge judge = make_judge(std::make_shared<ScriptedBackend>(fixture_rules()));
  EvalConfig config;

  const ScoreCard card =
      evaluate(fixture_records(), reports.path, config, nuggets, judge);

  CHECK_FALSE(card.tasks[1].nugget_coverage.has_value());
  CHECK(card.manifest.missing_cells == 1);
  // The mean covers only task A's cell.
  CHECK(*card.aggregate.nugget_coverage == doctest::Approx(0.5));
  REQUIRE_FALSE(card.tasks[1].notes.empty());
  CHECK(card.tasks[1].notes[0] == "nugget_coverage: no frozen nugget set");
}

TEST_CASE("evaluate rejects empty report directories and bad windows") {
  TempDir reports("sb-harness-empty");
  Judge judge = make_judge(std::make_shared<ScriptedBackend>());

  CHECK_THROWS_WITH_AS(
      evaluate(fixture_records(), reports.path, {}, fixture_nuggets(), judge),
      doctest::Contains("NoReports"), Error);

  EvalConfig config;
  config.window = 6;
  CHECK_THROWS_WITH_AS(
      evaluate(fixture_records(), reports.path, config, fixture_nuggets(), judge),
      doctest::Contains("ConfigError"), Error);
}

TEST_CASE("human-exemplar mode scores the reference row") {
  TempDir reports("sb-harness-exemplar");  // intentionally empty: mode ignores it
  const auto records = fixture_records();
  Judge judge = make_judge(std::make_shared<ScriptedBackend>(
      std::vector<MockRule>{{task::kReferenceImportance, "Benchmark Construction",
                             "False", -1}}));
  EvalConfig config;
  config.system_name = "human-exemplar";
  config.mode = EvalMode::HumanExemplar;

  const ScoreCard card =
      evaluate(records, reports.path, config, fixture_nuggets(), judge);

  // Mirrored self-comparison is a tie on every task: exactly 0.500.
  CHECK(card.aggregate.organization == 0.5);
  CHECK(card.aggregate.org_ties == 3);
  // The exemplar trivially contains its own nuggets and important references.
  CHECK(*card.aggregate.nugget_coverage == doctest::Approx(1.0));
  CHECK(*card.aggregate.reference_coverage == doctest::Approx(1.0));
  // Identical pools: clamped median ratio is exactly 1.
  CHECK(*card.aggregate.document_importance == doctest::Approx(1.0));
  for (const auto& row : card.tasks) CHECK(row.has_report);
}

TEST_CASE("emit_plot_data writes radar, sweep, breakdown, and histogram tables") {
  TempDir reports("sb-harness-plot-reports");
  write_fixture_reports(reports.path);
  auto records = fixture_records();
  Judge judge = make_judge(std::make_shared<ScriptedBackend>(fixture_rules()));
  EvalConfig config;
  config.system_name = "fixture-system";
  config.sweep_windows = true;

  const ScoreCard card =
      evaluate(records, reports.path, config, fixture_nuggets(), judge);
  label_importance(records, judge);  // plot tables need labeled citations

  TempDir out("sb-harness-plot");
  emit_plot_data({card}, records, out.path);

  const auto radar_lines = split(read_file(out.path / "radar.csv"), '\n');
  REQUIRE(radar_lines.size() >= 8);  // header + exactly seven axes
  CHECK(radar_lines[0] == "system,metric,value");
  CHECK(radar_lines[1] == "fixture-system,organization,0.750000");
  CHECK(radar_lines[5] == "fixture-system,document_importance,0.571429");
  CHECK(radar_lines[7] == "fixture-system,claim_coverage,0.250000");
  CHECK(radar_lines.size() == 9);  // trailing newline

  const auto sweep_lines = split(read_file(out.path / "window_sweep.csv"), '\n');
  CHECK(sweep_lines[0] == "system,window,claim_coverage");
  CHECK(sweep_lines.size() == 8);  // header + 6 windows + trailing newline

  const std::string breakdown = read_file(out.path / "citations_breakdown.csv");
  CHECK(breakdown.find("2504.00001,1,0,1\n") != std::string::npos);
  CHECK(breakdown.find("2504.00002,1,0,0\n") != std::string::npos);
  CHECK(breakdown.find("2504.00003,1,0,0\n") != std::string::npos);

  // Pooled counts {100,400,50,250}: log10(1+c) lands one hit in [1.5,2.0),
  // two in [2.0,2.5), one in [2.5,3.0) — same for the all/arxiv subsets here.
  const auto histo_lines = split(read_file(out.path / "citation_histogram.csv"), '\n');
  CHECK(histo_lines[0] == "subset,bin_lo,bin_hi,count");
  CHECK(histo_lines[4] == "all,1.500,2.000,1");
  CHECK(histo_lines[5] == "all,2.000,2.500,2");
  CHECK(histo_lines[6] == "all,2.500,3.000,1");
  CHECK(histo_lines[10] == "arxiv,1.500,2.000,1");
  CHECK(histo_lines[11] == "arxiv,2.000,2.500,2");
  CHECK(histo_lines[12] == "arxiv,2.500,3.000,1");
}
