// synthbench: build the benchmark dataset, run the reference pipeline, and
// score systems. `synthbench <verb> --help` documents each verb.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <memory>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "synthbench/harness.hpp"
#include "synthbench/harvest.hpp"
#include "synthbench/mock_judge.hpp"
#include "synthbench/openalex.hpp"
#include "synthbench/pipeline.hpp"

using namespace synthbench;

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string env_or(const char* name, const std::string& fallback = "") {
  const char* value = std::getenv(name);
  return value && *value ? value : fallback;
}

/// Flags shared by every judge-consuming verb.
struct JudgeFlags {
  std::string backend = "mock";
  std::string mock_rules;
  std::string cache_dir;
  int max_parallel = 8;

  void attach(CLI::App& cmd) {
    cmd.add_option("--judge-backend", backend, "Judge backend")
        ->check(CLI::IsMember({"http", "mock"}))
        ->capture_default_str();
    cmd.add_option("--mock-rules", mock_rules,
                   "JSONL rule file overriding scripted-judge answers");
    cmd.add_option("--cache-dir", cache_dir,
                   "Directory for judge/search caches (reruns become free)");
    cmd.add_option("--max-parallel", max_parallel, "Concurrent judge calls")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }

  std::shared_ptr<JudgeBackend> make_backend() const {
    if (backend == "mock") {
      std::vector<MockRule> rules;
      if (!mock_rules.empty()) rules = ScriptedBackend::load_rules(mock_rules);
      return std::make_shared<ScriptedBackend>(std::move(rules));
    }
    HttpJudgeOptions options;
    options.api_key = env_or("SYNTHBENCH_JUDGE_API_KEY", env_or("OPENAI_API_KEY"));
    options.base_url = env_or("SYNTHBENCH_JUDGE_BASE_URL", options.base_url);
    if (options.api_key.empty())
      throw Error("ConfigError",
                  "http judge backend needs SYNTHBENCH_JUDGE_API_KEY (or OPENAI_API_KEY)");
    return std::make_shared<HttpJudgeBackend>(std::make_shared<HttplibTransport>(),
                                              std::move(options));
  }

  std::shared_ptr<DiskKv> make_cache(const char* file) const {
    if (cache_dir.empty()) return std::make_shared<DiskKv>();
    fs::create_directories(cache_dir);
    return std::make_shared<DiskKv>(fs::path(cache_dir) / file);
  }

  Judge make_judge(JudgeConfig config) const {
    config.max_parallel = static_cast<size_t>(max_parallel);
    return Judge(make_backend(), std::move(config), make_cache("judge.jsonl"),
                 std::make_shared<RunLog>());
  }
};

JudgeConfig judge_config_from(const KeyValueConfig& cfg) {
  JudgeConfig jc;
  jc.general_model = cfg.get_or("general_model", jc.general_model);
  jc.nugget_model = cfg.get_or("nugget_model", jc.nugget_model);
  jc.max_retries = static_cast<int>(cfg.get_int("max_retries").value_or(jc.max_retries));
  jc.graded_relevance = cfg.get_bool("graded_relevance").value_or(jc.graded_relevance);
  return jc;
}

std::string digest_file(const fs::path& path) { return sha256_hex(read_file(path)); }

// ---------------------------------------------------------------------------
// harvest
// ---------------------------------------------------------------------------

int run_harvest(const std::string& config_path) {
  const HarvestConfig config = load_harvest_config(KeyValueConfig::load(config_path));

  auto blob_cache = std::make_shared<BlobCache>(
      config.cache_dir.empty() ? fs::path{} : fs::path(config.cache_dir) / "http");
  auto transport = std::make_shared<CachedTransport>(
      std::make_shared<HttplibTransport>(), blob_cache,
      std::chrono::milliseconds(3100));  // arxiv.org asks for one call per 3s
  auto graph_cache =
      config.cache_dir.empty()
          ? std::make_shared<DiskKv>()
          : std::make_shared<DiskKv>(fs::path(config.cache_dir) / "openalex.jsonl");

  auto source = std::make_shared<ArxivPaperSource>(transport);
  auto graph = std::make_shared<OpenAlexClient>(transport, config.contact_email,
                                                graph_cache);

  Harvester harvester(config, source, graph);
  const HarvestResult result = harvester.run();

  std::cout << "dataset: " << config.output_path << "\n"
            << "records: " << result.records.size() << "\n"
            << "skipped: " << result.skipped.size() << "\n"
            << "citations: " << result.citation_total << " (" << result.citation_arxiv
            << " ArXiv-resolved)\n";
  for (const auto& reason : result.skipped) spdlog::debug("skipped {}", reason);
  return 0;
}

// ---------------------------------------------------------------------------
// synthesize
// ---------------------------------------------------------------------------

std::unique_ptr<SearchProvider> make_provider(const PipelineConfig& cfg,
                                              const PaperRecord& task,
                                              const std::shared_ptr<DiskKv>& cache) {
  const std::string& name = cfg.provider;
  std::shared_ptr<SearchProvider> base;
  if (name == "arxiv") {
    base = std::make_shared<ArxivSearchProvider>(std::make_shared<HttplibTransport>());
  } else if (name == "tavily") {
    const std::string key = env_or("TAVILY_API_KEY");
    if (key.empty()) throw Error("ConfigError", "tavily provider needs TAVILY_API_KEY");
    base = std::make_shared<TavilyProvider>(std::make_shared<HttplibTransport>(), key);
  } else if (name == "parallel") {
    const std::string key = env_or("PARALLEL_API_KEY");
    if (key.empty())
      throw Error("ConfigError", "parallel provider needs PARALLEL_API_KEY");
    base = std::make_shared<ParallelProvider>(std::make_shared<HttplibTransport>(), key);
  } else if (name == "oracle") {
    // Task-specific by construction; caching would leak results across tasks.
    return std::make_unique<OracleProvider>(task);
  } else if (name.rfind("fixture:", 0) == 0) {
    return std::make_unique<FixtureProvider>(FixtureProvider::from_file(name.substr(8)));
  } else {
    throw Error("ConfigError", "unknown search provider: " + name);
  }
  return std::make_unique<CachedSearchProvider>(std::move(base), cache);
}

int run_synthesize(const std::string& dataset_path, const std::string& config_path,
                   const std::string& out_dir, const JudgeFlags& flags) {
  const auto records = read_dataset(dataset_path);
  const KeyValueConfig raw = KeyValueConfig::load(config_path);
  const PipelineConfig cfg = load_pipeline_config(raw);
  Judge judge = flags.make_judge(judge_config_from(raw));
  const auto search_cache =
      flags.cache_dir.empty()
          ? std::make_shared<DiskKv>()
          : std::make_shared<DiskKv>(fs::path(flags.cache_dir) / "search.jsonl");

  fs::create_directories(out_dir);
  ordered_json manifest;
  manifest["dataset_digest"] = digest_file(dataset_path);
  manifest["config_digest"] = digest_file(config_path);
  manifest["provider"] = cfg.provider;
  manifest["generator_model"] = cfg.generator_model;
  manifest["operator_model"] = cfg.operator_model;
  manifest["judge_backend"] = flags.backend;
  manifest["tasks"] = ordered_json::array();

  long succeeded = 0;
  for (const auto& task : records) {
    auto provider = make_provider(cfg, task, search_cache);
    const TaskRun run = run_pipeline(task, cfg, judge, *provider);

    ordered_json entry;
    entry["task_id"] = run.task_id;
    entry["queries"] = run.queries;
    entry["candidates_seen"] = run.candidates_seen;
    entry["final_docs"] = run.final_docs.size();
    if (run.failed) {
      entry["status"] = "failed";
      entry["failure"] = run.failure;
      spdlog::warn("task {} failed: {}", run.task_id, run.failure);
    } else {
      const auto leaks = leakage_violations(run.final_docs, task.published_date());
      if (!leaks.empty()) {
        entry["status"] = "failed";
        entry["failure"] = "leakage: " + leaks.front();
        spdlog::error("task {} leaked {} post-cutoff sources; report withheld",
                      run.task_id, leaks.size());
      } else {
        entry["status"] = "ok";
        write_file(fs::path(out_dir) / (run.task_id + ".md"), run.report_text);
        write_candidate_docs(fs::path(out_dir) / (run.task_id + ".sources.jsonl"),
                             run.final_docs);
        ++succeeded;
      }
    }
    manifest["tasks"].push_back(std::move(entry));
    std::cout << run.task_id << ": " << (run.failed ? "failed" : "ok") << "\n";
  }
  manifest["succeeded"] = succeeded;
  manifest["judge_flags"] = judge.log().flag_count();
  write_file(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
  std::cout << succeeded << "/" << records.size() << " reports written to " << out_dir
            << "\n";
  return succeeded > 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

int run_evaluate(const std::string& dataset_path, const std::string& reports_dir,
                 const std::string& out_dir, const std::string& config_path,
                 const std::string& system, const std::string& mode, int window,
                 bool sweep, bool live_counts, const JudgeFlags& flags) {
  const auto records = read_dataset(dataset_path);
  KeyValueConfig raw;
  if (!config_path.empty()) raw = KeyValueConfig::load(config_path);
  Judge judge = flags.make_judge(judge_config_from(raw));

  EvalConfig config;
  config.mode = mode == "human-exemplar" ? EvalMode::HumanExemplar : EvalMode::System;
  config.window = window;
  config.sweep_windows = sweep || raw.get_bool("sweep_windows").value_or(false);
  if (config.mode == EvalMode::System && reports_dir.empty())
    throw Error("ConfigError", "--reports is required in system mode");
  if (!system.empty()) {
    config.system_name = system;
  } else if (config.mode == EvalMode::System) {
    fs::path dir = fs::path(reports_dir).lexically_normal();
    if (dir.filename().empty()) dir = dir.parent_path();  // tolerate trailing '/'
    config.system_name = dir.filename().string();
  } else {
    config.system_name = mode;
  }

  std::shared_ptr<OpenAlexClient> graph;  // owns lifetime beyond the lambda
  if (live_counts) {
    graph = std::make_shared<OpenAlexClient>(
        std::make_shared<CachedTransport>(std::make_shared<HttplibTransport>(),
                                          std::make_shared<BlobCache>()),
        env_or("SYNTHBENCH_CONTACT_EMAIL"), flags.make_cache("openalex.jsonl"));
    config.count_fn = [graph](const std::string& id) -> std::optional<double> {
      if (auto count = graph->fetch_citation_count(id)) return static_cast<double>(*count);
      return std::nullopt;
    };
  }

  const auto nuggets = ensure_nugget_sets(dataset_path, records, judge);
  const ScoreCard card = evaluate(records, reports_dir, config, nuggets, judge);
  write_scorecard(card, out_dir);

  std::cout << read_file(fs::path(out_dir) / "scorecard.md");
  return 0;
}

// ---------------------------------------------------------------------------
// agreement / plot-data
// ---------------------------------------------------------------------------

int run_agreement(const std::string& file_a, const std::string& file_b) {
  const double score = agreement(read_labels(file_a), read_labels(file_b));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f\n", score);
  std::cout << buf;
  return 0;
}

int run_plot_data(const std::vector<std::string>& score_dirs,
                  const std::string& dataset_path, const std::string& out_dir,
                  const JudgeFlags& flags) {
  std::vector<ScoreCard> cards;
  for (const auto& dir : score_dirs) cards.push_back(read_scorecard(dir));

  std::vector<PaperRecord> records;
  if (!dataset_path.empty()) {
    records = read_dataset(dataset_path);
    Judge judge = flags.make_judge({});
    label_importance(records, judge);  // cached: free after an evaluate run
  }
  emit_plot_data(cards, records, out_dir);
  std::cout << "plot data written to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::info);
  CLI::App app{"Benchmark harness for generative research synthesis"};
  app.require_subcommand(1);

  // harvest
  auto* harvest = app.add_subcommand("harvest", "Build the task dataset from ArXiv");
  std::string harvest_config;
  harvest->add_option("--config", harvest_config, "Key/value harvest settings")
      ->required()
      ->check(CLI::ExistingFile);

  // synthesize
  auto* synth = app.add_subcommand("synthesize", "Run the reference pipeline");
  std::string synth_dataset, synth_config, synth_out;
  JudgeFlags synth_flags;
  synth->add_option("--dataset", synth_dataset, "Task dataset (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  synth->add_option("--config", synth_config, "Key/value pipeline settings")
      ->required()
      ->check(CLI::ExistingFile);
  synth->add_option("--out", synth_out, "Output directory for reports")->required();
  synth_flags.attach(*synth);

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Score reports with all seven metrics");
  std::string eval_dataset, eval_reports, eval_out, eval_config, eval_system;
  std::string eval_mode = "system";
  int eval_window = 1;
  bool eval_sweep = false, eval_live_counts = false;
  JudgeFlags eval_flags;
  eval->add_option("--dataset", eval_dataset, "Task dataset (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--reports", eval_reports, "Directory of <task_id>.md reports");
  eval->add_option("--out", eval_out, "Output directory for the scorecard")->required();
  eval->add_option("--config", eval_config, "Key/value judge settings")
      ->check(CLI::ExistingFile);
  eval->add_option("--system", eval_system, "System name (default: reports dir name)");
  eval->add_option("--mode", eval_mode, "What to score")
      ->check(CLI::IsMember({"system", "human-exemplar"}))
      ->capture_default_str();
  eval->add_option("--window", eval_window, "Claim-coverage window")
      ->check(CLI::Range(0, 5))
      ->capture_default_str();
  eval->add_flag("--sweep", eval_sweep, "Also score every window in 0..5");
  eval->add_flag("--live-counts", eval_live_counts,
                 "Resolve unknown citation counts via the scholarly graph");
  eval_flags.attach(*eval);

  // agreement
  auto* agree = app.add_subcommand("agreement", "Fraction of identical aligned labels");
  std::string labels_a, labels_b;
  agree->add_option("labels_a", labels_a, "First label file (one label per line)")
      ->required()
      ->check(CLI::ExistingFile);
  agree->add_option("labels_b", labels_b, "Second label file")
      ->required()
      ->check(CLI::ExistingFile);

  // plot-data
  auto* plot = app.add_subcommand("plot-data", "Emit CSV tables for figures");
  std::vector<std::string> plot_scores;
  std::string plot_dataset, plot_out;
  JudgeFlags plot_flags;
  plot->add_option("--scores", plot_scores, "Scorecard directories (from evaluate)")
      ->required()
      ->check(CLI::ExistingDirectory);
  plot->add_option("--dataset", plot_dataset,
                   "Dataset for citation breakdown/histogram tables")
      ->check(CLI::ExistingFile);
  plot->add_option("--out", plot_out, "Output directory")->required();
  plot_flags.attach(*plot);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*harvest) return run_harvest(harvest_config);
    if (*synth) return run_synthesize(synth_dataset, synth_config, synth_out, synth_flags);
    if (*eval)
      return run_evaluate(eval_dataset, eval_reports, eval_out, eval_config, eval_system,
                          eval_mode, eval_window, eval_sweep, eval_live_counts,
                          eval_flags);
    if (*agree) return run_agreement(labels_a, labels_b);
    if (*plot) return run_plot_data(plot_scores, plot_dataset, plot_out, plot_flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
