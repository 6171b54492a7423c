#include "synthbench/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <set>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "synthbench/arxiv_id.hpp"
#include "synthbench/pipeline.hpp"
#include "synthbench/util.hpp"

namespace synthbench {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string iso_utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string fmt3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt6(*v) : std::string(); }
std::string fmt3_opt(const std::optional<double>& v) { return v ? fmt3(*v) : std::string("—"); }

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

std::string org_str(OrgOutcome o) {
  switch (o) {
    case OrgOutcome::WIN: return "WIN";
    case OrgOutcome::LOSS: return "LOSS";
    case OrgOutcome::TIE: break;
  }
  return "TIE";
}

std::optional<OrgOutcome> org_from(const std::string& s) {
  if (s == "WIN") return OrgOutcome::WIN;
  if (s == "LOSS") return OrgOutcome::LOSS;
  if (s == "TIE") return OrgOutcome::TIE;
  return std::nullopt;
}

std::optional<double> mean_of(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += sep;
    out += p;
  }
  return out;
}

std::optional<double> cell_from(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

}  // namespace

long label_importance(std::vector<PaperRecord>& records, Judge& judge) {
  struct Slot {
    size_t record;
    size_t citation;
  };
  std::vector<Slot> todo;
  for (size_t r = 0; r < records.size(); ++r)
    for (size_t c = 0; c < records[r].citations.size(); ++c)
      if (!records[r].citations[c].important) todo.push_back({r, c});

  parallel_for(todo.size(), judge.config().max_parallel, [&](size_t i) {
    PaperRecord& rec = records[todo[i].record];
    CitationRecord& cite = rec.citations[todo[i].citation];
    const std::string authors = join(cite.authors, ", ");
    const std::string content =
        cite.abstract && !cite.abstract->empty() ? *cite.abstract : cite.title;
    cite.important = judge.reference_is_important(rec.title, rec.abstract,
                                                  rec.related_work_clean, cite.title,
                                                  authors, content);
  });
  return static_cast<long>(todo.size());
}

std::vector<NuggetSet> ensure_nugget_sets(const fs::path& dataset_path,
                                          const std::vector<PaperRecord>& records,
                                          Judge& judge) {
  const fs::path sidecar = nugget_sidecar_path(dataset_path);
  std::map<std::string, NuggetSet> by_id;
  if (fs::exists(sidecar))
    for (auto& set : read_nugget_sets(sidecar)) by_id.emplace(set.exemplar_id, std::move(set));

  bool added = false;
  for (const auto& rec : records) {
    if (by_id.count(rec.task_id())) continue;
    try {
      by_id.emplace(rec.task_id(), build_nugget_set(rec, judge));
      added = true;
    } catch (const Error& e) {
      judge.log().flag(task::kNuggetExtract, e.what());
      spdlog::warn("nugget set for {} not built: {}", rec.task_id(), e.what());
    }
  }

  std::vector<NuggetSet> out;
  std::set<std::string> emitted;
  for (const auto& rec : records) {
    auto it = by_id.find(rec.task_id());
    if (it == by_id.end()) continue;
    out.push_back(it->second);
    emitted.insert(it->first);
  }
  if (added) {
    // Keep frozen sets for tasks outside this dataset slice intact.
    std::vector<NuggetSet> all = out;
    for (const auto& [id, set] : by_id)
      if (!emitted.count(id)) all.push_back(set);
    write_nugget_sets(sidecar, all);
  }
  return out;
}

ScoreCard evaluate(const std::vector<PaperRecord>& dataset, const fs::path& reports_dir,
                   const EvalConfig& config, const std::vector<NuggetSet>& nuggets,
                   Judge& judge) {
  if (config.window < 0 || config.window > 5)
    throw Error("ConfigError", "claim-coverage window must be in 0..5");

  ScoreCard card;
  card.system = config.system_name;
  RunManifest& man = card.manifest;
  man.system_name = config.system_name;
  man.started_at = iso_utc_now();
  man.mode = config.mode == EvalMode::System ? "system" : "human-exemplar";
  man.window = config.window;
  man.general_model = judge.config().general_model;
  man.nugget_model = judge.config().nugget_model;
  man.tasks = static_cast<long>(dataset.size());
  {
    std::string blob;
    for (const auto& rec : dataset) {
      blob += to_json_line(rec);
      blob += '\n';
    }
    man.dataset_digest = sha256_hex(blob);
  }
  man.config_digest =
      sha256_hex(config.system_name + '\x1f' + man.mode + '\x1f' +
                 std::to_string(config.window) + '\x1f' +
                 (config.sweep_windows ? "sweep" : "headline"));

  std::vector<PaperRecord> records = dataset;
  label_importance(records, judge);

  std::map<std::string, std::string> reports_by_task;
  for (const auto& rec : records) {
    if (config.mode == EvalMode::HumanExemplar) {
      reports_by_task[rec.task_id()] = rec.related_work_clean;
    } else {
      const fs::path path = reports_dir / (rec.task_id() + ".md");
      if (fs::exists(path)) reports_by_task[rec.task_id()] = read_file(path);
    }
  }
  if (reports_by_task.empty())
    throw Error("NoReports", "no report for any task under " + reports_dir.string());
  man.reports = static_cast<long>(reports_by_task.size());

  // Dataset-wide lookups: citation metadata and citation counts.
  std::map<std::string, std::pair<std::string, std::string>> meta_by_id;
  std::map<std::string, double> count_by_id;
  for (const auto& rec : records)
    for (const auto& c : rec.citations) {
      if (!c.arxiv_id) continue;
      meta_by_id.emplace(*c.arxiv_id, std::make_pair(c.title, c.abstract.value_or("")));
      if (c.citation_count)
        count_by_id.emplace(*c.arxiv_id, static_cast<double>(*c.citation_count));
    }
  CountFn count_fn = config.count_fn;
  if (!count_fn)
    count_fn = [&count_by_id](const std::string& id) -> std::optional<double> {
      auto it = count_by_id.find(id);
      if (it == count_by_id.end()) return std::nullopt;
      return it->second;
    };

  const OrgResult org = organization_score(reports_by_task, records, judge);
  std::map<std::string, OrgOutcome> org_by_task(org.per_report.begin(), org.per_report.end());
  card.aggregate.organization = org.win_rate;
  card.aggregate.org_wins = org.wins;
  card.aggregate.org_ties = org.ties;
  card.aggregate.org_losses = org.losses;
  card.aggregate.org_skipped = org.skipped;

  std::map<std::string, const NuggetSet*> nuggets_by_task;
  for (const auto& set : nuggets) nuggets_by_task[set.exemplar_id] = &set;

  const EntailmentFn any_fn = any_claim_entailment(judge);
  const EntailmentFn all_fn = all_claims_entailment(judge);
  const size_t par = judge.config().max_parallel;

  // Task-level parallelism into per-task slots; aggregation below is the
  // single writer.
  std::vector<TaskScores> rows(records.size());
  parallel_for(records.size(), par, [&](size_t i) {
    const PaperRecord& rec = records[i];
    TaskScores& row = rows[i];
    row.task_id = rec.task_id();
    const auto found = reports_by_task.find(row.task_id);
    if (found == reports_by_task.end()) {
      row.notes.push_back("no report");
      return;
    }
    row.has_report = true;
    if (auto oit = org_by_task.find(row.task_id); oit != org_by_task.end())
      row.org = oit->second;

    Report report = parse_report(found->second);
    row.stats = report_stats(report);

    SnippetMap snippets;
    std::vector<std::string> source_ids;
    std::map<std::string, std::pair<std::string, std::string>> doc_meta;
    std::set<std::string> seen_ids;

    if (config.mode == EvalMode::HumanExemplar) {
      attach_exemplar_citations(report, rec, snippets);
      for (const auto& c : rec.citations)
        if (c.arxiv_id && seen_ids.insert(*c.arxiv_id).second)
          source_ids.push_back(*c.arxiv_id);
    } else {
      const fs::path sources_path = reports_dir / (row.task_id + ".sources.jsonl");
      if (fs::exists(sources_path)) {
        const auto docs = read_candidate_docs(sources_path);
        snippets = snippet_map_for(docs);
        for (const auto& doc : docs) {
          if (!doc.arxiv_id) continue;
          const std::string id = normalize_arxiv_id(*doc.arxiv_id);
          if (seen_ids.insert(id).second) source_ids.push_back(id);
          doc_meta.emplace(id, std::make_pair(doc.title, doc.snippet));
        }
      } else {
        // External report with no sources sidecar: fall back to the ids the
        // text itself exposes, with dataset metadata as the snippet store.
        source_ids = report.references;
        for (const auto& [marker, target] : report.marker_refs) {
          auto mit = meta_by_id.find(target);
          if (mit == meta_by_id.end()) continue;
          std::string snippet = mit->second.first;
          if (!mit->second.second.empty()) snippet += "\n" + mit->second.second;
          snippets.emplace(target, std::move(snippet));
        }
      }
    }

    const MetadataFn metadata =
        [&doc_meta, &meta_by_id](const std::string& id)
        -> std::optional<std::pair<std::string, std::string>> {
      if (auto it = doc_meta.find(id); it != doc_meta.end()) return it->second;
      if (auto it = meta_by_id.find(id); it != meta_by_id.end()) return it->second;
      return std::nullopt;
    };

    if (auto nit = nuggets_by_task.find(row.task_id); nit != nuggets_by_task.end()) {
      try {
        row.nugget_coverage = nugget_coverage(found->second, *nit->second, judge).strict_all;
      } catch (const Error& e) {
        row.notes.push_back(std::string("nugget_coverage: ") + e.what());
      }
    } else {
      row.notes.push_back("nugget_coverage: no frozen nugget set");
    }

    try {
      row.retrieved = grade_retrieved_set(rec, source_ids, metadata, judge);
      row.relevance_rate = relevance_rate(row.retrieved);
      const ExemplarKeySet keys = exemplar_key_set(rec);
      if (auto rc = reference_coverage(row.retrieved, keys); rc.has_value())
        row.reference_coverage = *rc;
      else
        row.notes.push_back("reference_coverage: no important references; excluded");
    } catch (const Error& e) {
      row.notes.push_back(std::string("retrieval: ") + e.what());
    }

    try {
      PrecisionResult pr = citation_precision(report, snippets, any_fn, &judge.log(), par);
      row.citation_precision = pr.score;
      row.citation_audit = std::move(pr.audit);
    } catch (const Error& e) {
      row.notes.push_back(std::string("citation_precision: ") + e.what());
    }

    const std::string ctx = task_topic(rec);
    try {
      CoverageResult cr = claim_coverage(report, snippets, ctx, config.window, all_fn, par);
      row.claim_coverage[config.window] = cr.score;
      row.sentence_audit = std::move(cr.audit);
      if (config.sweep_windows)
        for (const auto& [w, score] : claim_coverage_sweep(report, snippets, ctx, 0, 5, all_fn, par))
          row.claim_coverage[w] = score;
    } catch (const Error& e) {
      row.notes.push_back(std::string("claim_coverage: ") + e.what());
    }
  });
  card.tasks = std::move(rows);

  // Aggregation: unweighted means over scored cells.
  std::vector<double> ng, rr, rc, cp;
  std::map<int, std::vector<double>> cc;
  MeanStats stats{};
  long n_reports = 0;
  for (const auto& row : card.tasks) {
    if (!row.has_report) continue;
    ++n_reports;
    stats.chars += static_cast<double>(row.stats.chars);
    stats.words += static_cast<double>(row.stats.words);
    stats.sentences += static_cast<double>(row.stats.sentences);
    stats.unique_refs += static_cast<double>(row.stats.unique_refs);
    stats.inline_citations += static_cast<double>(row.stats.inline_citations);
    if (row.nugget_coverage) ng.push_back(*row.nugget_coverage); else ++man.missing_cells;
    if (row.relevance_rate) rr.push_back(*row.relevance_rate); else ++man.missing_cells;
    if (row.reference_coverage) rc.push_back(*row.reference_coverage); else ++man.missing_cells;
    if (row.citation_precision) cp.push_back(*row.citation_precision); else ++man.missing_cells;
    if (!row.claim_coverage.count(config.window)) ++man.missing_cells;
    for (const auto& [w, v] : row.claim_coverage) cc[w].push_back(v);
  }
  if (n_reports > 0) {
    stats.chars /= n_reports;
    stats.words /= n_reports;
    stats.sentences /= n_reports;
    stats.unique_refs /= n_reports;
    stats.inline_citations /= n_reports;
    card.mean_stats = stats;
  }
  card.aggregate.nugget_coverage = mean_of(ng);
  card.aggregate.relevance_rate = mean_of(rr);
  card.aggregate.reference_coverage = mean_of(rc);
  card.aggregate.citation_precision = mean_of(cp);
  for (const auto& [w, values] : cc) card.aggregate.claim_coverage[w] = mean_of(values);
  if (!card.aggregate.claim_coverage.count(config.window))
    card.aggregate.claim_coverage[config.window] = std::nullopt;

  // Document importance: pooled medians, never a mean of per-task ratios.
  std::vector<double> system_pool, exemplar_pool;
  for (const auto& rec : records) {
    const ExemplarKeySet keys = exemplar_key_set(rec);
    exemplar_pool.insert(exemplar_pool.end(), keys.exemplar_cite_counts.begin(),
                         keys.exemplar_cite_counts.end());
  }
  for (const auto& row : card.tasks) {
    if (!row.has_report) continue;
    for (const auto& id : row.retrieved.sources)
      if (auto count = count_fn(id)) system_pool.push_back(*count);
  }
  try {
    card.aggregate.document_importance = document_importance(system_pool, exemplar_pool);
  } catch (const Error& e) {
    card.aggregate.notes.push_back(std::string("document_importance: ") + e.what());
    ++man.missing_cells;
  }

  man.judge_flags = judge.log().flag_count();
  {
    std::string blob;
    for (const auto& key : judge.cache().keys()) {
      blob += key;
      blob += '\n';
    }
    man.judge_cache_digest = sha256_hex(blob);
  }
  man.finished_at = iso_utc_now();
  return card;
}

void write_scorecard(const ScoreCard& card, const fs::path& out_dir) {
  fs::create_directories(out_dir / "audits");

  std::set<int> windows;
  for (const auto& row : card.tasks)
    for (const auto& [w, v] : row.claim_coverage) windows.insert(w);
  for (const auto& [w, v] : card.aggregate.claim_coverage) windows.insert(w);
  if (windows.empty()) windows.insert(card.manifest.window);

  // ---- per_task.csv
  std::string csv =
      "task_id,has_report,org,nugget_coverage,relevance_rate,reference_coverage,"
      "citation_precision";
  for (int w : windows) csv += ",claim_coverage_w" + std::to_string(w);
  csv += ",chars,words,sentences,unique_refs,inline_citations,notes\n";
  for (const auto& row : card.tasks) {
    csv += csv_quote(row.task_id);
    csv += row.has_report ? ",1," : ",0,";
    csv += row.org ? org_str(*row.org) : "";
    csv += ',' + fmt_opt(row.nugget_coverage);
    csv += ',' + fmt_opt(row.relevance_rate);
    csv += ',' + fmt_opt(row.reference_coverage);
    csv += ',' + fmt_opt(row.citation_precision);
    for (int w : windows) {
      csv += ',';
      if (auto it = row.claim_coverage.find(w); it != row.claim_coverage.end())
        csv += fmt6(it->second);
    }
    csv += ',' + std::to_string(row.stats.chars);
    csv += ',' + std::to_string(row.stats.words);
    csv += ',' + std::to_string(row.stats.sentences);
    csv += ',' + std::to_string(row.stats.unique_refs);
    csv += ',' + std::to_string(row.stats.inline_citations);
    csv += ',' + csv_quote(join(row.notes, "; "));
    csv += '\n';
  }
  write_file(out_dir / "per_task.csv", csv);

  // ---- aggregate.csv
  std::string agg = "metric,value\n";
  agg += "organization," + fmt6(card.aggregate.organization) + '\n';
  agg += "nugget_coverage," + fmt_opt(card.aggregate.nugget_coverage) + '\n';
  agg += "relevance_rate," + fmt_opt(card.aggregate.relevance_rate) + '\n';
  agg += "reference_coverage," + fmt_opt(card.aggregate.reference_coverage) + '\n';
  agg += "document_importance," + fmt_opt(card.aggregate.document_importance) + '\n';
  agg += "citation_precision," + fmt_opt(card.aggregate.citation_precision) + '\n';
  for (const auto& [w, v] : card.aggregate.claim_coverage)
    agg += "claim_coverage_w" + std::to_string(w) + ',' + fmt_opt(v) + '\n';
  write_file(out_dir / "aggregate.csv", agg);

  // ---- scorecard.md
  const auto& a = card.aggregate;
  const int hw = card.manifest.window;
  std::optional<double> headline_cc;
  if (auto it = a.claim_coverage.find(hw); it != a.claim_coverage.end()) headline_cc = it->second;
  std::string md = "# Score Card — " + card.system + "\n\n";
  md += "Groups: Knowledge Synthesis (Organization, Nugget Coverage) · Retrieval Quality "
        "(Relevance Rate, Reference Coverage, Document Importance) · Verifiability "
        "(Citation Precision, Claim Coverage).\n\n";
  md += "| System | Org. | Nugget Cov. | Rel. Rate | Ref. Cov. | Doc. Imp. | Cit. Prec. | "
        "Claim Cov. (w=" + std::to_string(hw) + ") |\n";
  md += "| --- | --- | --- | --- | --- | --- | --- | --- |\n";
  md += "| " + card.system + " | " + fmt3(a.organization) + " | " +
        fmt3_opt(a.nugget_coverage) + " | " + fmt3_opt(a.relevance_rate) + " | " +
        fmt3_opt(a.reference_coverage) + " | " + fmt3_opt(a.document_importance) + " | " +
        fmt3_opt(a.citation_precision) + " | " + fmt3_opt(headline_cc) + " |\n\n";
  md += "Organization tally: " + std::to_string(a.org_wins) + " wins, " +
        std::to_string(a.org_ties) + " ties, " + std::to_string(a.org_losses) +
        " losses, " + std::to_string(a.org_skipped) + " skipped.\n\n";
  const auto& ms = card.mean_stats;
  char stats_line[256];
  std::snprintf(stats_line, sizeof stats_line,
                "Report statistics (means over %ld reports): %.1f chars, %.1f words, %.1f "
                "sentences, %.1f unique refs, %.1f inline citations.\n\n",
                card.manifest.reports, ms.chars, ms.words, ms.sentences, ms.unique_refs,
                ms.inline_citations);
  md += stats_line;
  md += "Coverage: " + std::to_string(card.manifest.reports) + " of " +
        std::to_string(card.manifest.tasks) + " tasks with reports; " +
        std::to_string(card.manifest.missing_cells) + " missing cells; " +
        std::to_string(card.manifest.judge_flags) + " judge flags.\n";
  if (!a.notes.empty()) md += "\nNotes: " + join(a.notes, "; ") + "\n";
  write_file(out_dir / "scorecard.md", md);

  // ---- manifest.json
  ordered_json m;
  m["system"] = card.manifest.system_name;
  m["mode"] = card.manifest.mode;
  m["window"] = card.manifest.window;
  m["config_digest"] = card.manifest.config_digest;
  m["dataset_digest"] = card.manifest.dataset_digest;
  m["judge_cache_digest"] = card.manifest.judge_cache_digest;
  m["general_model"] = card.manifest.general_model;
  m["nugget_model"] = card.manifest.nugget_model;
  m["started_at"] = card.manifest.started_at;
  m["finished_at"] = card.manifest.finished_at;
  m["tasks"] = card.manifest.tasks;
  m["reports"] = card.manifest.reports;
  m["missing_cells"] = card.manifest.missing_cells;
  m["judge_flags"] = card.manifest.judge_flags;
  m["org"] = ordered_json{{"wins", a.org_wins},
                          {"ties", a.org_ties},
                          {"losses", a.org_losses},
                          {"skipped", a.org_skipped}};
  m["mean_stats"] = ordered_json{{"chars", ms.chars},
                                 {"words", ms.words},
                                 {"sentences", ms.sentences},
                                 {"unique_refs", ms.unique_refs},
                                 {"inline_citations", ms.inline_citations}};
  m["notes"] = a.notes;
  write_file(out_dir / "manifest.json", m.dump(2) + "\n");

  // ---- audits/<task_id>.json
  for (const auto& row : card.tasks) {
    ordered_json audit;
    audit["task_id"] = row.task_id;
    audit["has_report"] = row.has_report;
    audit["org"] = row.org ? org_str(*row.org) : "";
    audit["notes"] = row.notes;
    audit["retrieved"] = ordered_json::object();
    audit["retrieved"]["sources"] = row.retrieved.sources;
    audit["retrieved"]["grades"] = row.retrieved.grades;
    audit["citations"] = ordered_json::array();
    for (const auto& c : row.citation_audit)
      audit["citations"].push_back(ordered_json{{"sentence_index", c.sentence_index},
                                                {"marker", c.marker},
                                                {"ref_target", c.ref_target},
                                                {"verdict", c.verdict},
                                                {"note", c.note}});
    audit["sentences"] = ordered_json::array();
    for (const auto& s : row.sentence_audit)
      audit["sentences"].push_back(ordered_json{{"sentence_index", s.sentence_index},
                                                {"sentence", s.sentence},
                                                {"evidence_ids", s.evidence_ids},
                                                {"verdict", s.verdict}});
    write_file(out_dir / "audits" / (row.task_id + ".json"), audit.dump(2) + "\n");
  }
}

ScoreCard read_scorecard(const fs::path& out_dir) {
  ScoreCard card;

  const json m = json::parse(read_file(out_dir / "manifest.json"));
  card.system = m.at("system").get<std::string>();
  card.manifest.system_name = card.system;
  card.manifest.mode = m.at("mode").get<std::string>();
  card.manifest.window = m.at("window").get<int>();
  card.manifest.config_digest = m.at("config_digest").get<std::string>();
  card.manifest.dataset_digest = m.at("dataset_digest").get<std::string>();
  card.manifest.judge_cache_digest = m.at("judge_cache_digest").get<std::string>();
  card.manifest.general_model = m.at("general_model").get<std::string>();
  card.manifest.nugget_model = m.at("nugget_model").get<std::string>();
  card.manifest.started_at = m.at("started_at").get<std::string>();
  card.manifest.finished_at = m.at("finished_at").get<std::string>();
  card.manifest.tasks = m.at("tasks").get<long>();
  card.manifest.reports = m.at("reports").get<long>();
  card.manifest.missing_cells = m.at("missing_cells").get<long>();
  card.manifest.judge_flags = m.at("judge_flags").get<long>();
  card.aggregate.org_wins = m.at("org").at("wins").get<long>();
  card.aggregate.org_ties = m.at("org").at("ties").get<long>();
  card.aggregate.org_losses = m.at("org").at("losses").get<long>();
  card.aggregate.org_skipped = m.at("org").at("skipped").get<long>();
  card.mean_stats.chars = m.at("mean_stats").at("chars").get<double>();
  card.mean_stats.words = m.at("mean_stats").at("words").get<double>();
  card.mean_stats.sentences = m.at("mean_stats").at("sentences").get<double>();
  card.mean_stats.unique_refs = m.at("mean_stats").at("unique_refs").get<double>();
  card.mean_stats.inline_citations = m.at("mean_stats").at("inline_citations").get<double>();
  for (const auto& note : m.at("notes")) card.aggregate.notes.push_back(note.get<std::string>());

  for (const auto& line : split(read_file(out_dir / "aggregate.csv"), '\n')) {
    if (line.empty() || line == "metric,value") continue;
    const auto cells = csv_split(line);
    if (cells.size() != 2) continue;
    const std::string& metric = cells[0];
    const auto value = cell_from(cells[1]);
    if (metric == "organization") card.aggregate.organization = value.value_or(0.0);
    else if (metric == "nugget_coverage") card.aggregate.nugget_coverage = value;
    else if (metric == "relevance_rate") card.aggregate.relevance_rate = value;
    else if (metric == "reference_coverage") card.aggregate.reference_coverage = value;
    else if (metric == "document_importance") card.aggregate.document_importance = value;
    else if (metric == "citation_precision") card.aggregate.citation_precision = value;
    else if (metric.rfind("claim_coverage_w", 0) == 0)
      card.aggregate.claim_coverage[std::stoi(metric.substr(16))] = value;
  }

  const auto lines = split(read_file(out_dir / "per_task.csv"), '\n');
  if (lines.empty()) return card;
  const auto header = csv_split(lines[0]);
  auto column = [&header](const std::string& name) -> int {
    for (size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  };
  for (size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const auto cells = csv_split(lines[li]);
    if (cells.size() != header.size()) continue;
    TaskScores row;
    auto cell = [&](const std::string& name) -> std::string {
      const int idx = column(name);
      return idx < 0 ? std::string() : cells[static_cast<size_t>(idx)];
    };
    row.task_id = cell("task_id");
    row.has_report = cell("has_report") == "1";
    row.org = org_from(cell("org"));
    row.nugget_coverage = cell_from(cell("nugget_coverage"));
    row.relevance_rate = cell_from(cell("relevance_rate"));
    row.reference_coverage = cell_from(cell("reference_coverage"));
    row.citation_precision = cell_from(cell("citation_precision"));
    for (size_t ci = 0; ci < header.size(); ++ci)
      if (header[ci].rfind("claim_coverage_w", 0) == 0)
        if (auto v = cell_from(cells[ci]); v.has_value())
          row.claim_coverage[std::stoi(header[ci].substr(16))] = *v;
    if (!cell("chars").empty()) row.stats.chars = std::stol(cell("chars"));
    if (!cell("words").empty()) row.stats.words = std::stol(cell("words"));
    if (!cell("sentences").empty()) row.stats.sentences = std::stol(cell("sentences"));
    if (!cell("unique_refs").empty()) row.stats.unique_refs = std::stol(cell("unique_refs"));
    if (!cell("inline_citations").empty())
      row.stats.inline_citations = std::stol(cell("inline_citations"));
    const std::string notes = cell("notes");
    if (!notes.empty())
      for (const auto& note : split(notes, ';')) row.notes.push_back(trim(note));
    card.tasks.push_back(std::move(row));
  }
  return card;
}

double agreement(const std::vector<std::string>& labels_a,
                 const std::vector<std::string>& labels_b) {
  if (labels_a.size() != labels_b.size())
    throw Error("LengthMismatch", "label lists differ in length: " +
                                      std::to_string(labels_a.size()) + " vs " +
                                      std::to_string(labels_b.size()));
  if (labels_a.empty())
    throw Error("EmptyLabels", "agreement over zero labels is undefined");
  size_t same = 0;
  for (size_t i = 0; i < labels_a.size(); ++i)
    if (labels_a[i] == labels_b[i]) ++same;
  return static_cast<double>(same) / static_cast<double>(labels_a.size());
}

std::vector<std::string> read_labels(const fs::path& path) {
  std::vector<std::string> out;
  for (const auto& line : split(read_file(path), '\n')) {
    const std::string label = trim(line);
    if (!label.empty()) out.push_back(label);
  }
  return out;
}

std::vector<HistogramBin> log_histogram(const std::vector<double>& counts, double bin_width) {
  std::vector<HistogramBin> bins;
  if (counts.empty() || bin_width <= 0.0) return bins;
  std::vector<double> logs;
  double max_log = 0.0;
  logs.reserve(counts.size());
  for (double c : counts) {
    const double v = std::log10(1.0 + std::max(0.0, c));
    logs.push_back(v);
    max_log = std::max(max_log, v);
  }
  const size_t n = static_cast<size_t>(std::floor(max_log / bin_width)) + 1;
  bins.resize(n);
  for (size_t i = 0; i < n; ++i) {
    bins[i].lo = static_cast<double>(i) * bin_width;
    bins[i].hi = static_cast<double>(i + 1) * bin_width;
  }
  for (double v : logs) {
    const size_t idx = std::min(static_cast<size_t>(v / bin_width), n - 1);
    ++bins[idx].count;
  }
  return bins;
}

void emit_plot_data(const std::vector<ScoreCard>& cards,
                    const std::vector<PaperRecord>& dataset, const fs::path& out_dir) {
  fs::create_directories(out_dir);

  std::string radar = "system,metric,value\n";
  std::string sweep = "system,window,claim_coverage\n";
  bool any_sweep = false;
  for (const auto& card : cards) {
    const auto& a = card.aggregate;
    std::optional<double> headline_cc;
    if (auto it = a.claim_coverage.find(card.manifest.window); it != a.claim_coverage.end())
      headline_cc = it->second;
    const std::pair<std::string, std::optional<double>> axes[] = {
        {"organization", a.organization},
        {"nugget_coverage", a.nugget_coverage},
        {"relevance_rate", a.relevance_rate},
        {"reference_coverage", a.reference_coverage},
        {"document_importance", a.document_importance},
        {"citation_precision", a.citation_precision},
        {"claim_coverage", headline_cc},
    };
    for (const auto& [name, value] : axes)
      radar += csv_quote(card.system) + ',' + name + ',' + fmt_opt(value) + '\n';
    for (const auto& [w, v] : a.claim_coverage) {
      if (!v) continue;
      sweep += csv_quote(card.system) + ',' + std::to_string(w) + ',' + fmt6(*v) + '\n';
      any_sweep = true;
    }
  }
  write_file(out_dir / "radar.csv", radar);
  if (any_sweep) write_file(out_dir / "window_sweep.csv", sweep);

  if (dataset.empty()) return;

  std::string breakdown = "task_id,important_arxiv,important_non_arxiv,non_essential\n";
  std::vector<double> all_counts, arxiv_counts;
  for (const auto& rec : dataset) {
    const CitationsBreakdown b = citations_breakdown(rec);
    breakdown += csv_quote(b.task_id) + ',' + std::to_string(b.important_arxiv) + ',' +
                 std::to_string(b.important_non_arxiv) + ',' +
                 std::to_string(b.non_essential) + '\n';
    for (const auto& c : rec.citations) {
      if (!c.citation_count) continue;
      all_counts.push_back(static_cast<double>(*c.citation_count));
      if (c.arxiv_id) arxiv_counts.push_back(static_cast<double>(*c.citation_count));
    }
  }
  write_file(out_dir / "citations_breakdown.csv", breakdown);

  std::string histogram = "subset,bin_lo,bin_hi,count\n";
  const std::pair<std::string, const std::vector<double>*> subsets[] = {
      {"all", &all_counts}, {"arxiv", &arxiv_counts}};
  for (const auto& [name, counts] : subsets)
    for (const auto& bin : log_histogram(*counts))
      histogram += name + ',' + fmt3(bin.lo) + ',' + fmt3(bin.hi) + ',' +
                   std::to_string(bin.count) + '\n';
  write_file(out_dir / "citation_histogram.csv", histogram);
}

}  // namespace synthbench
