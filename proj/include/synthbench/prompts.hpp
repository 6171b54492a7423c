#pragma once

#include <string>
#include <vector>

namespace synthbench {

/// Rendered prompt templates for every judge and pipeline task. Each template
/// uses stable "###"-style section markers so completions (and the scripted
/// mock) can locate fields deterministically.
namespace prompts {

// --- evaluation -------------------------------------------------------------

std::string pairwise_organization(const std::string& paper_ctx,
                                  const std::string& candidate_a,
                                  const std::string& candidate_b);

/// graded=true appends an explicit 0/1/2 rubric and asks for a 0-2 score;
/// graded=false is the binary form (0/1).
std::string relevance(const std::string& paper_title, const std::string& paper_abstract,
                      const std::string& related_work, const std::string& ref_title,
                      const std::string& ref_abstract, bool graded);

/// all_claims=true asks whether the references support every aspect of the
/// claim; all_claims=false asks whether they support at least one claim made
/// in the sentence.
std::string attribution(const std::string& claim, const std::string& references_text,
                        bool all_claims = true);

std::string reference_importance(const std::string& title, const std::string& abstract,
                                 const std::string& related_work_section,
                                 const std::string& cited_paper_title,
                                 const std::string& cited_paper_authors,
                                 const std::string& cited_paper_content);

std::string nugget_extract(const std::string& exemplar_text);
std::string nugget_label(const std::string& nugget, const std::string& exemplar_text);
std::string nugget_match(const std::string& nugget, const std::string& report_text);

// --- reference pipeline -----------------------------------------------------

std::string search_queries(const std::string& topic, const std::string& background,
                           int number_of_queries, const std::string& date);

std::string sem_filter(const std::string& snippet, const std::string& user_query);

/// Pairwise comparator used by the semantic top-k reduction.
std::string sem_topk_compare(const std::string& user_query, const std::string& snippet_a,
                             const std::string& snippet_b);

std::string sem_agg(const std::string& topic, const std::string& section_instructions,
                    const std::string& existing_content, const std::string& context);

/// The default section instructions for related-work generation.
std::string related_work_section_instructions();

// Format reminders appended on parse-failure retries.
std::string format_reminder(const std::string& task_kind);

}  // namespace prompts

}  // namespace synthbench
