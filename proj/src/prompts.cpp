#include "synthbench/prompts.hpp"

namespace synthbench::prompts {

std::string pairwise_organization(const std::string& paper_ctx,
                                  const std::string& candidate_a,
                                  const std::string& candidate_b) {
  return
      "You are an intelligent, rigorous, and fair evaluator of scholarly writing "
      "quality and relevance.\n"
      "You will receive the title and abstract of a research paper, together with two "
      "candidate related-work sections (A and B) written for that paper.\n"
      "Do not consider the formatting of the text (e.g., LaTeX, markdown, etc.). Only "
      "consider the content.\n\n"
      "Task: Decide which section—A or B—exhibits better organization and coherence.\n\n"
      "How to judge (organization only)\n"
      "Ignore breadth of coverage, citation accuracy, and analytic depth. Assess:\n\n"
      "Logical structure – Clear introduction, grouping of related themes, and smooth "
      "progression of ideas.\n\n"
      "Paragraph cohesion – Each paragraph develops a single topic and flows naturally "
      "to the next.\n\n"
      "Clarity & readability – Minimal redundancy or contradictions; transitions guide "
      "the reader.\n\n"
      "Signposting – Helpful headings, topic sentences, or discourse markers (if "
      "provided).\n\n"
      "Pick the section that is easier to follow and better structured—no ties.\n\n"
      "### Paper under assessment:\n" + paper_ctx + "\n\n"
      "### Candidate related-work section A\n" + candidate_a + "\n\n"
      "### Candidate related-work section B\n" + candidate_b + "\n\n"
      "Output your answer as a JSON dictionary in the following format:\n\n"
      "{\"decision\": \"A\" or \"B\", \"explanation\": \"One sentence clearly explaining "
      "the key differences between the two options and why the selected one is "
      "preferred.\"}\n\n"
      "Only output the dictionary, do not output any other text.";
}

std::string relevance(const std::string& paper_title, const std::string& paper_abstract,
                      const std::string& related_work, const std::string& ref_title,
                      const std::string& ref_abstract, bool graded) {
  std::string rubric;
  std::string format_line;
  if (graded) {
    rubric =
        "How to judge\n"
        "- Consider the main research topic and themes described in the related-work "
        "section.\n"
        "- Score 2: the reference is clearly central — it discusses the same ideas, "
        "directly comparable prior work, or essential background.\n"
        "- Score 1: the reference is partially or tangentially relevant — related area "
        "or methodology, but not central to the section's themes.\n"
        "- Score 0: the reference is off-topic or unrelated in scope.\n"
        "- Remember: You are only seeing the title and abstract of the reference, so "
        "the full content might be more relevant than it appears.\n";
    format_line = "### final score: <0, 1 or 2>";
  } else {
    rubric =
        "How to judge\n"
        "- Consider the main research topic and themes described in the related-work "
        "section.\n"
        "- If the reference discusses similar ideas, prior work, or background, mark it "
        "as relevant (1).\n"
        "- If the reference is off-topic or unrelated in scope, mark it as not relevant "
        "(0).\n"
        "- Remember: You are only seeing the title and abstract of the reference, so "
        "the full content might be more relevant than it appears.\n";
    format_line = "### final score: <0 or 1>";
  }
  return
      "You are an intelligent, rigorous, and fair evaluator of scholarly writing "
      "quality and citation relevance.\n"
      "You will receive the title and abstract of a research paper under assessment, "
      "the ground-truth related-work section written by human experts, and the title "
      "and abstract of a candidate reference paper.\n"
      "Do not consider formatting (e.g., LaTeX, markdown, etc.). Only consider the "
      "content.\n\n"
      "Task: Determine whether the candidate reference paper is relevant to the "
      "related-work section.\n\n" + rubric + "\n"
      "### Paper under assessment:\n" + paper_title + "\n" + paper_abstract + "\n\n"
      "### Ground-truth related-work section:\n" + related_work + "\n\n"
      "### Candidate reference paper:\n" + ref_title + "\n" + ref_abstract + "\n\n"
      "Return only the score in this format:\n" + format_line;
}

std::string attribution(const std::string& claim, const std::string& references_text,
                        bool all_claims) {
  std::string task_line =
      all_claims
          ? "Given a claim and its associated set of references, determine whether "
            "the references sufficiently support all aspects of the claim.\n\n"
          : "Given a sentence and one associated reference, determine whether the "
            "reference supports at least one claim made in the sentence.\n\n";
  std::string criteria =
      all_claims
          ? "- If the references support the claim, return 1.\n"
            "- If the references do not support the claim, return 0.\n"
          : "- If the reference supports at least one claim in the sentence, return 1.\n"
            "- If the reference supports none of the sentence's claims, return 0.\n";
  return
      "You are an intelligent and fair evaluator.\n"
      "Your task is to verify whether a given reference can support the provided "
      "claim.\n\n"
      "Task:\n" + task_line +
      "### CLAIM:\n" + claim + "\n\n"
      "### REFERENCES:\n" + references_text + "\n\n"
      "Judgment Criteria:\n" + criteria +
      "- Do not explain your answer or include any additional commentary.\n\n"
      "Output Format:\n"
      "Answer: 1 or Answer: 0";
}

std::string reference_importance(const std::string& title, const std::string& abstract,
                                 const std::string& related_work_section,
                                 const std::string& cited_paper_title,
                                 const std::string& cited_paper_authors,
                                 const std::string& cited_paper_content) {
  return
      "Carefully read the title, abstract and related-work section of an academic "
      "paper. Then consider the cited paper in question, given its title, authors and "
      "a snippet of its content. Is the cited paper in question an important "
      "reference? An important reference reflects a notable prior work that provides "
      "key information, which a good related works section for this paper must "
      "include. A non-important reference is one that could be omitted or substituted "
      "with a different related work. A non-important reference may be a tangential "
      "reference, an unimportant reference. Alternatively, a non-important reference "
      "may be a relevant reference that reflects an important topic area, but the "
      "particular reference could be omitted or substituted with a different related "
      "work.\n\n"
      "### TITLE:\n" + title + "\n\n"
      "### ABSTRACT:\n" + abstract + "\n\n"
      "### RELATED WORK SECTION:\n" + related_work_section + "\n\n"
      "### CITED PAPER TITLE:\n" + cited_paper_title + "\n\n"
      "### CITED PAPER AUTHORS:\n" + cited_paper_authors + "\n\n"
      "### CITED PAPER CONTENT:\n" + cited_paper_content + "\n\n"
      "Answer with exactly one word: True if the cited paper is an important "
      "reference, False otherwise.";
}

std::string nugget_extract(const std::string& exemplar_text) {
  return
      "You are NuggetizeLLM, an intelligent assistant that extracts atomic nuggets of "
      "information from provided text.\n\n"
      "Task: Decompose the passage below into atomic, self-contained factual "
      "statements (nuggets). Each nugget must express exactly one fact, be "
      "understandable without the surrounding text, and stay faithful to the passage. "
      "Do not invent facts. Return at most 30 nuggets, covering the most essential "
      "information first.\n\n"
      "### PASSAGE:\n" + exemplar_text + "\n\n"
      "Output a JSON array of strings, one nugget per string. Only output the JSON "
      "array, no other text.";
}

std::string nugget_label(const std::string& nugget, const std::string& exemplar_text) {
  return
      "You are NuggetizeScoreLLM, an intelligent assistant that labels the importance "
      "of information nuggets extracted from a passage.\n\n"
      "Task: Given the passage and one nugget, label the nugget as vital or okay. "
      "Vital nuggets represent concepts that must be present in a good summary of the "
      "passage's topic; okay nuggets contribute worthwhile but non-essential "
      "information.\n\n"
      "### PASSAGE:\n" + exemplar_text + "\n\n"
      "### NUGGET:\n" + nugget + "\n\n"
      "Answer with exactly one word: vital or okay.";
}

std::string nugget_match(const std::string& nugget, const std::string& report_text) {
  return
      "You are NuggetizeAssignerLLM, an intelligent assistant that judges whether a "
      "passage conveys a given nugget of information.\n\n"
      "Task: Given a report and one nugget, decide whether the report fully supports "
      "the nugget (support), captures it only partially (partial_support), or does "
      "not contain it (not_support).\n\n"
      "### REPORT:\n" + report_text + "\n\n"
      "### NUGGET:\n" + nugget + "\n\n"
      "Answer with exactly one word: support, partial_support, or not_support.";
}

std::string search_queries(const std::string& topic, const std::string& background,
                           int number_of_queries, const std::string& date) {
  return
      "You are an expert technical writer generating targeted search queries to "
      "retrieve the most relevant arXiv papers for a technical report section.\n\n"
      "<Report topic>\n" + topic + "\n</Report topic>\n\n"
      "<Background>\n" + background + "\n</Background>\n\n"
      "<Task>\n"
      "Generate " + std::to_string(number_of_queries) + " distinct arXiv search "
      "queries to comprehensively cover the section topic. Today's date is " + date +
      ".\n\n"
      "Guidelines for queries:\n"
      "1. Each query should use 1-10 keywords, focusing on a single, specific concept "
      "related to the topic.\n"
      "2. Ensure queries explore different or complementary aspects of the topic to "
      "maximize coverage.\n"
      "3. Use terminology and phrasing likely to match arXiv paper titles or "
      "abstracts.\n"
      "4. Avoid overly broad or generic queries; be as precise as possible.\n"
      "5. Queries should cover all the key aspects of the topic. Background "
      "information may be used to inform the queries.\n"
      "6. DO NOT create a complex query using AND/OR etc. Keep it simple\n\n"
      "The goal is to maximize the relevance and diversity of retrieved papers.\n"
      "</Task>\n\n"
      "Output a JSON dictionary in the format {\"queries\": [\"...\"]}. Only output "
      "the dictionary, no other text.";
}

std::string sem_filter(const std::string& snippet, const std::string& user_query) {
  return
      "Given the article's abstract: " + snippet + ", is the article relevant to the "
      "specific interests in the user's query: " + user_query + ".\n\n"
      "Think step by step, then answer on the final line with exactly one word: True "
      "or False.";
}

std::string sem_topk_compare(const std::string& user_query, const std::string& snippet_a,
                             const std::string& snippet_b) {
  return
      "You are comparing two articles for relevance to the specific interests in the "
      "user's query: " + user_query + ".\n\n"
      "### Document 1:\n" + snippet_a + "\n\n"
      "### Document 2:\n" + snippet_b + "\n\n"
      "Think step by step, then answer on the final line with exactly \"Document 1\" "
      "or \"Document 2\" to indicate the more relevant article.";
}

std::string related_work_section_instructions() {
  return
      "Write the related-work section of a research paper whose abstract is given in "
      "the user query. Group prior work into coherent themes, compare and contrast "
      "the cited papers, and connect them to the paper described by the query.";
}

std::string sem_agg(const std::string& topic, const std::string& section_instructions,
                    const std::string& existing_content, const std::string& context) {
  return
      "You are an expert technical writer crafting one section of a technical "
      "report.\n\n"
      "<User Query>\n" + topic + "\n</User Query>\n\n"
      "<Section instructions>\n" + section_instructions + "\n</Section instructions>\n\n"
      "<Existing section content (if populated)>\n" + existing_content +
      "\n</Existing section content>\n\n"
      "<Source material>\n" + context + "\n</Source material>\n\n"
      "<Citation Guidelines>\n"
      "- Use [X] format where X is the {citation_number}\n"
      "- Place citations immediately after the sentence or paragraph they are "
      "referencing (e.g., information from context [3]. Further details discussed in "
      "contexts [2][7].).\n"
      "- If urls are given in existing section content, rewrite them exactly if using "
      "information related to the url.\n"
      "- Make sure to provide citations whenever you are using information from the "
      "source material. This is a MUST.\n"
      "- Cite as many sources as possible.\n"
      "- Make sure to retain the citation numbers from the input context.\n"
      "- Provide in-line citations only. You do not need a reference section at the "
      "end.\n"
      "</Citation Guidelines>\n\n"
      "<Guidelines for writing>\n"
      "1. If the existing section content is populated, write a new section that "
      "enhances the existing section content with the new information. If not, write "
      "a new section from scratch.\n"
      "2. Provide groundings in the source material for all facts stated.\n"
      "3. When using information from a given source, make sure to cite the source.\n"
      "4. If a table or list would enhance understanding of a key point, and if so, "
      "include one.\n"
      "5. Make sure to follow the user query strictly.\n"
      "</Guidelines for writing>\n\n"
      "<Writing style>\n"
      "1. Content Requirements:\n"
      "  - Ground all facts in the source material and provide citations.\n"
      "  - Maintain an academic, technical focus throughout. No marketing language\n"
      "  - Address potential counter-arguments where relevant.\n"
      "2. Structure and Formatting:\n"
      "  - Use Markdown formatting.\n"
      "  - Begin with ## for section title (Markdown format) and other headings as "
      "needed.\n"
      "  - Strict 1500-2000 word limit\n"
      "  - Use simple, clear language appropriate for academic writing.\n"
      "</Writing style>\n\n"
      "<Quality checks>\n"
      "- Exactly 1500-2000 words (excluding title and sources)\n"
      "- No preamble prior to creating the section content\n"
      "- Cite as many sources as possible.\n"
      "</Quality checks>";
}

std::string format_reminder(const std::string& task_kind) {
  if (task_kind == "pairwise_org")
    return "Reminder: output only the JSON dictionary {\"decision\": \"A\" or \"B\", "
           "\"explanation\": \"...\"}.";
  if (task_kind == "relevance")
    return "Reminder: return only one line in the exact format `### final score: "
           "<number>`.";
  if (task_kind == "entailment")
    return "Reminder: answer with exactly `Answer: 1` or `Answer: 0`.";
  if (task_kind == "nugget_extract")
    return "Reminder: output only a JSON array of nugget strings.";
  if (task_kind == "nugget_label")
    return "Reminder: answer with exactly one word: vital or okay.";
  if (task_kind == "nugget_match")
    return "Reminder: answer with exactly one word: support, partial_support, or "
           "not_support.";
  if (task_kind == "reference_importance")
    return "Reminder: answer with exactly one word: True or False.";
  if (task_kind == "sem_filter")
    return "Reminder: the final line must be exactly True or False.";
  if (task_kind == "sem_topk")
    return "Reminder: the final line must be exactly `Document 1` or `Document 2`.";
  if (task_kind == "query_gen")
    return "Reminder: output only the JSON dictionary {\"queries\": [...]}.";
  return "Reminder: follow the requested output format exactly.";
}

}  // namespace synthbench::prompts
