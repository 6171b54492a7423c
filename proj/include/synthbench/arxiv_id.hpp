#pragma once

#include <optional>
#include <string>
#include <vector>

namespace synthbench {

/// Lowercases and strips a trailing version suffix ("v3") from an ArXiv id.
/// Accepts new-style ("2310.12345") and old-style ("cs.CL/0301001") ids.
std::string normalize_arxiv_id(std::string_view id);

/// True if `id` is a syntactically valid (already-normalized or raw) ArXiv id.
bool is_arxiv_id(std::string_view id);

/// Extracts and normalizes the id from an arxiv.org abs/pdf URL, an
/// "arXiv:<id>" token, or a raw id string. Returns nullopt when no id is
/// recognized.
std::optional<std::string> arxiv_id_from_url(std::string_view url);

/// Scans free text for ArXiv references that are explicitly marked as such:
/// arxiv.org URLs and "arXiv:" prefixed ids. Bare numeric ids are ignored to
/// avoid false positives. Result is normalized and deduplicated, in first
/// appearance order.
std::vector<std::string> extract_arxiv_ids(std::string_view text);

/// Canonical abstract-page URL for a normalized id.
std::string arxiv_abs_url(std::string_view id);

}  // namespace synthbench
