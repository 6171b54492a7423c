#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace synthbench {

/// Error with a stable machine-readable code ("NotFound", "EmptyBibliography", ...).
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

// ---------------------------------------------------------------------------
// String helpers
// ---------------------------------------------------------------------------

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

/// Collapse all whitespace runs to single spaces and trim the ends.
std::string collapse_ws(std::string_view s);

/// Lowercase, strip `[k]` citation markers, map every non-alphanumeric run
/// to a single space. Used for fuzzy title matching and mock echo checks.
std::string normalize_for_match(std::string_view s);

/// Whitespace tokens, excluding tokens that are pure `[k]` citation markers.
long word_count(std::string_view text);

/// Number of UTF-8 code points (malformed bytes count as one each).
long utf8_length(std::string_view text);

size_t levenshtein(std::string_view a, std::string_view b);

/// 1 - levenshtein/max_len over normalize_for_match'ed strings; 1.0 for two empties.
double title_similarity(std::string_view a, std::string_view b);

bool contains_ci(std::string_view haystack, std::string_view needle);

// ---------------------------------------------------------------------------
// Dates
// ---------------------------------------------------------------------------

struct Date {
    int y = 0;
    int m = 0;
    int d = 0;

    auto operator<=>(const Date&) const = default;
    std::string str() const;  // YYYY-MM-DD
};

/// Parses "YYYY-MM-DD"; ISO datetimes ("2025-04-15T17:59:59Z") use the date part.
std::optional<Date> parse_date(std::string_view s);

// ---------------------------------------------------------------------------
// Numerics
// ---------------------------------------------------------------------------

/// Median; even-sized input averages the two middle values. Empty -> nullopt.
std::optional<double> median(std::vector<double> values);

// ---------------------------------------------------------------------------
// Hashing / files
// ---------------------------------------------------------------------------

std::string sha256_hex(std::string_view data);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// ---------------------------------------------------------------------------
// Bounded parallelism
// ---------------------------------------------------------------------------

/// Runs fn(0..n-1) on up to max_parallel worker threads. max_parallel <= 1
/// degenerates to a plain loop. Exceptions from workers are rethrown (first one).
void parallel_for(size_t n, size_t max_parallel, const std::function<void(size_t)>& fn);

}  // namespace synthbench
