#include "synthbench/util.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace synthbench {

std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    while (start <= s.size()) {
        size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(s.substr(start));
            break;
        }
        out.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string collapse_ws(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_ws = true;  // leading whitespace dropped
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_ws = true;
        } else {
            if (in_ws && !out.empty()) out.push_back(' ');
            in_ws = false;
            out.push_back(c);
        }
    }
    return out;
}

namespace {

// Removes substrings matching \[\d+\] (inline citation markers).
std::string strip_markers(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (size_t i = 0; i < s.size();) {
        if (s[i] == '[') {
            size_t j = i + 1;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            if (j > i + 1 && j < s.size() && s[j] == ']') {
                i = j + 1;
                continue;
            }
        }
        out.push_back(s[i++]);
    }
    return out;
}

}  // namespace

std::string normalize_for_match(std::string_view s) {
    std::string stripped = strip_markers(s);
    std::string out;
    out.reserve(stripped.size());
    bool in_sep = true;
    for (char c : stripped) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            if (in_sep && !out.empty()) out.push_back(' ');
            in_sep = false;
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else {
            in_sep = true;
        }
    }
    return out;
}

long word_count(std::string_view text) {
    std::string stripped = strip_markers(text);
    long count = 0;
    bool in_token = false;
    bool token_has_word_char = false;
    auto flush = [&] {
        if (in_token && token_has_word_char) ++count;
        in_token = false;
        token_has_word_char = false;
    };
    for (char c : stripped) {
        auto b = static_cast<unsigned char>(c);
        if (std::isspace(b)) {
            flush();
            continue;
        }
        in_token = true;
        // Punctuation-only tokens (a lone "." left by marker stripping, a
        // bare "##") are not words; bytes >= 0x80 are letters in some script.
        if (std::isalnum(b) || b >= 0x80) token_has_word_char = true;
    }
    flush();
    return count;
}

long utf8_length(std::string_view text) {
    long n = 0;
    for (char c : text) {
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
    }
    return n;
}

size_t levenshtein(std::string_view a, std::string_view b) {
    if (a.size() > b.size()) std::swap(a, b);
    std::vector<size_t> row(a.size() + 1);
    for (size_t i = 0; i <= a.size(); ++i) row[i] = i;
    for (size_t j = 1; j <= b.size(); ++j) {
        size_t prev = row[0];
        row[0] = j;
        for (size_t i = 1; i <= a.size(); ++i) {
            size_t cur = row[i];
            size_t cost = (a[i - 1] == b[j - 1]) ? 0 : 1;
            row[i] = std::min({row[i] + 1, row[i - 1] + 1, prev + cost});
            prev = cur;
        }
    }
    return row[a.size()];
}

double title_similarity(std::string_view a, std::string_view b) {
    std::string na = normalize_for_match(a);
    std::string nb = normalize_for_match(b);
    size_t longest = std::max(na.size(), nb.size());
    if (longest == 0) return 1.0;
    return 1.0 - static_cast<double>(levenshtein(na, nb)) / static_cast<double>(longest);
}

bool contains_ci(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) return true;
    return to_lower(haystack).find(to_lower(needle)) != std::string::npos;
}

std::string Date::str() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
    return buf;
}

std::optional<Date> parse_date(std::string_view s) {
    std::string t = trim(s);
    if (t.size() < 10) return std::nullopt;
    Date date;
    auto num = [&](size_t pos, size_t len, int& out) {
        auto res = std::from_chars(t.data() + pos, t.data() + pos + len, out);
        return res.ec == std::errc() && res.ptr == t.data() + pos + len;
    };
    if (!num(0, 4, date.y) || t[4] != '-' || !num(5, 2, date.m) || t[7] != '-' ||
        !num(8, 2, date.d))
        return std::nullopt;
    if (date.m < 1 || date.m > 12 || date.d < 1 || date.d > 31) return std::nullopt;
    return date;
}

std::optional<double> median(std::vector<double> values) {
    if (values.empty()) return std::nullopt;
    std::sort(values.begin(), values.end());
    size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("IoError", "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("IoError", "cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("IoError", "short write to " + path.string());
}

void parallel_for(size_t n, size_t max_parallel, const std::function<void(size_t)>& fn) {
    if (n == 0) return;
    if (max_parallel <= 1 || n == 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr first_error;
    size_t workers = std::min(max_parallel, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(err_mu);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace synthbench
