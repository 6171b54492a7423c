#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "synthbench/util.hpp"

namespace synthbench {

/// Plain `key = value` config files. `#` starts a comment line; lists are
/// comma-separated, and repeating a key appends to its list.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::string_view text);
    static KeyValueConfig load(const std::filesystem::path& path);

    bool has(const std::string& key) const;
    std::optional<std::string> get(const std::string& key) const;
    /// Last unsplit value line for the key — use for values that may
    /// legitimately contain commas (regexes, free text).
    std::optional<std::string> get_raw(const std::string& key) const;
    std::string get_or(const std::string& key, std::string fallback) const;
    std::vector<std::string> get_list(const std::string& key) const;
    std::optional<long> get_int(const std::string& key) const;
    std::optional<bool> get_bool(const std::string& key) const;
    std::optional<Date> get_date(const std::string& key) const;

    void set(const std::string& key, std::string value);

    const std::map<std::string, std::vector<std::string>>& entries() const { return values_; }

private:
    // key -> accumulated values, in file order
    std::map<std::string, std::vector<std::string>> values_;
    // key -> last raw (unsplit) value line
    std::map<std::string, std::string> raw_;
};

}  // namespace synthbench
