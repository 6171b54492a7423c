#include "synthbench/config.hpp"

#include <sstream>

namespace synthbench {

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
    KeyValueConfig cfg;
    std::istringstream in{std::string(text)};
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw Error("ConfigError",
                        "line " + std::to_string(lineno) + ": expected `key = value`");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw Error("ConfigError", "line " + std::to_string(lineno) + ": empty key");
        for (const auto& part : split(value, ',')) {
            std::string p = trim(part);
            if (!p.empty()) cfg.values_[key].push_back(p);
        }
        if (value.empty()) cfg.values_[key];  // key present with no values
        cfg.raw_[key] = value;
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
    return parse(read_file(path));
}

bool KeyValueConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end() || it->second.empty()) return std::nullopt;
    return it->second.front();
}

std::optional<std::string> KeyValueConfig::get_raw(const std::string& key) const {
    auto it = raw_.find(key);
    if (it == raw_.end()) return std::nullopt;
    return it->second;
}

std::string KeyValueConfig::get_or(const std::string& key, std::string fallback) const {
    auto v = get(key);
    return v ? *v : std::move(fallback);
}

std::vector<std::string> KeyValueConfig::get_list(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return {};
    return it->second;
}

std::optional<long> KeyValueConfig::get_int(const std::string& key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    try {
        return std::stol(*v);
    } catch (const std::exception&) {
        throw Error("ConfigError", "key `" + key + "` is not an integer: " + *v);
    }
}

std::optional<bool> KeyValueConfig::get_bool(const std::string& key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    std::string s = to_lower(*v);
    if (s == "true" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "no" || s == "0") return false;
    throw Error("ConfigError", "key `" + key + "` is not a boolean: " + *v);
}

std::optional<Date> KeyValueConfig::get_date(const std::string& key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    auto d = parse_date(*v);
    if (!d) throw Error("ConfigError", "key `" + key + "` is not a date: " + *v);
    return d;
}

void KeyValueConfig::set(const std::string& key, std::string value) {
    raw_[key] = value;
    values_[key] = {std::move(value)};
}

}  // namespace synthbench
