#include "synthbench/cache.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "synthbench/util.hpp"

namespace synthbench {

using json = nlohmann::json;

DiskKv::DiskKv(std::filesystem::path path) : path_(std::move(path)) {
    if (path_.empty()) return;
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    if (std::filesystem::exists(path_)) {
        std::ifstream in(path_);
        std::string line;
        size_t bad = 0;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            try {
                json j = json::parse(line);
                entries_[j.at("k").get<std::string>()] = j.at("v").get<std::string>();
            } catch (const json::exception&) {
                ++bad;  // torn tail line from an interrupted run
            }
        }
        if (bad > 0) spdlog::warn("cache {}: skipped {} unparseable line(s)", path_.string(), bad);
    }
    out_.open(path_, std::ios::app);
    if (!out_) throw Error("IoError", "cannot open cache file " + path_.string());
}

std::optional<std::string> DiskKv::get(const std::string& key) const {
    std::lock_guard lock(mu_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void DiskKv::put(const std::string& key, const std::string& value) {
    std::lock_guard lock(mu_);
    auto [it, inserted] = entries_.emplace(key, value);
    if (!inserted) return;
    if (out_.is_open()) {
        json j;
        j["k"] = key;
        j["v"] = value;
        out_ << j.dump() << '\n';
        out_.flush();
    }
}

bool DiskKv::contains(const std::string& key) const {
    std::lock_guard lock(mu_);
    return entries_.count(key) > 0;
}

size_t DiskKv::size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
}

std::vector<std::string> DiskKv::keys() const {
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [k, v] : entries_) out.push_back(k);
    std::sort(out.begin(), out.end());
    return out;
}

BlobCache::BlobCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
}

std::optional<std::string> BlobCache::get(const std::string& key) const {
    if (dir_.empty()) return std::nullopt;
    auto path = dir_ / sha256_hex(key);
    if (!std::filesystem::exists(path)) return std::nullopt;
    return read_file(path);
}

void BlobCache::put(const std::string& key, const std::string& value) {
    if (dir_.empty()) return;
    write_file(dir_ / sha256_hex(key), value);
}

}  // namespace synthbench
