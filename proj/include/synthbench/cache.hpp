#pragma once

#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace synthbench {

/// Append-only key/value store persisted as one JSON object per line.
/// Existing entries are loaded at open; writes are flushed immediately so
/// interrupted runs resume from whatever was committed. Concurrent readers
/// are fine; writes are serialized internally.
class DiskKv {
public:
    /// In-memory only when path is empty (tests, --no-cache runs).
    explicit DiskKv(std::filesystem::path path = {});

    std::optional<std::string> get(const std::string& key) const;
    void put(const std::string& key, const std::string& value);
    bool contains(const std::string& key) const;
    size_t size() const;
    /// All keys, sorted (stable input for run digests).
    std::vector<std::string> keys() const;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    mutable std::mutex mu_;
    std::unordered_map<std::string, std::string> entries_;
    std::ofstream out_;
};

/// Directory of files keyed by sha256(key); used for bulky bodies
/// (source archives, raw API responses).
class BlobCache {
public:
    explicit BlobCache(std::filesystem::path dir = {});

    std::optional<std::string> get(const std::string& key) const;
    void put(const std::string& key, const std::string& value);
    bool enabled() const { return !dir_.empty(); }

private:
    std::filesystem::path dir_;
};

}  // namespace synthbench
