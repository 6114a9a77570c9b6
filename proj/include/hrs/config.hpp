#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hrs {

//! Flat sectioned key-value text config. "[section]" opens a section,
//! "key = value" adds an entry under it (stored as "section.key"), and '#'
//! starts a comment. Entries before any section keep their bare key.
class KvConfig {
public:
    static KvConfig parse_file(const std::string& path);
    static KvConfig parse_text(const std::string& text);

    bool has(const std::string& key) const { return kv_.count(key) > 0; }
    std::string get(const std::string& key, const std::string& fallback) const;
    std::string require(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }

    //! Sorted key=value dump; the run's identity for hashing.
    std::string canonical() const;
    std::uint64_t hash() const;

    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    std::map<std::string, std::string> kv_;
};

std::uint64_t file_checksum(const std::string& path);

//! Records what a run saw and produced: config hash, seed, and one
//! checksum line per artifact.
void write_manifest(const std::string& path, const KvConfig& cfg, std::uint64_t seed,
                    const std::vector<std::string>& artifact_paths);

}  // namespace hrs
