#include "hrs/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hrs/render.hpp"  // fnv1a64

namespace hrs {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace

KvConfig KvConfig::parse_text(const std::string& text) {
    KvConfig cfg;
    std::istringstream is(text);
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line.erase(hash_pos);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw std::runtime_error("config: unterminated section header at line " +
                                         std::to_string(lineno));
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config: expected key = value at line " +
                                     std::to_string(lineno));
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw std::runtime_error("config: empty key at line " + std::to_string(lineno));
        }
        cfg.kv_[section.empty() ? key : section + "." + key] = value;
    }
    return cfg;
}

KvConfig KvConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse_text(os.str());
}

std::string KvConfig::get(const std::string& key, const std::string& fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

std::string KvConfig::require(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw std::runtime_error("config: missing required key '" + key + "'");
    return it->second;
}

double KvConfig::get_double(const std::string& key, double fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("config: key '" + key + "' is not a number: " + it->second);
    }
}

std::int64_t KvConfig::get_int(const std::string& key, std::int64_t fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::int64_t v = 0;
    const auto& s = it->second;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
        throw std::runtime_error("config: key '" + key + "' is not an integer: " + s);
    }
    return v;
}

std::uint64_t KvConfig::get_uint(const std::string& key, std::uint64_t fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::uint64_t v = 0;
    const auto& s = it->second;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
        throw std::runtime_error("config: key '" + key + "' is not a non-negative integer: " + s);
    }
    return v;
}

std::string KvConfig::canonical() const {
    std::ostringstream os;
    for (const auto& [k, v] : kv_) os << k << "=" << v << "\n";
    return os.str();
}

std::uint64_t KvConfig::hash() const {
    const std::string c = canonical();
    return fnv1a64(c.data(), c.size());
}

std::uint64_t file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checksum: cannot open " + path);
    char buf[4096];
    std::uint64_t h = 0xcbf29ce484222325ull;
    while (in) {
        in.read(buf, sizeof(buf));
        h = fnv1a64(buf, static_cast<std::size_t>(in.gcount()), h);
    }
    return h;
}

void write_manifest(const std::string& path, const KvConfig& cfg, std::uint64_t seed,
                    const std::vector<std::string>& artifact_paths) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("manifest: cannot open " + path + " for writing");
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(cfg.hash()));
    out << "config_hash=" << buf << "\n";
    out << "seed=" << seed << "\n";
    for (const std::string& a : artifact_paths) {
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(file_checksum(a)));
        std::string name = a;
        const auto slash = name.find_last_of('/');
        if (slash != std::string::npos) name = name.substr(slash + 1);
        out << "artifact=" << name << " checksum=" << buf << "\n";
    }
    if (!out) throw std::runtime_error("manifest: write failed for " + path);
}

}  // namespace hrs
