#include "kge/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace kge {

void RunManifest::set(const std::string& key, const std::string& value) {
    auto it = index_.find(key);
    if (it != index_.end()) {
        entries_[it->second].second = value;
        return;
    }
    index_[key] = entries_.size();
    entries_.emplace_back(key, value);
}

void RunManifest::set(const std::string& key, double value) {
    set(key, format_double_roundtrip(value));
}

void RunManifest::set(const std::string& key, std::uint64_t value) {
    set(key, std::to_string(value));
}

void RunManifest::set_signed(const std::string& key, std::int64_t value) {
    set(key, std::to_string(value));
}

void RunManifest::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    for (const auto& [k, v] : entries_) out << k << '=' << v << '\n';
    if (!out) throw IoError("short write to " + path);
}

std::string format_double_roundtrip(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::map<std::string, std::string> parse_kv(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("kv line " + std::to_string(lineno) + ": missing '='");
        out[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return out;
}

std::map<std::string, std::string> load_kv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_kv(ss.str());
}

std::uint64_t file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string bytes = ss.str();
    return fnv1a64(bytes.data(), bytes.size());
}

}  // namespace kge
