#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "kge/common.hpp"

namespace kge {

// Flat key=value record of a run: resolved configuration, dataset checksums,
// seed, timings and final metrics. Order-preserving on write.
class RunManifest {
public:
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void set(const std::string& key, std::uint64_t value);
    void set_signed(const std::string& key, std::int64_t value);

    const std::vector<std::pair<std::string, std::string>>& entries() const {
        return entries_;
    }

    void save(const std::string& path) const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
    std::map<std::string, std::size_t> index_;
};

std::string format_double_roundtrip(double v);  // %.17g

std::map<std::string, std::string> parse_kv(const std::string& text);
std::map<std::string, std::string> load_kv(const std::string& path);

std::uint64_t file_checksum(const std::string& path);  // fnv1a64 over raw bytes

}  // namespace kge
