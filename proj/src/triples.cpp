#include "kge/triples.hpp"

#include <algorithm>
#include <fstream>

namespace kge {

const char* split_name(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::valid: return "valid";
        case Split::test: return "test";
    }
    return "?";
}

Split split_from_name(const std::string& name) {
    if (name == "train") return Split::train;
    if (name == "valid") return Split::valid;
    if (name == "test") return Split::test;
    throw ParseError("unknown split name '" + name + "'");
}

namespace {

struct TripleHash {
    std::size_t operator()(const Triple& t) const {
        return mix_seed(t.s, t.r, t.o);
    }
};

std::uint32_t resolve(const std::string& name, bool is_entity, Vocab& vocab,
                      VocabMode mode, const std::string& path, std::size_t lineno) {
    if (mode == VocabMode::build)
        return is_entity ? vocab.add_entity(name) : vocab.add_relation(name);
    auto id = is_entity ? vocab.entity_id(name) : vocab.relation_id(name);
    if (!id)
        throw VocabError(path + ":" + std::to_string(lineno) + ": unknown " +
                         (is_entity ? "entity" : "relation") + " '" + name + "'");
    return *id;
}

}  // namespace

TripleStore load_triples(const std::string& path, Vocab& vocab, const LoadOptions& opts,
                         std::size_t* duplicates_dropped) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);

    TripleStore store;
    store.split_tag = opts.split;
    std::unordered_map<Triple, std::size_t, TripleHash> seen;  // triple -> first line
    std::size_t dropped = 0;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        const auto t3 = t2 == std::string::npos ? std::string::npos : line.find('\t', t2 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos || t3 != std::string::npos)
            throw ParseError(path + ":" + std::to_string(lineno) +
                             ": expected 3 tab-separated fields");

        Triple t;
        t.s = resolve(line.substr(0, t1), true, vocab, opts.mode, path, lineno);
        t.r = resolve(line.substr(t1 + 1, t2 - t1 - 1), false, vocab, opts.mode, path, lineno);
        t.o = resolve(line.substr(t2 + 1), true, vocab, opts.mode, path, lineno);

        auto [it, inserted] = seen.emplace(t, lineno);
        if (!inserted) {
            if (!opts.allow_duplicates)
                throw ParseError(path + ":" + std::to_string(lineno) +
                                 ": duplicate triple (first seen at line " +
                                 std::to_string(it->second) + ")");
            dropped++;
            continue;
        }
        store.triples.push_back(t);
    }
    if (duplicates_dropped) *duplicates_dropped = dropped;
    return store;
}

void save_triples(const std::string& path, const TripleStore& store, const Vocab& vocab) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    for (const auto& t : store.triples) {
        out << vocab.entity_name(t.s) << '\t' << vocab.relation_name(t.r) << '\t'
            << vocab.entity_name(t.o) << '\n';
    }
    if (!out) throw IoError("short write to " + path);
}

bool FilterIndex::contains(std::uint32_t s, std::uint32_t r, std::uint32_t o) const {
    auto it = tails_.find(key(s, r));
    if (it == tails_.end()) return false;
    return std::binary_search(it->second.begin(), it->second.end(), o);
}

std::span<const std::uint32_t> FilterIndex::tails(std::uint32_t s, std::uint32_t r) const {
    auto it = tails_.find(key(s, r));
    if (it == tails_.end()) return {};
    return it->second;
}

std::span<const std::uint32_t> FilterIndex::heads(std::uint32_t r, std::uint32_t o) const {
    auto it = heads_.find(key(r, o));
    if (it == heads_.end()) return {};
    return it->second;
}

FilterIndex build_filter_index(std::span<const TripleStore* const> stores) {
    FilterIndex idx;
    for (const TripleStore* store : stores) {
        idx.source_splits_.push_back(store->split_tag);
        for (const auto& t : store->triples) {
            idx.tails_[FilterIndex::key(t.s, t.r)].push_back(t.o);
            idx.heads_[FilterIndex::key(t.r, t.o)].push_back(t.s);
        }
    }
    std::size_t total = 0;
    for (auto& [k, v] : idx.tails_) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        total += v.size();
    }
    for (auto& [k, v] : idx.heads_) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    idx.size_ = total;
    return idx;
}

FilterIndex build_filter_index(std::initializer_list<const TripleStore*> stores) {
    return build_filter_index(std::span<const TripleStore* const>(stores.begin(), stores.size()));
}

}  // namespace kge
