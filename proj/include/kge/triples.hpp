#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "kge/common.hpp"
#include "kge/vocab.hpp"

namespace kge {

struct Triple {
    std::uint32_t s = 0;
    std::uint32_t r = 0;
    std::uint32_t o = 0;

    bool operator==(const Triple&) const = default;
};

enum class Split { train, valid, test };

const char* split_name(Split s);
Split split_from_name(const std::string& name);

// Integer-encoded triples of one dataset split. Immutable after loading;
// safe for concurrent reads.
struct TripleStore {
    std::vector<Triple> triples;
    Split split_tag = Split::train;
};

enum class VocabMode { build, frozen };

struct LoadOptions {
    VocabMode mode = VocabMode::build;
    bool allow_duplicates = false;  // true: drop repeats instead of erroring
    Split split = Split::train;
};

// Reads "<subject>\t<relation>\t<object>\n" lines. In build mode new names
// get fresh vocabulary ids; in frozen mode unknown names raise VocabError.
// Duplicate lines within the file raise ParseError unless allow_duplicates,
// in which case they are dropped and counted into *duplicates_dropped.
TripleStore load_triples(const std::string& path, Vocab& vocab,
                         const LoadOptions& opts = {},
                         std::size_t* duplicates_dropped = nullptr);

void save_triples(const std::string& path, const TripleStore& store, const Vocab& vocab);

// Known-triple index over a union of splits, used by filtered evaluation and
// optional false-negative-free sampling. Immutable after construction.
class FilterIndex {
public:
    bool contains(std::uint32_t s, std::uint32_t r, std::uint32_t o) const;
    std::span<const std::uint32_t> tails(std::uint32_t s, std::uint32_t r) const;
    std::span<const std::uint32_t> heads(std::uint32_t r, std::uint32_t o) const;
    const std::vector<Split>& source_splits() const { return source_splits_; }
    std::size_t num_triples() const { return size_; }

    friend FilterIndex build_filter_index(std::span<const TripleStore* const> stores);

private:
    static std::uint64_t key(std::uint32_t a, std::uint32_t b) {
        return (static_cast<std::uint64_t>(a) << 32) | b;
    }

    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> tails_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> heads_;
    std::vector<Split> source_splits_;
    std::size_t size_ = 0;
};

// All stores must share one vocabulary. The index holds exactly the union of
// their triples.
FilterIndex build_filter_index(std::span<const TripleStore* const> stores);
FilterIndex build_filter_index(std::initializer_list<const TripleStore*> stores);

}  // namespace kge
