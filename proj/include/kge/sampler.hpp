#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kge/common.hpp"
#include "kge/triples.hpp"

namespace kge {

struct LabeledTriple {
    std::uint32_t s = 0;
    std::uint32_t r = 0;
    std::uint32_t o = 0;
    std::int8_t y = +1;  // +1 positive, -1 corrupted

    bool operator==(const LabeledTriple&) const = default;
};

enum class CorruptMode { subject, relation, object };

std::vector<CorruptMode> corrupt_modes_from_string(const std::string& spec);  // "s,r,o"

struct SamplerConfig {
    std::uint32_t alpha = 3;  // negatives per positive
    std::vector<CorruptMode> corrupt_modes = {CorruptMode::subject, CorruptMode::relation,
                                              CorruptMode::object};
    bool filter_false_negatives = false;
    std::uint64_t seed = 0;

    void validate() const;
};

// Replaces one slot with a uniform random index from the matching vocabulary;
// a draw hitting the original index is resampled once from the remaining
// symbols, so the result always differs in the corrupted slot.
LabeledTriple corrupt(const LabeledTriple& positive, CorruptMode mode,
                      std::size_t num_entities, std::size_t num_relations, Rng& rng);

std::vector<std::uint32_t> epoch_permutation(std::size_t n, std::uint64_t seed);

// Yields each positive of `order` once (y=+1) followed by alpha negatives,
// cycling round-robin over corrupt_modes. With a filter attached and
// filter_false_negatives set, no emitted negative is a known true triple.
class BatchStream {
public:
    BatchStream(const TripleStore& store, const SamplerConfig& cfg,
                std::size_t num_entities, std::size_t num_relations,
                std::vector<std::uint32_t> order, std::uint64_t stream_seed,
                const FilterIndex* filter = nullptr);

    // Full-epoch stream: fresh permutation of all positives per (seed, epoch).
    static BatchStream epoch(const TripleStore& store, const SamplerConfig& cfg,
                             std::size_t num_entities, std::size_t num_relations,
                             std::uint32_t epoch, const FilterIndex* filter = nullptr);

    std::optional<LabeledTriple> next();

private:
    LabeledTriple make_negative(const LabeledTriple& pos, CorruptMode mode);

    const TripleStore* store_;
    SamplerConfig cfg_;
    std::size_t num_entities_, num_relations_;
    std::vector<std::uint32_t> order_;
    const FilterIndex* filter_;
    Rng rng_;
    std::size_t pos_ = 0;
    std::uint32_t negatives_emitted_ = 0;
    bool positive_emitted_ = false;
};

}  // namespace kge
