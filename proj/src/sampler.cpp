#include "kge/sampler.hpp"

#include <algorithm>
#include <numeric>

namespace kge {

std::vector<CorruptMode> corrupt_modes_from_string(const std::string& spec) {
    std::vector<CorruptMode> modes;
    std::string tok;
    auto flush = [&] {
        if (tok.empty()) return;
        if (tok == "s" || tok == "subject") modes.push_back(CorruptMode::subject);
        else if (tok == "r" || tok == "relation") modes.push_back(CorruptMode::relation);
        else if (tok == "o" || tok == "object") modes.push_back(CorruptMode::object);
        else throw ParseError("unknown corrupt mode '" + tok + "'");
        tok.clear();
    };
    for (char c : spec) {
        if (c == ',') flush();
        else tok += c;
    }
    flush();
    if (modes.empty()) throw ParseError("empty corrupt mode list");
    return modes;
}

void SamplerConfig::validate() const {
    if (alpha < 1) throw SamplingError("alpha must be >= 1");
    if (corrupt_modes.empty()) throw SamplingError("corrupt_modes must be non-empty");
}

LabeledTriple corrupt(const LabeledTriple& positive, CorruptMode mode,
                      std::size_t num_entities, std::size_t num_relations, Rng& rng) {
    if (positive.y != +1) throw SamplingError("corrupt expects a positive triple");

    const std::size_t size = (mode == CorruptMode::relation) ? num_relations : num_entities;
    if (size < 2) throw SamplingError("cannot corrupt: slot vocabulary has fewer than 2 symbols");

    std::uint32_t original;
    switch (mode) {
        case CorruptMode::subject: original = positive.s; break;
        case CorruptMode::relation: original = positive.r; break;
        case CorruptMode::object: original = positive.o; break;
        default: throw SamplingError("bad corrupt mode");
    }

    std::uniform_int_distribution<std::uint32_t> full(0, static_cast<std::uint32_t>(size - 1));
    std::uint32_t pick = full(rng);
    if (pick == original) {
        // single resample over the remaining symbols
        std::uniform_int_distribution<std::uint32_t> rest(0, static_cast<std::uint32_t>(size - 2));
        const std::uint32_t q = rest(rng);
        pick = (q >= original) ? q + 1 : q;
    }

    LabeledTriple out = positive;
    out.y = -1;
    switch (mode) {
        case CorruptMode::subject: out.s = pick; break;
        case CorruptMode::relation: out.r = pick; break;
        case CorruptMode::object: out.o = pick; break;
    }
    return out;
}

std::vector<std::uint32_t> epoch_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    Rng rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    return order;
}

BatchStream::BatchStream(const TripleStore& store, const SamplerConfig& cfg,
                         std::size_t num_entities, std::size_t num_relations,
                         std::vector<std::uint32_t> order, std::uint64_t stream_seed,
                         const FilterIndex* filter)
    : store_(&store),
      cfg_(cfg),
      num_entities_(num_entities),
      num_relations_(num_relations),
      order_(std::move(order)),
      filter_(cfg.filter_false_negatives ? filter : nullptr),
      rng_(stream_seed) {
    cfg_.validate();
    if (cfg.filter_false_negatives && filter == nullptr)
        throw SamplingError("filter_false_negatives requires a FilterIndex");
}

BatchStream BatchStream::epoch(const TripleStore& store, const SamplerConfig& cfg,
                               std::size_t num_entities, std::size_t num_relations,
                               std::uint32_t epoch, const FilterIndex* filter) {
    if (store.triples.empty()) throw SamplingError("empty triple store");
    auto order = epoch_permutation(store.triples.size(),
                                   mix_seed(cfg.seed, 0xa11ce, epoch));
    return BatchStream(store, cfg, num_entities, num_relations, std::move(order),
                       mix_seed(cfg.seed, 0xb0b, epoch), filter);
}

LabeledTriple BatchStream::make_negative(const LabeledTriple& pos, CorruptMode mode) {
    if (!filter_) return corrupt(pos, mode, num_entities_, num_relations_, rng_);

    for (int attempt = 0; attempt < 64; attempt++) {
        LabeledTriple neg = corrupt(pos, mode, num_entities_, num_relations_, rng_);
        if (!filter_->contains(neg.s, neg.r, neg.o)) return neg;
    }
    // rejection keeps colliding; walk candidates from a random start instead
    const std::size_t size = (mode == CorruptMode::relation) ? num_relations_ : num_entities_;
    std::uniform_int_distribution<std::uint32_t> start_dist(0, static_cast<std::uint32_t>(size - 1));
    const std::uint32_t start = start_dist(rng_);
    for (std::size_t i = 0; i < size; i++) {
        const auto cand = static_cast<std::uint32_t>((start + i) % size);
        LabeledTriple neg = pos;
        neg.y = -1;
        switch (mode) {
            case CorruptMode::subject: neg.s = cand; break;
            case CorruptMode::relation: neg.r = cand; break;
            case CorruptMode::object: neg.o = cand; break;
        }
        const bool unchanged = neg.s == pos.s && neg.r == pos.r && neg.o == pos.o;
        if (unchanged) continue;
        if (!filter_->contains(neg.s, neg.r, neg.o)) return neg;
    }
    throw SamplingError("every candidate corruption is a known true triple");
}

std::optional<LabeledTriple> BatchStream::next() {
    while (pos_ < order_.size()) {
        const Triple& t = store_->triples[order_[pos_]];
        LabeledTriple positive{t.s, t.r, t.o, +1};
        if (!positive_emitted_) {
            positive_emitted_ = true;
            negatives_emitted_ = 0;
            return positive;
        }
        if (negatives_emitted_ < cfg_.alpha) {
            const CorruptMode mode =
                cfg_.corrupt_modes[negatives_emitted_ % cfg_.corrupt_modes.size()];
            negatives_emitted_++;
            return make_negative(positive, mode);
        }
        pos_++;
        positive_emitted_ = false;
    }
    return std::nullopt;
}

}  // namespace kge
