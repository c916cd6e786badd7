#include "support/synthetic_kg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace kge::testing {

// Entities sit in num_clusters noisy clusters whose centers form the orbit of
// a rotation generator R (block angles 2*pi*w_j/C, identity on the scalar
// dims). Relations are planted as powers R^{k_r}: same packed layout,
// mutually commuting, and strongly asymmetric. A matched pair (s in cluster
// t, o in cluster t - k_r) scores near |center|^2 = 1 while every mismatch
// stays below ~0.2, so the top-scoring slice of triples is separated from
// the rest by a wide margin and is recovered exactly by a largest-gap cut.
SyntheticKg make_synthetic_kg(const SyntheticKgOptions& opts) {
    const std::size_t ne = opts.num_entities;
    const std::size_t nr = opts.num_relations;
    const std::uint32_t m = opts.dim;
    const std::uint32_t n = opts.num_scalars;
    const std::size_t pairs = (m - n) / 2;
    const std::size_t C = opts.num_clusters;

    Rng rng(mix_seed(opts.seed, 0x5e7));
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    std::normal_distribution<double> gauss(0.0, 1.0);

    SyntheticKg kg;
    kg.planted.config = ModelConfig{ModelKind::analogy, m, n};
    kg.planted.config.validate();
    kg.planted.entities = EntityTable(ne, m);
    kg.planted.relations = RelationTable(nr, m);

    // block frequencies of the generator; incommensurate so mismatched
    // clusters decohere
    static const std::uint32_t kFrequencies[] = {1, 2, 3, 5, 7, 9, 11, 13};
    static const std::uint32_t kShifts[] = {1, 2, 3, 5, 7, 9, 11, 13};

    // relation r rotates block j by 2*pi * w_j * k_r / C (scalar dims fixed)
    std::vector<std::uint32_t> shifts(nr);
    for (std::size_t r = 0; r < nr; r++) {
        shifts[r] = kShifts[r % std::size(kShifts)] % C;
        if (shifts[r] == 0 || 2 * shifts[r] == C) shifts[r] = 1;  // keep asymmetric
        auto row = kg.planted.relations.row(r);
        for (std::uint32_t i = 0; i < n; i++) row[i] = 1.0;
        for (std::size_t j = 0; j < pairs; j++) {
            const double theta = 2.0 * M_PI * kFrequencies[j % std::size(kFrequencies)] *
                                 shifts[r] / static_cast<double>(C);
            row[n + 2 * j] = std::cos(theta);
            row[n + 2 * j + 1] = std::sin(theta);
        }
    }

    // cluster centers: orbit of the generator applied to a seed supported on
    // the rotating dims, one random phase per block
    std::vector<std::vector<double>> centers(C, std::vector<double>(m, 0.0));
    const double block_norm = pairs ? 1.0 / std::sqrt(static_cast<double>(pairs)) : 0.0;
    std::vector<double> seed_phases(pairs);
    for (auto& p : seed_phases) p = phase(rng);
    for (std::size_t t = 0; t < C; t++) {
        for (std::size_t j = 0; j < pairs; j++) {
            const double theta = seed_phases[j] +
                                 2.0 * M_PI * kFrequencies[j % std::size(kFrequencies)] *
                                     static_cast<double>(t) / static_cast<double>(C);
            centers[t][n + 2 * j] = block_norm * std::cos(theta);
            centers[t][n + 2 * j + 1] = block_norm * std::sin(theta);
        }
    }

    const double noise = opts.cluster_noise / std::sqrt(static_cast<double>(m));
    for (std::size_t e = 0; e < ne; e++) {
        auto row = kg.planted.entities.row(e);
        const auto& mu = centers[e % C];
        for (std::uint32_t i = 0; i < m; i++) row[i] = mu[i] + noise * gauss(rng);
    }

    // positives: the top-scoring slice per relation, cut at the largest score
    // gap (which sits on the matched/mismatched margin by construction)
    std::vector<Triple> positives;
    std::vector<std::pair<double, std::uint64_t>> scored;
    scored.reserve(ne * (ne - 1));
    for (std::uint32_t r = 0; r < nr; r++) {
        scored.clear();
        for (std::uint32_t s = 0; s < ne; s++) {
            for (std::uint32_t o = 0; o < ne; o++) {
                if (s == o) continue;
                scored.emplace_back(kg.planted.score(s, r, o),
                                    (static_cast<std::uint64_t>(s) << 32) | o);
            }
        }
        std::sort(scored.begin(), scored.end(), std::greater<>());
        const std::size_t lo = std::max<std::size_t>(1, scored.size() / 100);
        const std::size_t hi = (scored.size() * 3) / 5;
        std::size_t cut = lo;
        double best_gap = -1;
        for (std::size_t i = lo; i < hi; i++) {
            const double gap = scored[i - 1].first - scored[i].first;
            if (gap > best_gap) {
                best_gap = gap;
                cut = i;
            }
        }
        for (std::size_t i = 0; i < cut; i++) {
            positives.push_back(Triple{static_cast<std::uint32_t>(scored[i].second >> 32), r,
                                       static_cast<std::uint32_t>(scored[i].second)});
        }
    }

    std::shuffle(positives.begin(), positives.end(), rng);
    const auto n_test = static_cast<std::size_t>(
        std::floor(opts.holdout_fraction * static_cast<double>(positives.size())));
    kg.test.split_tag = Split::test;
    kg.test.triples.assign(positives.begin(), positives.begin() + n_test);
    kg.train.split_tag = Split::train;
    kg.train.triples.assign(positives.begin() + n_test, positives.end());
    return kg;
}

}  // namespace kge::testing
