#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "kge/common.hpp"
#include "kge/triples.hpp"

namespace kge {

enum class Direction { head, tail };

struct RankRecord {
    Triple triple;
    Direction direction = Direction::tail;
    std::uint32_t raw_rank = 1;
    std::uint32_t filtered_rank = 1;
};

struct MetricReport {
    double mrr_raw = 0;
    double mrr_filtered = 0;
    std::map<int, double> hits_raw;       // k -> proportion
    std::map<int, double> hits_filtered;
    std::size_t n_queries = 0;
};

inline constexpr int kDefaultHits[] = {1, 3, 10};

// Ranks the true entity among all |E| candidate replacements of the chosen
// slot. Ties are counted pessimistically: a candidate with an equal score
// ranks above the truth, so constant-score models cannot rank well. The
// filtered rank drops candidates (other than the truth) present in `filter`.
template <class ScoreFn>
RankRecord rank_entities(const ScoreFn& score, std::size_t num_entities, const Triple& t,
                         Direction direction, const FilterIndex* filter) {
    const double true_score = score(t.s, t.r, t.o);
    const std::uint32_t true_entity = direction == Direction::head ? t.s : t.o;

    RankRecord rec;
    rec.triple = t;
    rec.direction = direction;
    std::uint32_t raw = 1, filtered = 1;
    for (std::uint32_t c = 0; c < num_entities; c++) {
        if (c == true_entity) continue;
        const std::uint32_t cs = direction == Direction::head ? c : t.s;
        const std::uint32_t co = direction == Direction::tail ? c : t.o;
        const double sc = score(cs, t.r, co);
        if (sc >= true_score) {
            raw++;
            if (!filter || !filter->contains(cs, t.r, co)) filtered++;
        }
    }
    rec.raw_rank = raw;
    rec.filtered_rank = filtered;
    return rec;
}

// Two queries per test triple (head first, then tail); MRR is the mean of
// 1/rank over all queries, Hits@k the fraction with rank <= k.
template <class ScoreFn>
MetricReport evaluate(const ScoreFn& score, std::size_t num_entities, const TripleStore& test,
                      const FilterIndex* filter,
                      std::span<const int> hits_ks = kDefaultHits, unsigned threads = 1) {
    if (test.triples.empty()) throw DimensionError("evaluate: empty test set");
    if (threads < 1) threads = 1;

    struct Partial {
        double rr_raw = 0, rr_filt = 0;
        std::vector<std::size_t> hit_raw, hit_filt;
    };
    const std::size_t n = test.triples.size();
    std::vector<Partial> partials(threads);

    auto run_chunk = [&](unsigned tid) {
        Partial& p = partials[tid];
        p.hit_raw.assign(hits_ks.size(), 0);
        p.hit_filt.assign(hits_ks.size(), 0);
        const std::size_t lo = n * tid / threads;
        const std::size_t hi = n * (tid + 1) / threads;
        for (std::size_t i = lo; i < hi; i++) {
            for (Direction dir : {Direction::head, Direction::tail}) {
                const RankRecord rec =
                    rank_entities(score, num_entities, test.triples[i], dir, filter);
                p.rr_raw += 1.0 / rec.raw_rank;
                p.rr_filt += 1.0 / rec.filtered_rank;
                for (std::size_t k = 0; k < hits_ks.size(); k++) {
                    p.hit_raw[k] += rec.raw_rank <= static_cast<std::uint32_t>(hits_ks[k]);
                    p.hit_filt[k] += rec.filtered_rank <= static_cast<std::uint32_t>(hits_ks[k]);
                }
            }
        }
    };

    if (threads == 1) {
        run_chunk(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned tid = 1; tid < threads; tid++) pool.emplace_back(run_chunk, tid);
        run_chunk(0);
        for (auto& th : pool) th.join();
    }

    MetricReport report;
    report.n_queries = 2 * n;
    double rr_raw = 0, rr_filt = 0;
    std::vector<std::size_t> hit_raw(hits_ks.size(), 0), hit_filt(hits_ks.size(), 0);
    for (const auto& p : partials) {
        rr_raw += p.rr_raw;
        rr_filt += p.rr_filt;
        for (std::size_t k = 0; k < hits_ks.size(); k++) {
            hit_raw[k] += p.hit_raw[k];
            hit_filt[k] += p.hit_filt[k];
        }
    }
    const auto nq = static_cast<double>(report.n_queries);
    report.mrr_raw = rr_raw / nq;
    report.mrr_filtered = rr_filt / nq;
    for (std::size_t k = 0; k < hits_ks.size(); k++) {
        report.hits_raw[hits_ks[k]] = static_cast<double>(hit_raw[k]) / nq;
        report.hits_filtered[hits_ks[k]] = static_cast<double>(hit_filt[k]) / nq;
    }
    return report;
}

struct ProportionTest {
    double z = 0;
    bool significant_at_5pct = false;
};

// One-sample two-sided proportion test at the 5% level (|z| > 1.96).
ProportionTest proportion_test(double p_hat, double p0, std::size_t num);

std::string format_report_table(const MetricReport& report);
std::string format_report_kv(const MetricReport& report);

}  // namespace kge
