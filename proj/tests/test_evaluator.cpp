#include <cmath>
#include <vector>

#include "doctest.h"
#include "kge/evaluator.hpp"
#include "kge/manifest.hpp"
#include "kge/model.hpp"
#include "support/oracles.hpp"

using namespace kge;
using namespace kge::testing;

namespace {

// score lookup over a tiny dense (s, r, o) cube
struct TableScorer {
    std::size_t ne, nr;
    std::vector<double> table;

    TableScorer(std::size_t ne_, std::size_t nr_, double fill = 0.0)
        : ne(ne_), nr(nr_), table(ne_ * nr_ * ne_, fill) {}

    double& at(std::uint32_t s, std::uint32_t r, std::uint32_t o) {
        return table[(s * nr + r) * ne + o];
    }
    double operator()(std::uint32_t s, std::uint32_t r, std::uint32_t o) const {
        return table[(s * nr + r) * ne + o];
    }
};

}  // namespace

TEST_CASE("unique argmax ranks first both raw and filtered") {
    TableScorer sc(4, 1);
    sc.at(0, 0, 1) = 10;
    sc.at(0, 0, 0) = 3;
    sc.at(0, 0, 2) = 2;
    sc.at(0, 0, 3) = 1;
    const RankRecord rec = rank_entities(sc, 4, Triple{0, 0, 1}, Direction::tail, nullptr);
    CHECK(rec.raw_rank == 1);
    CHECK(rec.filtered_rank == 1);
}

TEST_CASE("equal scores count above the truth") {
    // candidate scores over the five entities: [9, 7(truth), 7, 3, 1]
    TableScorer sc(5, 1);
    sc.at(0, 0, 0) = 9;
    sc.at(0, 0, 1) = 7;
    sc.at(0, 0, 2) = 7;
    sc.at(0, 0, 3) = 3;
    sc.at(0, 0, 4) = 1;
    const Triple query{0, 0, 1};

    const RankRecord rec = rank_entities(sc, 5, query, Direction::tail, nullptr);
    CHECK(rec.raw_rank == 3);  // one strictly above, one tied

    // removing both competitors leaves the truth on top
    TripleStore known;
    known.triples = {Triple{0, 0, 0}, Triple{0, 0, 2}};
    FilterIndex filter = build_filter_index({&known});
    const RankRecord filt = rank_entities(sc, 5, query, Direction::tail, &filter);
    CHECK(filt.raw_rank == 3);
    CHECK(filt.filtered_rank == 1);

    // removing only the strictly-higher candidate keeps the tie penalty
    TripleStore top_only;
    top_only.triples = {Triple{0, 0, 0}};
    FilterIndex filter2 = build_filter_index({&top_only});
    CHECK(rank_entities(sc, 5, query, Direction::tail, &filter2).filtered_rank == 2);
}

TEST_CASE("filtering removes the only higher-scored candidate") {
    TableScorer sc(5, 1);
    sc.at(0, 0, 0) = 9;
    sc.at(0, 0, 1) = 7;  // truth
    sc.at(0, 0, 2) = 3;
    sc.at(0, 0, 3) = 1;
    sc.at(0, 0, 4) = 0;
    TripleStore known;
    known.triples = {Triple{0, 0, 0}};
    FilterIndex filter = build_filter_index({&known});

    const RankRecord rec = rank_entities(sc, 5, Triple{0, 0, 1}, Direction::tail, &filter);
    CHECK(rec.raw_rank == 2);
    CHECK(rec.filtered_rank == 1);
}

TEST_CASE("head direction replaces the subject slot") {
    TableScorer sc(3, 1);
    sc.at(0, 0, 1) = 5;  // truth
    sc.at(1, 0, 1) = 9;
    sc.at(2, 0, 1) = 6;
    const RankRecord rec = rank_entities(sc, 3, Triple{0, 0, 1}, Direction::head, nullptr);
    CHECK(rec.direction == Direction::head);
    CHECK(rec.raw_rank == 3);
}

TEST_CASE("evaluate aggregates MRR and Hits over both directions") {
    // two test triples over 5 entities (one relation each so the score cells
    // stay independent); hand-crafted query ranks {1, 2, 4, 1}
    TableScorer sc(5, 2, -100.0);
    // triple A = (0,0,1): head candidates score below truth; tail rank 2
    sc.at(0, 0, 1) = 5;
    sc.at(1, 0, 1) = 1;
    sc.at(2, 0, 1) = 2;
    sc.at(3, 0, 1) = 3;
    sc.at(4, 0, 1) = 4;   // head rank 1
    sc.at(0, 0, 0) = 6;
    sc.at(0, 0, 2) = 1;
    sc.at(0, 0, 3) = 0;
    sc.at(0, 0, 4) = -1;  // tail rank 2 (one candidate above)
    // triple B = (2,1,3): head rank 4, tail rank 1
    sc.at(2, 1, 3) = 5;
    sc.at(0, 1, 3) = 8;
    sc.at(1, 1, 3) = 7;
    sc.at(4, 1, 3) = 6;   // three heads above truth
    sc.at(2, 1, 0) = 1;
    sc.at(2, 1, 1) = 2;
    sc.at(2, 1, 4) = 0;   // all tails below truth

    TripleStore test;
    test.split_tag = Split::test;
    test.triples = {Triple{0, 0, 1}, Triple{2, 1, 3}};

    const MetricReport rep = evaluate(sc, 5, test, nullptr);
    CHECK(rep.n_queries == 4);
    CHECK(rep.mrr_raw == doctest::Approx((1.0 + 0.5 + 0.25 + 1.0) / 4).epsilon(1e-15));
    CHECK(rep.hits_raw.at(1) == doctest::Approx(0.5));
    CHECK(rep.hits_raw.at(3) == doctest::Approx(0.75));
    CHECK(rep.hits_raw.at(10) == doctest::Approx(1.0));
    // no filter: filtered equals raw
    CHECK(rep.mrr_filtered == rep.mrr_raw);
    CHECK(rep.hits_filtered == rep.hits_raw);

    // hits@k nondecreasing in k
    double prev = 0;
    for (const auto& [k, v] : rep.hits_raw) {
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("a perfect model scores 1.0 everywhere") {
    TableScorer sc(6, 2, 0.0);
    TripleStore test;
    test.triples = {Triple{0, 0, 1}, Triple{2, 1, 3}, Triple{4, 0, 5}};
    for (const auto& t : test.triples) sc.at(t.s, t.r, t.o) = 100;

    const MetricReport rep = evaluate(sc, 6, test, nullptr);
    CHECK(rep.mrr_raw == 1.0);
    CHECK(rep.mrr_filtered == 1.0);
    for (const auto& [k, v] : rep.hits_raw) CHECK(v == 1.0);
    for (const auto& [k, v] : rep.hits_filtered) CHECK(v == 1.0);
}

TEST_CASE("evaluator matches the brute-force reference exactly on a random model") {
    const std::size_t ne = 50, nr = 3;
    Model model = make_model(ModelConfig{ModelKind::analogy, 8, 4}, ne, nr, 321);
    // spread the parameters out so scores are distinct
    for (auto& v : model.entities.data) v *= 50;
    for (auto& v : model.relations.data) v *= 50;

    Rng rng(17);
    std::uniform_int_distribution<std::uint32_t> ent(0, ne - 1);
    std::uniform_int_distribution<std::uint32_t> rel(0, nr - 1);
    TripleStore train, test;
    train.split_tag = Split::train;
    for (int i = 0; i < 150; i++) train.triples.push_back({ent(rng), rel(rng), ent(rng)});
    test.split_tag = Split::test;
    for (int i = 0; i < 40; i++) test.triples.push_back({ent(rng), rel(rng), ent(rng)});
    FilterIndex filter = build_filter_index({&train, &test});

    auto score = [&](std::uint32_t s, std::uint32_t r, std::uint32_t o) {
        return model.score(s, r, o);
    };
    const MetricReport fast = evaluate(score, ne, test, &filter);
    const MetricReport brute = brute_force_evaluate(score, ne, test, &filter, kDefaultHits);

    CHECK(fast.mrr_raw == brute.mrr_raw);
    CHECK(fast.mrr_filtered == brute.mrr_filtered);
    CHECK(fast.hits_raw == brute.hits_raw);
    CHECK(fast.hits_filtered == brute.hits_filtered);

    // filtered rank never exceeds raw rank
    for (const auto& t : test.triples) {
        for (Direction dir : {Direction::head, Direction::tail}) {
            const RankRecord rec = rank_entities(score, ne, t, dir, &filter);
            CHECK(rec.filtered_rank <= rec.raw_rank);
            CHECK(rec.filtered_rank >= 1);
        }
    }
}

TEST_CASE("metrics are invariant under strictly monotone score transforms") {
    const std::size_t ne = 30;
    Model model = make_model(ModelConfig{ModelKind::distmult, 6, 0}, ne, 2, 5);
    for (auto& v : model.entities.data) v *= 40;

    TripleStore test;
    Rng rng(18);
    std::uniform_int_distribution<std::uint32_t> ent(0, ne - 1);
    for (int i = 0; i < 25; i++) test.triples.push_back({ent(rng), 0, ent(rng)});
    FilterIndex filter = build_filter_index({&test});

    auto score = [&](std::uint32_t s, std::uint32_t r, std::uint32_t o) {
        return model.score(s, r, o);
    };
    auto affine = [&](std::uint32_t s, std::uint32_t r, std::uint32_t o) {
        return 2.0 * model.score(s, r, o) + 1.0;
    };
    const MetricReport a = evaluate(score, ne, test, &filter);
    const MetricReport b = evaluate(affine, ne, test, &filter);
    CHECK(a.mrr_raw == b.mrr_raw);
    CHECK(a.mrr_filtered == b.mrr_filtered);
    CHECK(a.hits_raw == b.hits_raw);
    CHECK(a.hits_filtered == b.hits_filtered);
}

TEST_CASE("evaluation leaves the model bitwise untouched") {
    Model model = make_model(ModelConfig{ModelKind::complex_, 8, 0}, 20, 2, 77);
    const std::vector<double> entities_before = model.entities.data;
    const std::vector<double> relations_before = model.relations.data;

    TripleStore test;
    test.triples = {Triple{0, 0, 1}, Triple{2, 1, 3}};
    FilterIndex filter = build_filter_index({&test});
    auto score = [&](std::uint32_t s, std::uint32_t r, std::uint32_t o) {
        return model.score(s, r, o);
    };
    evaluate(score, 20, test, &filter, kDefaultHits, 2);

    CHECK(model.entities.data == entities_before);
    CHECK(model.relations.data == relations_before);
}

TEST_CASE("multi-threaded evaluation agrees with single-threaded") {
    Model model = make_model(ModelConfig{ModelKind::analogy, 8, 4}, 40, 2, 31);
    TripleStore test;
    Rng rng(19);
    std::uniform_int_distribution<std::uint32_t> ent(0, 39);
    for (int i = 0; i < 30; i++) test.triples.push_back({ent(rng), 0, ent(rng)});
    auto score = [&](std::uint32_t s, std::uint32_t r, std::uint32_t o) {
        return model.score(s, r, o);
    };
    const MetricReport a = evaluate(score, 40, test, nullptr, kDefaultHits, 1);
    const MetricReport b = evaluate(score, 40, test, nullptr, kDefaultHits, 3);
    CHECK(a.mrr_raw == doctest::Approx(b.mrr_raw).epsilon(1e-12));
    CHECK(a.hits_raw == b.hits_raw);
}

TEST_CASE("proportion test: null case, worked value, degenerate input") {
    const ProportionTest null_case = proportion_test(0.94, 0.94, 5000);
    CHECK(null_case.z == 0.0);
    CHECK(!null_case.significant_at_5pct);

    const ProportionTest worked = proportion_test(0.947, 0.94, 5000);
    CHECK(worked.z == doctest::Approx(2.084).epsilon(1e-3));
    CHECK(worked.significant_at_5pct);

    // |z| grows without bound in the sample count
    CHECK(std::fabs(proportion_test(0.95, 0.94, 500000).z) >
          std::fabs(proportion_test(0.95, 0.94, 5000).z));

    CHECK_THROWS_AS(proportion_test(0.5, 0.0, 100), DimensionError);
    CHECK_THROWS_AS(proportion_test(0.5, 1.0, 100), DimensionError);
    CHECK_THROWS_AS(proportion_test(0.5, 0.5, 0), DimensionError);
}

TEST_CASE("report key=value output parses back to the same numbers") {
    MetricReport rep;
    rep.mrr_raw = 0.123456789012345;
    rep.mrr_filtered = 0.942;
    rep.hits_raw = {{1, 0.25}, {3, 0.5}, {10, 0.75}};
    rep.hits_filtered = {{1, 0.3}, {3, 0.6}, {10, 0.9}};
    rep.n_queries = 326;

    const auto kv = parse_kv(format_report_kv(rep));
    CHECK(std::stod(kv.at("mrr_raw")) == rep.mrr_raw);
    CHECK(std::stod(kv.at("mrr_filt")) == rep.mrr_filtered);
    CHECK(std::stod(kv.at("hits10_filt")) == 0.9);
    CHECK(std::stoull(kv.at("n_queries")) == 326);

    const std::string table = format_report_table(rep);
    CHECK(table.find("mrr") != std::string::npos);
    CHECK(table.find("hits@10") != std::string::npos);

    CHECK_THROWS_AS(parse_kv("no equals sign"), ParseError);
}

TEST_CASE("empty test set is rejected") {
    TableScorer sc(3, 1);
    TripleStore empty;
    CHECK_THROWS_AS(evaluate(sc, 3, empty, nullptr), DimensionError);
}
