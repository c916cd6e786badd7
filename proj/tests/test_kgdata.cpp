#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "kge/triples.hpp"
#include "kge/vocab.hpp"
#include "support/temp_dir.hpp"

using namespace kge;
using kge::testing::TempDir;

TEST_CASE("vocab ids are dense, stable and round-trip through lookups") {
    Vocab v;
    CHECK(v.add_entity("a") == 0);
    CHECK(v.add_entity("b") == 1);
    CHECK(v.add_entity("a") == 0);  // repeat keeps the first id
    CHECK(v.add_relation("r") == 0);

    CHECK(v.entity_id("b") == 1);
    CHECK(v.entity_name(*v.entity_id("b")) == "b");
    CHECK(!v.entity_id("zzz").has_value());
    CHECK_THROWS_AS(v.entity_name(42), VocabError);
}

TEST_CASE("vocab text dumps round-trip") {
    Vocab v;
    v.add_entity("alpha");
    v.add_entity("beta with space");
    v.add_relation("likes");

    Vocab back = Vocab::from_text(v.entities_text(), v.relations_text());
    CHECK(back == v);

    TempDir dir;
    v.save(dir.file("e.tsv"), dir.file("r.tsv"));
    CHECK(Vocab::load(dir.file("e.tsv"), dir.file("r.tsv")) == v);

    CHECK_THROWS_AS(Vocab::from_text("1\tskipped-zero\n", ""), ParseError);
    CHECK_THROWS_AS(Vocab::from_text("0 no-tab\n", ""), ParseError);
}

TEST_CASE("load_triples builds vocab and encodes lines in order") {
    TempDir dir;
    const auto path = dir.write("train.txt", "a\tr1\tb\nb\tr1\tc\na\tr2\tc\n");
    Vocab vocab;
    TripleStore store = load_triples(path, vocab);

    REQUIRE(store.triples.size() == 3);
    CHECK(vocab.num_entities() == 3);
    CHECK(vocab.num_relations() == 2);
    CHECK(store.triples[0] == Triple{0, 0, 1});
    CHECK(store.triples[1] == Triple{1, 0, 2});
    CHECK(store.triples[2] == Triple{0, 1, 2});
}

TEST_CASE("empty file gives empty store and unchanged vocab") {
    TempDir dir;
    Vocab vocab;
    vocab.add_entity("pre");
    TripleStore store = load_triples(dir.write("empty.txt", ""), vocab);
    CHECK(store.triples.empty());
    CHECK(vocab.num_entities() == 1);
}

TEST_CASE("malformed lines report the line number") {
    TempDir dir;
    Vocab vocab;
    const auto two_fields = dir.write("bad.txt", "a\tr\tb\nc\td\n");
    CHECK_THROWS_WITH_AS(static_cast<void>(load_triples(two_fields, vocab)),
                         doctest::Contains(":2:"), ParseError);
    const auto four_fields = dir.write("bad4.txt", "a\tr\tb\tc\n");
    CHECK_THROWS_AS(static_cast<void>(load_triples(four_fields, vocab)), ParseError);
}

TEST_CASE("duplicate triples error by default, listing the line") {
    TempDir dir;
    const auto path = dir.write("dup.txt", "a\tr\tb\nb\tr\tc\na\tr\tb\n");
    Vocab vocab;
    CHECK_THROWS_WITH_AS(static_cast<void>(load_triples(path, vocab)),
                         doctest::Contains(":3:"), ParseError);

    Vocab vocab2;
    LoadOptions opts;
    opts.allow_duplicates = true;
    std::size_t dropped = 0;
    TripleStore store = load_triples(path, vocab2, opts, &dropped);
    CHECK(store.triples.size() == 2);
    CHECK(dropped == 1);
}

TEST_CASE("frozen vocab mode rejects unknown names loudly") {
    TempDir dir;
    Vocab vocab;
    static_cast<void>(load_triples(dir.write("train.txt", "a\tr\tb\n"), vocab));

    LoadOptions frozen;
    frozen.mode = VocabMode::frozen;
    CHECK_NOTHROW(
        static_cast<void>(load_triples(dir.write("ok.txt", "b\tr\ta\n"), vocab, frozen)));
    CHECK_THROWS_WITH_AS(
        static_cast<void>(load_triples(dir.write("unk.txt", "a\tr\tmystery\n"), vocab, frozen)),
        doctest::Contains("mystery"), VocabError);
    CHECK(vocab.num_entities() == 2);  // frozen load added nothing
}

TEST_CASE("triple files round-trip through save and reload") {
    TempDir dir;
    Vocab vocab;
    const auto path = dir.write("t.txt", "a\tr1\tb\nb\tr2\tc\nc\tr1\ta\nb\tr1\ta\n");
    TripleStore store = load_triples(path, vocab);

    save_triples(dir.file("back.txt"), store, vocab);
    Vocab vocab2;
    TripleStore store2 = load_triples(dir.file("back.txt"), vocab2);

    REQUIRE(store2.triples.size() == store.triples.size());
    for (std::size_t i = 0; i < store.triples.size(); i++) {
        const Triple& t1 = store.triples[i];
        const Triple& t2 = store2.triples[i];
        CHECK(vocab.entity_name(t1.s) == vocab2.entity_name(t2.s));
        CHECK(vocab.relation_name(t1.r) == vocab2.relation_name(t2.r));
        CHECK(vocab.entity_name(t1.o) == vocab2.entity_name(t2.o));
    }
}

TEST_CASE("filter index: singleton triple") {
    TripleStore store;
    store.triples = {Triple{0, 0, 1}};
    FilterIndex idx = build_filter_index({&store});

    CHECK(idx.contains(0, 0, 1));
    CHECK(!idx.contains(0, 0, 0));
    REQUIRE(idx.tails(0, 0).size() == 1);
    CHECK(idx.tails(0, 0)[0] == 1);
    REQUIRE(idx.heads(0, 1).size() == 1);
    CHECK(idx.heads(0, 1)[0] == 0);
    CHECK(idx.num_triples() == 1);
}

TEST_CASE("filter index: shared (s,r) accumulates tails; empty input is empty") {
    TripleStore store;
    store.triples = {Triple{2, 1, 3}, Triple{2, 1, 5}};
    FilterIndex idx = build_filter_index({&store});
    CHECK(idx.tails(2, 1).size() == 2);

    FilterIndex empty = build_filter_index(std::initializer_list<const TripleStore*>{});
    CHECK(empty.num_triples() == 0);
    CHECK(!empty.contains(0, 0, 0));
}

TEST_CASE("filter index agrees with a linear scan on random stores") {
    Rng rng(123);
    std::uniform_int_distribution<std::uint32_t> ent(0, 39);
    std::uniform_int_distribution<std::uint32_t> rel(0, 4);

    TripleStore a, b;
    a.split_tag = Split::train;
    b.split_tag = Split::valid;
    for (int i = 0; i < 400; i++) a.triples.push_back({ent(rng), rel(rng), ent(rng)});
    for (int i = 0; i < 200; i++) b.triples.push_back({ent(rng), rel(rng), ent(rng)});

    FilterIndex idx = build_filter_index({&a, &b});
    REQUIRE(idx.source_splits().size() == 2);

    auto scan = [&](std::uint32_t s, std::uint32_t r, std::uint32_t o) {
        auto hit = [&](const TripleStore& st) {
            return std::any_of(st.triples.begin(), st.triples.end(),
                               [&](const Triple& t) { return t == Triple{s, r, o}; });
        };
        return hit(a) || hit(b);
    };

    for (int i = 0; i < 3000; i++) {
        const std::uint32_t s = ent(rng), r = rel(rng), o = ent(rng);
        CHECK(idx.contains(s, r, o) == scan(s, r, o));
    }

    // membership views stay mutually consistent
    for (const auto& t : a.triples) {
        auto tails = idx.tails(t.s, t.r);
        CHECK(std::binary_search(tails.begin(), tails.end(), t.o));
        auto heads = idx.heads(t.r, t.o);
        CHECK(std::binary_search(heads.begin(), heads.end(), t.s));
    }
}
