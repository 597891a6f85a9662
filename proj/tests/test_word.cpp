#include <doctest.h>

#include <algorithm>
#include <vector>

#include "sbl/random_measures.hpp"
#include "sbl/rng.hpp"
#include "sbl/word.hpp"

using namespace sbl;

namespace {

std::vector<SymbolId> materialize(const Word& w) {
    std::vector<SymbolId> out;
    out.reserve(w.length());
    for (std::uint64_t i = 0; i < w.length(); ++i) out.push_back(w.letter_at(i));
    return out;
}

// Quadratic reference matcher, overlapping starts.
std::uint64_t naive_count(const Word& g, const Word& p) {
    if (p.empty() || p.length() > g.length()) return 0;
    auto gs = materialize(g);
    auto ps = materialize(p);
    std::uint64_t n = 0;
    for (std::size_t i = 0; i + ps.size() <= gs.size(); ++i) {
        if (std::equal(ps.begin(), ps.end(), gs.begin() + i)) ++n;
    }
    return n;
}

Word word_of_bits(const Alphabet& ab, std::uint32_t bits, std::uint32_t len) {
    std::vector<SymbolId> ls;
    for (std::uint32_t i = 0; i < len; ++i) ls.push_back((bits >> i) & 1u);
    (void)ab;
    return Word::from_letters(std::move(ls));
}

} // namespace

TEST_CASE("alphabet interning") {
    Alphabet ab;
    SymbolId a = ab.intern("a");
    SymbolId b = ab.intern("b");
    CHECK(a != b);
    CHECK(ab.intern("a") == a);
    CHECK(ab.find("b").value() == b);
    CHECK(!ab.find("zz").has_value());
    CHECK(ab.name(a) == "a");
    CHECK(ab.size() == 2);
    CHECK_THROWS(ab.intern(""));
    CHECK_THROWS(ab.intern("x.y"));
    CHECK_THROWS(ab.intern("x^2"));
    CHECK_THROWS(ab.intern("a b"));
    CHECK_THROWS(ab.intern("x:y"));
    CHECK_THROWS(ab.intern("x,y"));
}

TEST_CASE("word construction and canonical representation") {
    Word e;
    CHECK(e.empty());
    CHECK(e.length() == 0);

    Word small = Word::repeated(0, 12);
    CHECK(!small.run_encoded());
    CHECK(small.length() == 12);

    Word big = Word::repeated(0, Word::kMaterializeLimit + 1);
    CHECK(big.run_encoded());
    CHECK(big.letter_at(Word::kMaterializeLimit) == 0);

    // from_runs below the limit materializes, so the two constructions agree
    Word via_runs = Word::from_runs({{0, 5}, {1, 2}, {0, 1}});
    Word via_letters = Word::from_letters({0, 0, 0, 0, 0, 1, 1, 0});
    CHECK(via_runs == via_letters);
    CHECK(via_runs.hash() == via_letters.hash());
    CHECK(!via_runs.run_encoded());

    // adjacent equal runs collapse to canonical maximal runs
    Word glued = Word::from_runs({{0, 300}, {0, 300}});
    CHECK(glued == Word::repeated(0, 600));
    CHECK(glued.runs().size() == 1);
}

TEST_CASE("concat merges runs across the seam") {
    Word x = Word::repeated(0, 400);
    Word y = Word::repeated(0, 400);
    Word xy = concat(x, y);
    CHECK(xy.length() == 800);
    CHECK(xy.run_encoded());
    CHECK(xy.runs().size() == 1);
    CHECK(xy == Word::repeated(0, 800));

    Word z = concat(xy, Word::single(1));
    CHECK(z.length() == 801);
    CHECK(z.runs().size() == 2);
    CHECK(concat(Word(), z) == z);
    CHECK(concat(z, Word()) == z);
}

TEST_CASE("shortlex order") {
    Alphabet ab({"a", "b"});
    // shorter first, then lexicographic by symbol id
    std::vector<Word> expect = {
        parse_word(ab, ""),    parse_word(ab, "a"),   parse_word(ab, "b"),
        parse_word(ab, "a.a"), parse_word(ab, "a.b"), parse_word(ab, "b.a"),
        parse_word(ab, "b.b"), parse_word(ab, "a.a.a"),
    };
    std::vector<Word> shuffled = {expect[7], expect[3], expect[0], expect[5],
                                  expect[1], expect[6], expect[2], expect[4]};
    std::sort(shuffled.begin(), shuffled.end());
    CHECK(shuffled == expect);

    // long mixed-representation comparisons stay consistent
    Word big_a = Word::repeated(0, 700);
    Word big_b = Word::repeated(1, 700);
    CHECK(big_a < big_b);
    CHECK(Word::compare(big_a, big_a) == 0);
    CHECK(parse_word(ab, "b") < big_a);
}

TEST_CASE("prefix machinery") {
    Alphabet ab({"a", "b"});
    Word w = parse_word(ab, "a.a.b.a.b");
    CHECK(is_prefix(Word(), w));
    CHECK(is_prefix(parse_word(ab, "a.a"), w));
    CHECK(!is_prefix(parse_word(ab, "a.b"), w));
    CHECK(!is_prefix(w, parse_word(ab, "a.a")));

    CHECK(prefix(w, 3) == parse_word(ab, "a.a.b"));
    CHECK(suffix(w, 3) == parse_word(ab, "a.b"));
    CHECK(prefix(w, 0).empty());
    CHECK(suffix(w, 0) == w);

    auto q = prefix_quotient(parse_word(ab, "a.a"), w);
    REQUIRE(q.has_value());
    CHECK(*q == parse_word(ab, "b.a.b"));
    CHECK(concat(parse_word(ab, "a.a"), *q) == w);
    CHECK(!prefix_quotient(parse_word(ab, "b"), w).has_value());

    // across the representation boundary
    Word big = concat(Word::repeated(0, 600), parse_word(ab, "b.a"));
    CHECK(is_prefix(Word::repeated(0, 600), big));
    CHECK(suffix(big, 600) == parse_word(ab, "b.a"));
    CHECK(prefix(big, 599) == Word::repeated(0, 599));
}

TEST_CASE("occurrence counting matches the quadratic reference") {
    Alphabet ab({"a", "b"});

    SUBCASE("frozen overlap cases") {
        CHECK(occurrence_count(parse_word(ab, "a.b.a.b"), parse_word(ab, "a.b")) == 2);
        CHECK(occurrence_count(parse_word(ab, "a.a.a"), parse_word(ab, "a.a")) == 2);
        CHECK(occurrence_count(parse_word(ab, "a.a.a.a"), parse_word(ab, "a")) == 4);
        CHECK(occurrence_count(parse_word(ab, "a.b.a.b.a"), parse_word(ab, "a.b.a")) == 2);
        CHECK(occurrence_count(parse_word(ab, "b"), parse_word(ab, "a.b")) == 0);
        CHECK(occurrence_count(Word(), parse_word(ab, "a")) == 0);
    }

    SUBCASE("exhaustive short words") {
        for (std::uint32_t gl = 0; gl <= 7; ++gl) {
            for (std::uint32_t gb = 0; gb < (1u << gl); ++gb) {
                Word g = word_of_bits(ab, gb, gl);
                for (std::uint32_t pl = 1; pl <= 3; ++pl) {
                    for (std::uint32_t pb = 0; pb < (1u << pl); ++pb) {
                        Word p = word_of_bits(ab, pb, pl);
                        CHECK(occurrence_count(g, p) == naive_count(g, p));
                    }
                }
            }
        }
    }

    SUBCASE("random long words, both representations") {
        RngStream rng(99, 0);
        for (int i = 0; i < 200; ++i) {
            Word g = random_word(ab, rng, 1200); // crosses the RLE boundary
            Word p = random_word(ab, rng, 4, 1);
            CHECK(occurrence_count(g, p) == naive_count(g, p));
        }
    }

    SUBCASE("run-encoded haystack with run-encoded pattern") {
        Word g = concat(concat(Word::repeated(0, 700), Word::repeated(1, 700)),
                        Word::repeated(0, 700));
        CHECK(occurrence_count(g, Word::repeated(0, 650)) == 102); // 51 + 51 sliding starts
        CHECK(occurrence_count(g, Word::repeated(0, 700)) == 2);
        Word p = concat(Word::repeated(0, 2), Word::repeated(1, 2));
        CHECK(occurrence_count(g, p) == naive_count(g, p));
        Word cross = concat(Word::repeated(0, 699), Word::repeated(1, 1));
        CHECK(occurrence_count(g, cross) == 1);
    }
}

TEST_CASE("w-norm") {
    Alphabet ab({"a", "b"});
    Word w = parse_word(ab, "a.b");

    // |g|_w = occurrences + |w|
    CHECK(w_norm(parse_word(ab, "a.b.a.b"), w) == 4);
    CHECK(w_norm(parse_word(ab, "a.a.a"), parse_word(ab, "a.a")) == 4);
    CHECK(w_norm(Word(), w) == 2);

    SUBCASE("subadditive and sandwiched") {
        RngStream rng(7, 0);
        for (int i = 0; i < 3000; ++i) {
            Word g1 = random_word(ab, rng, 24);
            Word g2 = random_word(ab, rng, 24);
            Word v = random_word(ab, rng, 4, 1);
            std::uint64_t joint = w_norm(concat(g1, g2), v);
            CHECK(joint <= w_norm(g1, v) + w_norm(g2, v));
            CHECK(w_norm(g1, v) >= v.length());
            CHECK(w_norm(g1, v) <= v.length() + g1.length());
        }
    }
}

TEST_CASE("parse and format round-trip") {
    Alphabet ab({"a", "b", "up"});

    CHECK(parse_word(ab, "").empty());
    CHECK(parse_word(ab, "a.b.a") == Word::from_letters({0, 1, 0}));
    CHECK(parse_word(ab, "a^3.b") == Word::from_letters({0, 0, 0, 1}));
    CHECK(parse_word(ab, "up.a") == Word::from_letters({2, 0}));
    CHECK(format_word(ab, Word::repeated(0, 7)) == "a^7");
    CHECK(format_word(ab, parse_word(ab, "a.a.b")) == "a.a.b"); // short runs stay spelled out
    CHECK(format_word(ab, Word()) == "");

    // unknown names are interned, not rejected
    Word fresh = parse_word(ab, "c.a");
    CHECK(fresh.letter_at(0) == ab.find("c").value());

    CHECK_THROWS(parse_word(ab, "a^"));
    CHECK_THROWS(parse_word(ab, "a^0"));
    CHECK_THROWS(parse_word(ab, ".."));
    CHECK_THROWS(parse_word(ab, "a..b"));

    RngStream rng(11, 0);
    for (int i = 0; i < 400; ++i) {
        Word w = random_word(ab, rng, 900);
        CHECK(parse_word(ab, format_word(ab, w)) == w);
    }
}

TEST_CASE("hash is representation independent") {
    RngStream rng(5, 0);
    Alphabet ab({"a", "b"});
    for (int i = 0; i < 200; ++i) {
        Word w = random_word(ab, rng, 64);
        Word again = Word::from_runs(w.runs());
        CHECK(w == again);
        CHECK(w.hash() == again.hash());
    }
    // equal words hash equal across the flat/RLE construction paths
    Word big = Word::repeated(1, 5000);
    CHECK(Word::from_runs({{1, 5000}}).hash() == big.hash());
}
