#include <doctest.h>

#include <cmath>
#include <limits>

#include "sbl/families.hpp"
#include "sbl/measure.hpp"
#include "sbl/random_measures.hpp"
#include "sbl/rng.hpp"

using namespace sbl;
using doctest::Approx;

namespace {

const double kPi = 3.14159265358979323846;

SparseMeasure inline_measure(const std::shared_ptr<Alphabet>& ab, const std::string& rows) {
    return measure_from_rows(ab, parse_inline_table(rows), false);
}

} // namespace

TEST_CASE("builder validates and canonicalizes") {
    auto ab = Alphabet::make({"a", "b"});

    SUBCASE("mass must balance") {
        MeasureBuilder mb(ab);
        mb.add(parse_word(*ab, "a"), 0.25);
        CHECK_THROWS(mb.freeze());
    }

    SUBCASE("duplicates fold") {
        MeasureBuilder mb(ab);
        mb.add(parse_word(*ab, "a"), 0.25);
        mb.add(parse_word(*ab, "a"), 0.25);
        mb.add(parse_word(*ab, "b"), 0.5);
        SparseMeasure m = mb.freeze();
        CHECK(m.size() == 2);
        CHECK(m.mass(parse_word(*ab, "a")) == Approx(0.5).epsilon(1e-15));
    }

    SUBCASE("identity atoms are legal") {
        MeasureBuilder mb(ab);
        mb.add(Word(), 0.5);
        mb.add(parse_word(*ab, "a"), 0.5);
        SparseMeasure m = mb.freeze();
        CHECK(m.mass(Word()) == 0.5);
    }

    SUBCASE("declared tail participates in the balance") {
        MeasureBuilder mb(ab);
        mb.add(parse_word(*ab, "a"), 0.75);
        mb.set_tail({0.25, 1.0, 2.0});
        SparseMeasure m = mb.freeze();
        CHECK(m.represented_mass() == Approx(0.75));
        CHECK(m.tail().mass == Approx(0.25));
    }

    SUBCASE("epsilon drop moves mass to the ledger") {
        MeasureBuilder mb(ab);
        mb.add(parse_word(*ab, "a"), 1.0 - 1e-14);
        mb.add(parse_word(*ab, "b.b.b"), 1e-14);
        SparseMeasure m = mb.freeze(1e-10);
        CHECK(m.size() == 1);
        CHECK(m.tail().mass == Approx(1e-14).epsilon(1e-6));
        CHECK(m.tail().log_len >= 0.0); // dropped word had length 3
    }
}

TEST_CASE("convolution on the free semigroup") {
    auto ab = Alphabet::make({"a", "b"});
    SparseMeasure m = inline_measure(ab, "a:0.5,a.a:0.5");

    SUBCASE("square splits over factorizations") {
        SparseMeasure sq = power(m, 2);
        CHECK(sq.mass(parse_word(*ab, "a.a")) == Approx(0.25).epsilon(1e-15));
        CHECK(sq.mass(parse_word(*ab, "a.a.a")) == Approx(0.5).epsilon(1e-15)); // a*aa + aa*a
        CHECK(sq.mass(parse_word(*ab, "a^4")) == Approx(0.25).epsilon(1e-15));
        CHECK(sq.size() == 3);
    }

    SUBCASE("identity step is neutral") {
        MeasureBuilder mb(ab);
        mb.add(Word(), 1.0);
        SparseMeasure delta_e = mb.freeze();
        SparseMeasure left = convolve(delta_e, m);
        SparseMeasure right = convolve(m, delta_e);
        CHECK(left.mass(parse_word(*ab, "a")) == 0.5);
        CHECK(right.mass(parse_word(*ab, "a.a")) == 0.5);
        CHECK(power(m, 1).size() == m.size());
        CHECK(power(m, 0).mass(Word()) == 1.0);
    }

    SUBCASE("no cancellation: supports only grow rightward") {
        SparseMeasure ba = inline_measure(ab, "b:1.0");
        SparseMeasure conv = convolve(m, ba);
        CHECK(conv.mass(parse_word(*ab, "a.b")) == 0.5);
        CHECK(conv.mass(parse_word(*ab, "a.a.b")) == 0.5);
        CHECK(conv.mass(parse_word(*ab, "b")) == 0.0);
    }

    SUBCASE("mass conservation under random convolutions") {
        RngStream rng(42, 0);
        for (int i = 0; i < 30; ++i) {
            SparseMeasure x = random_sparse_measure(ab, rng, 6, 4);
            SparseMeasure y = random_sparse_measure(ab, rng, 6, 4, true);
            SparseMeasure c = convolve(x, y);
            CHECK(std::abs(c.represented_mass() + c.tail().mass - 1.0) <= 1e-12);
        }
    }

    SUBCASE("support budget trips cleanly") {
        TruncationPolicy tight;
        tight.support_budget = 4;
        CHECK_THROWS_AS(power(inline_measure(ab, "a:0.4,b:0.3,a.b:0.3"), 3, tight),
                        SupportExplosion);
    }
}

TEST_CASE("length projection") {
    auto ab = Alphabet::make({"a", "b"});
    SparseMeasure m = inline_measure(ab, "a:0.5,a.a:0.5");

    SUBCASE("projection commutes with powers") {
        RngStream rng(21, 0);
        for (int i = 0; i < 15; ++i) {
            SparseMeasure x = random_sparse_measure(ab, rng, 5, 4);
            for (std::uint32_t k = 1; k <= 3; ++k) {
                LengthMeasure via_words = length_pushforward(power(x, k));
                LengthMeasure via_lengths = power_lengths(length_pushforward(x), k);
                REQUIRE(via_words.entries().size() == via_lengths.entries().size());
                for (std::size_t j = 0; j < via_words.entries().size(); ++j) {
                    CHECK(via_words.entries()[j].first == via_lengths.entries()[j].first);
                    CHECK(via_words.entries()[j].second ==
                          Approx(via_lengths.entries()[j].second).epsilon(1e-12));
                }
            }
        }
    }

    SUBCASE("projected square is the binomial picture") {
        LengthMeasure lm = length_pushforward(power(m, 2));
        // lengths 2,3,4 with weights 1/4,1/2,1/4
        REQUIRE(lm.entries().size() == 3);
        CHECK(lm.entries()[0].first == 2);
        CHECK(lm.entries()[1].second == Approx(0.5).epsilon(1e-15));
    }
}

TEST_CASE("entropies and moments") {
    auto ab = Alphabet::make({"a", "b"});
    SparseMeasure uni = letter_uniform(ab);
    SparseMeasure m = inline_measure(ab, "a:0.5,a.a:0.5");

    CHECK(entropy(uni).value == Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(entropy(uni).err == 0.0);
    CHECK(log_moment(length_pushforward(m)).value == Approx(0.5 * std::log(2.0)).epsilon(1e-15));

    Word b = parse_word(*ab, "b");
    CHECK(log_moment_w(uni, b).value == Approx(0.5 * std::log(2.0)).epsilon(1e-15));

    Moments mom = moments(uni, &b);
    CHECK(mom.H.value == Approx(std::log(2.0)));
    CHECK(mom.L.value == 0.0); // every step has length 1
    CHECK(mom.H_len.value == 0.0);
    REQUIRE(mom.L_w.has_value());
    CHECK(mom.L_w->value == Approx(0.5 * std::log(2.0)));
}

TEST_CASE("entropy dominated by log moment plus universal constant") {
    // H(theta) <= 2 L(theta) + 1 + 2 sum_n ln(n)/n^2 for laws on positive lengths
    const double cap = 1.0 + 2.0 * log_over_square_tail(0);
    CHECK(cap == Approx(2.8750965086317).epsilon(1e-10));
    RngStream rng(1234, 0);
    for (int i = 0; i < 200; ++i) {
        LengthMeasure th = random_length_measure(rng, 10, 1u << 16);
        CHECK(entropy(th).value <= 2.0 * log_moment(th).value + cap + 1e-9);
    }
}

TEST_CASE("stock families") {
    SUBCASE("example1 masses and infinite log-length ledger") {
        FamilySpec spec;
        spec.family = "example1";
        spec.letters = {"a", "b"};
        spec.truncation_K = 40;
        std::shared_ptr<Alphabet> ab;
        SparseMeasure m = instantiate_family(spec, &ab);

        double c = 3.0 / (kPi * kPi);
        CHECK(m.mass(parse_word(*ab, "b")) == Approx(0.5).epsilon(1e-15));
        CHECK(m.mass(parse_word(*ab, "a.a")) == Approx(c).epsilon(1e-12));
        CHECK(m.mass(parse_word(*ab, "a^4")) == Approx(c / 4.0).epsilon(1e-12));
        CHECK(m.mass(Word::repeated(ab->find("a").value(), 1ull << 40)) ==
              Approx(c / 1600.0).epsilon(1e-12));
        CHECK(m.mass(parse_word(*ab, "a.a.a")) == 0.0);

        // truncated tail of sum c/k^2 beyond K=40
        CHECK(m.tail().mass == Approx(c * inverse_square_sum_from(41)).epsilon(1e-9));
        CHECK(std::isinf(m.tail().log_len)); // lengths 2^k make E log|g| diverge
        CHECK(!std::isinf(m.tail().entropy));

        // finite entropy, infinite log-moment: the ledger surfaces it
        CHECK(std::isinf(log_moment(length_pushforward(m)).err));
        CHECK(entropy(m).err < 0.1);

        SUBCASE("renormalized variant closes the books") {
            spec.renormalize = true;
            SparseMeasure r = instantiate_family(spec);
            CHECK(r.tail().mass == 0.0);
            CHECK(std::abs(r.represented_mass() - 1.0) <= 1e-12);
        }
    }

    SUBCASE("example3 geometric blocks") {
        FamilySpec spec;
        spec.family = "example3";
        spec.letters = {"a", "b"};
        spec.truncation_K = 30;
        std::shared_ptr<Alphabet> ab;
        SparseMeasure m = instantiate_family(spec, &ab);
        CHECK(m.mass(parse_word(*ab, "a")) == Approx(0.25).epsilon(1e-15));
        CHECK(m.mass(parse_word(*ab, "b.b.b")) == Approx(std::pow(2.0, -4)).epsilon(1e-15));
        CHECK(m.size() == 60);
        CHECK(m.tail().mass == Approx(std::pow(2.0, -30)).epsilon(1e-9));

        // the square puts everything on x.y splits, so a.b shows up at most once
        SparseMeasure sq = power(m, 2);
        std::uint64_t worst = 0;
        Word abw = parse_word(*ab, "a.b");
        for (const auto& [g, mass] : sq.entries()) {
            (void)mass;
            worst = std::max(worst, occurrence_count(g, abw));
        }
        CHECK(worst == 1);
    }

    SUBCASE("example2 blends in the lacunary block") {
        FamilySpec spec;
        spec.family = "example2";
        spec.letters = {"a", "b"};
        spec.truncation_K = 20;
        std::shared_ptr<Alphabet> ab;
        SparseMeasure m = instantiate_family(spec, &ab);
        CHECK(m.mass(parse_word(*ab, "b")) == Approx(0.5).epsilon(1e-15));
        CHECK(m.mass(Word::repeated(ab->find("a").value(), 3)) > 0.0);  // the 3^k block
        CHECK(m.mass(Word::repeated(ab->find("a").value(), 4)) > 0.0);  // the 2^k block
        CHECK(std::abs(m.represented_mass() + m.tail().mass - 1.0) <= 1e-12);
    }

    SUBCASE("tables reject oversubscribed mass") {
        auto ab = Alphabet::make({"a"});
        CHECK_THROWS(measure_from_rows(ab, {{"a", 0.7}, {"a.a", 0.6}}, false));
        SparseMeasure deficit = measure_from_rows(ab, {{"a", 0.7}}, false);
        CHECK(deficit.tail().mass == Approx(0.3));
        CHECK(std::isinf(deficit.tail().entropy)); // nothing known about the rest
        SparseMeasure renorm = measure_from_rows(ab, {{"a", 0.7}}, true);
        CHECK(renorm.mass(parse_word(*ab, "a")) == Approx(1.0));
    }

    SUBCASE("generation flag") {
        auto ab = Alphabet::make({"a", "b"});
        CHECK(generates_declared_alphabet(letter_uniform(ab)));
        CHECK(!generates_declared_alphabet(inline_measure(ab, "a:0.5,a.b:0.5")));
    }
}

TEST_CASE("numeric tail helpers") {
    // sum_{k>=1} 1/k^2 = pi^2/6, and shifted starts
    CHECK(inverse_square_sum_from(1) == Approx(kPi * kPi / 6.0).epsilon(1e-12));

    // difference of two tails is a finite sum we can do exactly
    double direct = 0.0;
    for (int k = 41; k <= 10000; ++k) direct += 1.0 / (double(k) * k);
    CHECK(inverse_square_sum_from(41) - inverse_square_sum_from(10001) ==
          Approx(direct).epsilon(1e-12));

    double direct_log = 0.0;
    for (int k = 11; k <= 10000; ++k) direct_log += std::log(double(k)) / (double(k) * k);
    CHECK(log_over_square_tail(10) - log_over_square_tail(10000) ==
          Approx(direct_log).epsilon(1e-10));
    CHECK(log_over_square_tail(10) < log_over_square_tail(5));
}
