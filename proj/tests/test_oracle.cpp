#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "logwitness/oracle.hpp"

using namespace logwitness;

namespace {

const GeneratorSet& rank2() {
    static GeneratorSet g(2);
    return g;
}

ConstWord cw(const std::string& text) { return parse_const_word(text, rank2()); }

}  // namespace

TEST_CASE("builtin groups") {
    FiniteGroupTable c2 = FiniteGroupTable::builtin("c2");
    CHECK(c2.order() == 2);
    CHECK(c2.center().size() == 2);  // abelian
    CHECK(c2.name(0) == "e");
    CHECK(c2.mul(1, 1) == 0);

    FiniteGroupTable psl5 = FiniteGroupTable::builtin("psl2-5");
    CHECK(psl5.order() == 60);
    CHECK(psl5.center() == std::vector<std::uint32_t>{psl5.identity()});

    CHECK(FiniteGroupTable::builtin("psl2-3").order() == 12);
    CHECK(FiniteGroupTable::builtin("psl2-2").order() == 6);
    CHECK(FiniteGroupTable::builtin("psl2-7").order() == 168);
    CHECK(FiniteGroupTable::builtin("psl2-11").order() == 660);
    CHECK(FiniteGroupTable::builtin("psl2-13").order() == 1092);

    CHECK_THROWS_AS(FiniteGroupTable::builtin("psl2-17"), NotFoundError);
    CHECK_THROWS_AS(FiniteGroupTable::builtin("s3"), NotFoundError);
}

TEST_CASE("table validation") {
    // No identity element.
    CHECK_THROWS_AS(FiniteGroupTable::from_table(2, {1, 1, 1, 1}), ValidationError);
    // Entry out of range.
    CHECK_THROWS_AS(FiniteGroupTable::from_table(2, {0, 1, 1, 7}), ValidationError);
    // Wrong size.
    CHECK_THROWS_AS(FiniteGroupTable::from_table(2, {0, 1, 1}), ValidationError);
    // Identity exists but 1 has no inverse.
    CHECK_THROWS_AS(FiniteGroupTable::from_table(2, {0, 1, 1, 1}), ValidationError);
    // Non-associative magma with identity and inverses:
    // 1*1 = 0 but (1*1)*2 != 1*(1*2) somewhere.
    CHECK_THROWS_AS(
        FiniteGroupTable::from_table(3, {0, 1, 2, 1, 0, 0, 2, 0, 0}), ValidationError);

    // A legitimate non-builtin table loads: Z/3.
    FiniteGroupTable z3 = FiniteGroupTable::from_table(3, {0, 1, 2, 1, 2, 0, 2, 0, 1});
    CHECK(z3.order() == 3);
    CHECK(z3.inv(1) == 2);
    CHECK(z3.center().size() == 3);
}

TEST_CASE("exact complexity basics") {
    auto rec_x = exact_complexity(cw("x"), rank2(), 3);
    REQUIRE(rec_x.chi.has_value());
    CHECK(*rec_x.chi == 1);
    CHECK(render(rec_x.witness, rank2()) == "a");

    // w(a) = e but w(b) != e; enumeration visits a first, so b witnesses.
    auto rec_comm = exact_complexity(cw("a x a^-1 x^-1"), rank2(), 3);
    REQUIRE(rec_comm.chi.has_value());
    CHECK(*rec_comm.chi == 1);
    CHECK(render(rec_comm.witness, rank2()) == "b");

    // Constants that do not cancel make the identity a witness: chi = 0.
    auto rec_zero = exact_complexity(cw("a x b"), rank2(), 3);
    REQUIRE(rec_zero.chi.has_value());
    CHECK(*rec_zero.chi == 0);
    CHECK(rec_zero.witness.is_identity());

    // Nested commutator [[x,a],[x,b]] vanishes on the whole 1-ball.
    auto rec_nest = exact_complexity(
        cw("(x a x^-1 a^-1) (x b x^-1 b^-1) (a x a^-1 x^-1) (b x b^-1 x^-1)"), rank2(), 4);
    REQUIRE(rec_nest.chi.has_value());
    CHECK(*rec_nest.chi == 2);

    // Radius 0 only sees the identity: unresolved.
    auto rec_unres = exact_complexity(cw("a x a^-1 x^-1"), rank2(), 0);
    CHECK(!rec_unres.chi.has_value());
    CHECK(rec_unres.radius_searched == 0);
    CHECK(rec_unres.scanned == 1);
}

TEST_CASE("complexity is conjugation invariant") {
    SplitMix64 rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        ConstWord w = random_const_word(rng, 1 + rng.below(8), rank2());
        // Conjugate by a short random constant.
        std::string c = rng.coin() ? "a b" : "b^-1 a";
        ConstWord conj = cw("(" + c + ") (" + render(w, rank2()) + ") (" + c + ")^-1");
        auto lhs = exact_complexity(w, rank2(), 4);
        auto rhs = exact_complexity(conj, rank2(), 4);
        REQUIRE(lhs.chi.has_value() == rhs.chi.has_value());
        if (lhs.chi) {
            CHECK(*lhs.chi == *rhs.chi);
            CHECK(lhs.witness == rhs.witness);
        }
    }
}

TEST_CASE("canonical equation enumeration") {
    // Hand counts over rank 2: length 1 = {x, x^-1} + 4 bare constants;
    // length 2 = {x^2, x^-2} + 4*4 one-constant shapes + 12 two-letter
    // constants.
    std::set<std::string> len1, len2;
    std::uint64_t total = 0;
    enumerate_const_words(rank2(), 2, [&](const ConstWord& w) {
        ++total;
        if (w.length() == 1) len1.insert(render(w, rank2()));
        if (w.length() == 2) len2.insert(render(w, rank2()));
    });
    CHECK(len1.size() == 6);
    CHECK(len2.size() == 30);
    CHECK(total == 36);  // every emitted word is unique, so sizes add up

    // All canonical and lengths within budget.
    enumerate_const_words(rank2(), 3, [&](const ConstWord& w) {
        CHECK(w.length() >= 1);
        CHECK(w.length() <= 3);
        CHECK(parse_const_word(render(w, rank2()), rank2()) == w);
    });
}

TEST_CASE("exact growth table") {
    auto rows = exact_growth(3, 5, rank2());
    REQUIRE(rows.size() == 4);
    CHECK(rows[1].max_chi == 1);  // chi(x) = 1, nothing of length 1 beats it
    CHECK(rows[1].all_resolved);
    for (std::size_t n = 1; n < rows.size(); ++n) {
        CHECK(rows[n].max_chi >= rows[n - 1].max_chi);  // nondecreasing
        CHECK(rows[n].max_chi >= 1);
        CHECK(rows[n].all_resolved);
    }
    CHECK(rows[1].words == 6);
    CHECK(rows[2].words == 30);
}

TEST_CASE("mixed identities of c2") {
    FiniteGroupTable c2 = FiniteGroupTable::builtin("c2");
    auto found = mixed_identity_search(c2, 2);
    REQUIRE(found.identities.size() == 1);
    CHECK(found.identities[0].render(c2) == "x^2");

    auto none = mixed_identity_search(c2, 1);
    CHECK(none.identities.empty());
}

TEST_CASE("PSL2(5) has no short mixed identity") {
    FiniteGroupTable G = FiniteGroupTable::builtin("psl2-5");
    auto found = mixed_identity_search(G, 3);
    CHECK(found.identities.empty());
    CHECK(found.words_tested > 0);

    // Small powers never vanish identically: some element of each order
    // 2..4 misses.
    for (std::int64_t m = 1; m <= 4; ++m) {
        bool all_vanish = true;
        for (std::uint32_t g = 0; g < G.order() && all_vanish; ++g)
            all_vanish = G.power(g, m) == G.identity();
        CHECK(!all_vanish);
    }

    // Empty search result implies every sampled equation has a non-solution.
    SplitMix64 rng(55);
    std::vector<std::uint32_t> noncentral;
    for (std::uint32_t g = 0; g < G.order(); ++g)
        if (!G.is_central(g)) noncentral.push_back(g);
    for (int trial = 0; trial < 100; ++trial) {
        GroupWord w;
        w.a0 = rng.range(0, 1);
        int budget = 3 - static_cast<int>(w.a0);
        while (budget >= 2 && rng.coin()) {
            std::uint32_t c = noncentral[rng.below(noncentral.size())];
            std::int64_t e = rng.coin() ? 1 : -1;
            w.blocks.emplace_back(c, e);
            budget -= 2;
        }
        if (w.a0 == 0 && w.blocks.empty()) w.a0 = 1;
        bool has_witness = false;
        for (std::uint32_t g = 0; g < G.order() && !has_witness; ++g)
            has_witness = w.evaluate(G, g) != G.identity();
        CHECK(has_witness);
    }
}

TEST_CASE("mixed identity search respects caps") {
    FiniteGroupTable G = FiniteGroupTable::builtin("psl2-5");
    CHECK_THROWS_AS(mixed_identity_search(G, 3, 100), ResourceError);
}
