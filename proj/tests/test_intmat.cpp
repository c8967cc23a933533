#include <catch2/catch_amalgamated.hpp>

#include <unordered_set>

#include "logwitness/intmat.hpp"
#include "logwitness/words.hpp"

using namespace logwitness;

namespace {

const GeneratorSet& rank2() {
    static GeneratorSet g(2);
    return g;
}

FreeWord fw(const std::string& text) { return parse_free_word(text, rank2()); }
ConstWord cw(const std::string& text) { return parse_const_word(text, rank2()); }

IntMatrix m2(long long a, long long b, long long c, long long d) {
    IntMatrix m(2);
    m.at(0, 0) = a; m.at(0, 1) = b;
    m.at(1, 0) = c; m.at(1, 1) = d;
    return m;
}

FreeWord random_reduced(SplitMix64& rng, int max_syllables) {
    std::vector<Syllable> raw;
    int count = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_syllables) + 1));
    for (int i = 0; i < count; ++i) raw.push_back({static_cast<int>(rng.below(2)), rng.range(-3, 3)});
    return free_reduce(raw);
}

}  // namespace

TEST_CASE("sanov generators") {
    MatrixGenerators s = sanov_generators();
    CHECK(s.dim() == 2);
    CHECK(s.rank() == 2);
    CHECK(s.gen(0) == m2(1, 2, 0, 1));
    CHECK(s.gen(1) == m2(1, 0, 2, 1));
    CHECK(s.inv(0) == m2(1, -2, 0, 1));
    CHECK(s.max_abs_entry() == 2);  // M over generators and inverses

    CHECK(eval_free_word(FreeWord(), s).is_identity());
    CHECK(eval_free_word(fw("a"), s) == m2(1, 2, 0, 1));
    CHECK(eval_free_word(fw("a^-1"), s) == m2(1, -2, 0, 1));
    // Hand multiplication: [[1,2],[0,1]]*[[1,0],[2,1]] = [[5,2],[2,1]].
    CHECK(eval_free_word(fw("a b"), s) == m2(5, 2, 2, 1));

    CHECK(height(IntMatrix::identity(2)) == 1);
    CHECK(height(s.gen(0)) == 2);
    CHECK(height(eval_free_word(fw("a b"), s)) == 5);
}

TEST_CASE("determinants and inverses") {
    CHECK(m2(1, 2, 0, 1).determinant() == 1);
    CHECK(m2(2, 0, 0, 2).determinant() == 4);
    CHECK(m2(1, 1, 1, 1).determinant() == 0);

    IntMatrix e3 = IntMatrix::identity(3);
    e3.at(0, 2) = 7;
    e3.at(1, 0) = -3;
    CHECK(e3.determinant() == 1);
    CHECK((e3 * e3.inverse_unimodular()).is_identity());

    CHECK_THROWS_AS(m2(2, 0, 0, 2).inverse_unimodular(), ValidationError);
    CHECK_THROWS_AS(MatrixGenerators({m2(2, 0, 0, 2)}), ValidationError);

    SplitMix64 rng(5);
    MatrixGenerators s = sanov_generators();
    for (int trial = 0; trial < 100; ++trial) {
        IntMatrix g = eval_free_word(random_reduced(rng, 6), s);
        CHECK(g.determinant() == 1);
        CHECK((g * g.inverse_unimodular()).is_identity());
    }
}

TEST_CASE("evaluation is a homomorphism") {
    MatrixGenerators s = sanov_generators();
    SplitMix64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        FreeWord u = random_reduced(rng, 6);
        FreeWord v = random_reduced(rng, 6);
        CHECK(eval_free_word(u * v, s) == eval_free_word(u, s) * eval_free_word(v, s));
    }
    // Commutator of free generators is nontrivial with determinant 1.
    IntMatrix comm = eval_free_word(fw("a b a^-1 b^-1"), s);
    CHECK(!comm.is_identity());
    CHECK(comm.determinant() == 1);
}

TEST_CASE("eval_const_word matches the substituted word") {
    MatrixGenerators s = sanov_generators();
    IntMatrix a = eval_free_word(fw("a"), s);
    IntMatrix b = eval_free_word(fw("b"), s);

    ConstWord w = cw("a x a^-1 x^-1");
    CHECK(eval_const_word(cw("x"), b, s) == b);
    CHECK(eval_const_word(w, a, s).is_identity());
    CHECK(eval_const_word(w, b, s) == eval_free_word(fw("a b a^-1 b^-1"), s));

    // Commutation square on random pairs.
    SplitMix64 rng(23);
    for (int trial = 0; trial < 300; ++trial) {
        ConstWord wr = random_const_word(rng, 1 + rng.below(20), rank2());
        FreeWord g = random_reduced(rng, 8);
        IntMatrix lhs = eval_const_word(wr, eval_free_word(g, s), s);
        IntMatrix rhs = eval_free_word(substitute(wr, g), s);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("submultiplicative height") {
    MatrixGenerators s = sanov_generators();
    SplitMix64 rng(29);
    for (int trial = 0; trial < 200; ++trial) {
        IntMatrix x = eval_free_word(random_reduced(rng, 5), s);
        IntMatrix y = eval_free_word(random_reduced(rng, 5), s);
        CHECK(height(x * y) <= BigInt(2) * height(x) * height(y));
    }
}

TEST_CASE("height bound over balls") {
    MatrixGenerators s = sanov_generators();
    auto r0 = check_height_bound(0, s, rank2());
    CHECK(r0.all_within);
    CHECK(r0.words_checked == 1);
    CHECK(r0.max_ratio == 1.0);  // identity: height 1 vs (dM)^0

    auto r1 = check_height_bound(1, s, rank2());
    CHECK(r1.all_within);
    CHECK(r1.words_checked == 5);

    auto r6 = check_height_bound(6, s, rank2());
    CHECK(r6.all_within);
    CHECK(r6.words_checked == ball_count(2, 6));
    CHECK(r6.max_ratio <= 1.0);
}

TEST_CASE("faithfulness at small radius") {
    // No nontrivial reduced word of length <= 8 maps to the identity, and all
    // images are distinct (injectivity on the ball).
    MatrixGenerators s = sanov_generators();
    std::unordered_set<std::string> seen;
    std::uint64_t count = 0;
    walk_ball(rank2(), 8, [&](const FreeWord& g) {
        IntMatrix img = eval_free_word(g, s);
        std::string key;
        for (const auto& v : img.entries()) {
            key += v.str();
            key += ',';
        }
        CHECK(seen.insert(key).second);
        ++count;
    });
    CHECK(count == ball_count(2, 8));
}

TEST_CASE("entry bit cap") {
    MatrixGenerators s = sanov_generators();
    // 4^|g| growth: a word of length ~200 exceeds a 64-bit cap.
    FreeWord big = fw("a b").pow(100);
    CHECK_THROWS_AS(eval_free_word(big, s, 64), ResourceError);
    CHECK_NOTHROW(eval_free_word(big, s, 1 << 12));
    CHECK_THROWS_AS(eval_const_word(cw("x^100000"), eval_free_word(fw("a b"), s), s, 256),
                    ResourceError);
}

TEST_CASE("elementary generator preset") {
    MatrixGenerators e3 = elementary_generators(3);
    CHECK(e3.dim() == 3);
    CHECK(e3.rank() == 6);
    CHECK(e3.max_abs_entry() == 1);
    for (int i = 0; i < e3.rank(); ++i) CHECK(e3.gen(i).determinant() == 1);
}
