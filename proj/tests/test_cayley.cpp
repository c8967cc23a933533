#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <queue>
#include <set>

#include "logwitness/cayley.hpp"

using namespace logwitness;

namespace {

const GeneratorSet& rank2() {
    static GeneratorSet g(2);
    return g;
}

std::vector<ModMatrix> sanov_mod(std::uint32_t p) {
    MatrixGenerators s = sanov_generators();
    return {reduce_mod(s.gen(0), p), reduce_mod(s.gen(1), p)};
}

std::vector<ModMatrix> all_sl2(std::uint32_t p) {
    std::vector<ModMatrix> out;
    for (std::uint32_t a = 0; a < p; ++a)
        for (std::uint32_t b = 0; b < p; ++b)
            for (std::uint32_t c = 0; c < p; ++c)
                for (std::uint32_t d = 0; d < p; ++d) {
                    if ((static_cast<std::uint64_t>(a) * d % p + p -
                         static_cast<std::uint64_t>(b) * c % p) % p != 1)
                        continue;
                    ModMatrix m(2, p);
                    m.at(0, 0) = a; m.at(0, 1) = b;
                    m.at(1, 0) = c; m.at(1, 1) = d;
                    out.push_back(m);
                }
    return out;
}

// Independent oracle: dense BFS over an explicit element list, no parent
// links, no packing.
std::map<std::vector<std::uint32_t>, int> bfs_distances(std::uint32_t p,
                                                        const std::vector<ModMatrix>& gens) {
    std::vector<ModMatrix> multipliers;
    for (const auto& g : gens) {
        multipliers.push_back(g);
        multipliers.push_back(g.inverse());
    }
    std::map<std::vector<std::uint32_t>, int> dist;
    std::queue<ModMatrix> queue;
    ModMatrix e = ModMatrix::identity(2, p);
    dist[e.entries()] = 0;
    queue.push(e);
    while (!queue.empty()) {
        ModMatrix cur = queue.front();
        queue.pop();
        for (const auto& m : multipliers) {
            ModMatrix nxt = cur * m;
            if (dist.contains(nxt.entries())) continue;
            dist[nxt.entries()] = dist[cur.entries()] + 1;
            queue.push(nxt);
        }
    }
    return dist;
}

}  // namespace

TEST_CASE("exploration closes small groups") {
    CayleyBall b3 = explore(sanov_mod(3));
    CHECK(b3.complete());
    CHECK(b3.size() == 24);  // |SL_2(3)|

    CayleyBall b5 = explore(sanov_mod(5));
    CHECK(b5.size() == 120);

    // A single unipotent generates a cyclic group of order p.
    ModMatrix u(2, 5);
    u.at(0, 0) = 1; u.at(0, 1) = 1; u.at(1, 1) = 1;
    CayleyBall cyclic = explore({u});
    CHECK(cyclic.complete());
    CHECK(cyclic.size() == 5);

    CayleyBall trivial = explore({ModMatrix::identity(2, 5)});
    CHECK(trivial.complete());
    CHECK(trivial.size() == 1);
}

TEST_CASE("element cap flags a partial ball") {
    CayleyBall ball(sanov_mod(101), 50);
    ball.explore();
    CHECK(ball.capped());
    CHECK(!ball.complete());
    CHECK(ball.size() <= 50);
    CHECK(ball.size() >= 1);
    CHECK_THROWS_AS(diameter(ball), PartialBallError);
}

TEST_CASE("layer closure property") {
    // B(r+1) = B(r) * (symmetric generators), as sets, for every layer.
    for (std::uint32_t p : {3u, 5u, 7u}) {
        CayleyBall ball = explore(sanov_mod(p));
        auto gens = sanov_mod(p);
        std::vector<ModMatrix> multipliers;
        for (const auto& g : gens) {
            multipliers.push_back(g);
            multipliers.push_back(g.inverse());
        }
        for (int r = 0; r + 1 < ball.layer_count(); ++r) {
            std::set<std::vector<std::uint32_t>> expect;
            for (std::uint64_t id = 0; id < ball.layer_end(r); ++id) {
                expect.insert(ball.element(id).entries());
                for (const auto& m : multipliers)
                    expect.insert((ball.element(id) * m).entries());
            }
            std::set<std::vector<std::uint32_t>> got;
            for (std::uint64_t id = 0; id < ball.layer_end(r + 1); ++id)
                got.insert(ball.element(id).entries());
            REQUIRE(got == expect);
        }
    }
}

TEST_CASE("diameter matches an independent BFS") {
    for (std::uint32_t p : {3u, 5u, 7u, 11u}) {
        CayleyBall ball = explore(sanov_mod(p));
        DiameterRecord rec = diameter(ball);
        auto dist = bfs_distances(p, sanov_mod(p));
        CHECK(rec.group_order == dist.size());
        int expect = 0;
        for (const auto& [k, d] : dist) expect = std::max(expect, d);
        REQUIRE(rec.diameter == expect);
        std::uint64_t total = 0;
        for (auto s : rec.layer_sizes) total += s;
        CHECK(total == rec.group_order);
    }
    // Fixture: SL_2(3) under the reduced free generators.
    DiameterRecord r3 = diameter(explore(sanov_mod(3)));
    auto d3 = bfs_distances(3, sanov_mod(3));
    int expect3 = 0;
    for (const auto& [k, d] : d3) expect3 = std::max(expect3, d);
    CHECK(r3.diameter == expect3);

    // Generating set = the whole group reaches everything in one step.
    auto everyone = all_sl2(5);
    DiameterRecord whole = diameter(explore(everyone));
    CHECK(whole.diameter == 1);
}

TEST_CASE("lift round trip and geodesics") {
    MatrixGenerators s = sanov_generators();
    for (std::uint32_t p : {5u, 7u, 11u, 13u}) {
        CayleyBall ball = explore(sanov_mod(p));
        REQUIRE(ball.complete());

        CHECK(lift(ball, ModMatrix::identity(2, p)).is_identity());
        CHECK(render(lift(ball, reduce_mod(s.gen(0), p)), rank2()) == "a");

        for (std::uint64_t id = 0; id < ball.size(); ++id) {
            FreeWord w = ball.lift_word(id);
            REQUIRE(w.length() == static_cast<std::uint64_t>(ball.depth_of(id)));
            REQUIRE(reduce_mod(eval_free_word(w, s), p) == ball.element(id));
        }
    }
    ModMatrix missing(2, 5);
    missing.at(0, 0) = 1; missing.at(0, 1) = 1; missing.at(1, 1) = 1;
    CayleyBall tiny(sanov_mod(5), 1);
    tiny.explore();
    CHECK_THROWS_AS(lift(tiny, missing), NotFoundError);
}

TEST_CASE("BFS depth equals the word metric") {
    // Minimal free-word length that lands on each element, by exhausting the
    // free ball; must coincide with the BFS depth wherever depth <= 6.
    MatrixGenerators s = sanov_generators();
    for (std::uint32_t p : {5u, 7u}) {
        CayleyBall ball = explore(sanov_mod(p));
        std::map<std::vector<std::uint32_t>, std::uint64_t> min_len;
        walk_ball(rank2(), 6, [&](const FreeWord& g) {
            auto img = reduce_mod(eval_free_word(g, s), p).entries();
            auto it = min_len.find(img);
            if (it == min_len.end()) min_len.emplace(img, g.length());
        });
        for (std::uint64_t id = 0; id < ball.size(); ++id) {
            int depth = ball.depth_of(id);
            if (depth > 6) continue;
            auto it = min_len.find(ball.element(id).entries());
            REQUIRE(it != min_len.end());
            REQUIRE(it->second == static_cast<std::uint64_t>(depth));
        }
    }
}

TEST_CASE("injectivity radius") {
    MatrixGenerators s = sanov_generators();
    // Mod 2 both generators collapse to I: "a" collides with the identity.
    auto r2 = injectivity_radius(2, s, rank2());
    CHECK(r2.radius == 0);
    CHECK(r2.collision_found);

    auto r5 = injectivity_radius(5, s, rank2());
    CHECK(r5.radius >= 1);
    CHECK(r5.collision_found);  // SL_2(5) is finite, collisions must come

    // The colliding pair really collides and nothing shorter does.
    auto r11 = injectivity_radius(11, s, rank2());
    REQUIRE(r11.collision_found);
    CHECK(reduce_mod(eval_free_word(r11.witness_a, s), 11) ==
          reduce_mod(eval_free_word(r11.witness_b, s), 11));
    CHECK(r11.witness_b.length() == static_cast<std::uint64_t>(r11.radius) + 1);
    CHECK(r11.witness_a.length() <= r11.witness_b.length());

    // Radii grow with p.
    auto r101 = injectivity_radius(101, s, rank2());
    CHECK(r101.radius >= r5.radius);
}

TEST_CASE("product growth statistics") {
    // A = the whole group: AAA = A and the flag is set.
    CayleyBall b5 = explore(sanov_mod(5));
    auto whole = product_growth(b5, b5.layer_count() - 1);
    CHECK(whole.size_a == 120);
    CHECK(whole.size_aaa == 120);
    CHECK(whole.whole_group);

    // A = {e}.
    auto single = product_growth(b5, 0);
    CHECK(single.size_a == 1);
    CHECK(single.size_aaa == 1);

    // A = B(1) in SL_2(11): genuine growth unless it already covers.
    CayleyBall b11 = explore(sanov_mod(11));
    auto stats = product_growth(b11, 1);
    CHECK(stats.size_a == 5);
    if (!stats.whole_group) CHECK(stats.exponent > 1.0);
    CHECK(stats.size_aaa > stats.size_a);
}

TEST_CASE("sweep rows") {
    MatrixGenerators s = sanov_generators();
    SweepRow row = sweep_prime(3, s, rank2());
    CHECK(row.p == 3);
    CHECK(row.group_order == 24);
    CHECK(row.seconds == 0.0);  // canonical output omits wall time

    auto csv = sweep_csv(std::vector<SweepRow>{row});
    CHECK(csv.starts_with("p,group_order,diameter,injectivity_radius,seconds\n"));
    CHECK(csv.find("3,24,") != std::string::npos);
}
