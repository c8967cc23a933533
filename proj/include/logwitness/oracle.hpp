#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "logwitness/errors.hpp"
#include "logwitness/modp.hpp"
#include "logwitness/rng.hpp"
#include "logwitness/words.hpp"

namespace logwitness {

// ---------------------------------------------------------------------------
// Finite group tables
// ---------------------------------------------------------------------------

// Dense multiplication table of a small finite group, validated on load:
// identity and inverses must exist, associativity is spot-checked on random
// triples, and the center is computed exactly.
class FiniteGroupTable {
public:
    static FiniteGroupTable from_table(std::uint32_t order, std::vector<std::uint32_t> mul,
                                       std::vector<std::string> names = {},
                                       std::uint64_t assoc_spot_checks = 2048,
                                       std::uint64_t seed = 0x1337) {
        FiniteGroupTable g;
        g.order_ = order;
        g.mul_ = std::move(mul);
        if (order == 0) throw ValidationError("group order must be positive");
        if (g.mul_.size() != static_cast<std::size_t>(order) * order)
            throw ValidationError("multiplication table has the wrong size");
        for (auto v : g.mul_)
            if (v >= order) throw ValidationError("multiplication table entry out of range");

        // Identity: the unique two-sided neutral element.
        std::optional<std::uint32_t> identity;
        for (std::uint32_t e = 0; e < order; ++e) {
            bool ok = true;
            for (std::uint32_t h = 0; h < order && ok; ++h)
                ok = g.mul(e, h) == h && g.mul(h, e) == h;
            if (ok) {
                identity = e;
                break;
            }
        }
        if (!identity) throw ValidationError("table has no identity element");
        g.identity_ = *identity;

        g.inv_.assign(order, 0);
        for (std::uint32_t a = 0; a < order; ++a) {
            std::optional<std::uint32_t> inv;
            for (std::uint32_t b = 0; b < order; ++b)
                if (g.mul(a, b) == g.identity_ && g.mul(b, a) == g.identity_) {
                    inv = b;
                    break;
                }
            if (!inv) throw ValidationError("element without a two-sided inverse");
            g.inv_[a] = *inv;
        }

        const std::uint64_t triples = static_cast<std::uint64_t>(order) * order * order;
        if (triples <= assoc_spot_checks) {
            for (std::uint32_t a = 0; a < order; ++a)
                for (std::uint32_t b = 0; b < order; ++b)
                    for (std::uint32_t c = 0; c < order; ++c)
                        if (g.mul(g.mul(a, b), c) != g.mul(a, g.mul(b, c)))
                            throw ValidationError("associativity check failed");
        } else {
            SplitMix64 rng(seed);
            for (std::uint64_t i = 0; i < assoc_spot_checks; ++i) {
                auto a = static_cast<std::uint32_t>(rng.below(order));
                auto b = static_cast<std::uint32_t>(rng.below(order));
                auto c = static_cast<std::uint32_t>(rng.below(order));
                if (g.mul(g.mul(a, b), c) != g.mul(a, g.mul(b, c)))
                    throw ValidationError("associativity spot-check failed");
            }
        }

        for (std::uint32_t z = 0; z < order; ++z) {
            bool central = true;
            for (std::uint32_t h = 0; h < order && central; ++h)
                central = g.mul(z, h) == g.mul(h, z);
            if (central) g.center_.push_back(z);
        }

        if (names.empty()) {
            for (std::uint32_t i = 0; i < order; ++i)
                names.push_back(i == g.identity_ ? "e" : "g" + std::to_string(i));
        }
        if (names.size() != order) throw ValidationError("expected one name per element");
        g.names_ = std::move(names);
        return g;
    }

    // "c2" or "psl2-<p>" for p in {2,3,5,7,11,13}.
    static FiniteGroupTable builtin(std::string_view name) {
        if (name == "c2") return from_table(2, {0, 1, 1, 0}, {"e", "c"});
        for (std::uint32_t p : {2u, 3u, 5u, 7u, 11u, 13u}) {
            if (name == "psl2-" + std::to_string(p)) return psl2(p);
        }
        throw NotFoundError("unknown builtin group '" + std::string(name) + "'");
    }

    static FiniteGroupTable psl2(std::uint32_t p) {
        if (!is_prime_u64(p) || p > 13)
            throw ValidationError("psl2 builtins cover primes up to 13");
        // Enumerate SL_2(p) and identify X with -X.
        auto canonical = [p](std::array<std::uint32_t, 4> m) {
            std::array<std::uint32_t, 4> n;
            for (int i = 0; i < 4; ++i) n[i] = (p - m[i]) % p;
            return std::min(m, n);
        };
        std::vector<std::array<std::uint32_t, 4>> reps;
        for (std::uint32_t a = 0; a < p; ++a)
            for (std::uint32_t b = 0; b < p; ++b)
                for (std::uint32_t c = 0; c < p; ++c)
                    for (std::uint32_t d = 0; d < p; ++d) {
                        if ((static_cast<std::uint64_t>(a) * d % p + p -
                             static_cast<std::uint64_t>(b) * c % p) % p != 1)
                            continue;
                        auto rep = canonical({a, b, c, d});
                        reps.push_back(rep);
                    }
        std::sort(reps.begin(), reps.end());
        reps.erase(std::unique(reps.begin(), reps.end()), reps.end());
        auto index_of = [&](const std::array<std::uint32_t, 4>& m) {
            return static_cast<std::uint32_t>(
                std::lower_bound(reps.begin(), reps.end(), m) - reps.begin());
        };
        const auto order = static_cast<std::uint32_t>(reps.size());
        std::vector<std::uint32_t> mul(static_cast<std::size_t>(order) * order);
        for (std::uint32_t i = 0; i < order; ++i)
            for (std::uint32_t j = 0; j < order; ++j) {
                const auto& x = reps[i];
                const auto& y = reps[j];
                std::array<std::uint32_t, 4> z{
                    static_cast<std::uint32_t>((static_cast<std::uint64_t>(x[0]) * y[0] +
                                                static_cast<std::uint64_t>(x[1]) * y[2]) % p),
                    static_cast<std::uint32_t>((static_cast<std::uint64_t>(x[0]) * y[1] +
                                                static_cast<std::uint64_t>(x[1]) * y[3]) % p),
                    static_cast<std::uint32_t>((static_cast<std::uint64_t>(x[2]) * y[0] +
                                                static_cast<std::uint64_t>(x[3]) * y[2]) % p),
                    static_cast<std::uint32_t>((static_cast<std::uint64_t>(x[2]) * y[1] +
                                                static_cast<std::uint64_t>(x[3]) * y[3]) % p)};
                mul[static_cast<std::size_t>(i) * order + j] = index_of(canonical(z));
            }
        return from_table(order, std::move(mul));
    }

    std::uint32_t order() const { return order_; }
    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
        return mul_[static_cast<std::size_t>(a) * order_ + b];
    }
    std::uint32_t inv(std::uint32_t a) const { return inv_[a]; }
    std::uint32_t identity() const { return identity_; }
    const std::vector<std::uint32_t>& center() const { return center_; }
    bool is_central(std::uint32_t g) const {
        return std::binary_search(center_.begin(), center_.end(), g);
    }
    const std::string& name(std::uint32_t g) const { return names_[g]; }

    std::uint32_t power(std::uint32_t g, std::int64_t e) const {
        std::uint32_t base = e >= 0 ? g : inv(g);
        std::uint64_t k = static_cast<std::uint64_t>(e >= 0 ? e : -e);
        std::uint32_t acc = identity_;
        for (std::uint64_t i = 0; i < k; ++i) acc = mul(acc, base);
        return acc;
    }

private:
    std::uint32_t order_ = 0;
    std::uint32_t identity_ = 0;
    std::vector<std::uint32_t> mul_, inv_, center_;
    std::vector<std::string> names_;
};

// ---------------------------------------------------------------------------
// Exact complexity
// ---------------------------------------------------------------------------

struct ComplexityRecord {
    std::optional<std::uint64_t> chi;  // nullopt: unresolved past the radius
    FreeWord witness;                  // meaningful when resolved
    int radius_searched = 0;
    std::uint64_t scanned = 0;
};

// Minimal |g| with w(g) != e, by scanning the free ball in length-then-lex
// order. chi = 0 is possible: the identity is a legitimate witness when the
// constants do not cancel.
inline ComplexityRecord exact_complexity(const ConstWord& w, const GeneratorSet& gens,
                                         int r_max, std::uint64_t cap = kDefaultBallCap) {
    ComplexityRecord rec;
    rec.radius_searched = r_max;
    BallCursor cursor(gens, r_max, cap);
    while (auto g = cursor.next()) {
        ++rec.scanned;
        if (!substitute(w, *g).is_identity()) {
            rec.chi = g->length();
            rec.witness = *g;
            return rec;
        }
    }
    return rec;
}

// ---------------------------------------------------------------------------
// Exhaustive equation enumeration
// ---------------------------------------------------------------------------

namespace detail {

template <typename F>
void reduced_words_of_length(int rank, int length, F&& fn) {
    std::vector<int> letters;
    std::function<void()> rec = [&]() {
        if (static_cast<int>(letters.size()) == length) {
            std::vector<Syllable> raw;
            for (int l : letters) raw.push_back({l >> 1, (l & 1) ? -1 : +1});
            fn(free_reduce(raw));
            return;
        }
        for (int l = 0; l < 2 * rank; ++l) {
            if (!letters.empty() && (l ^ 1) == letters.back()) continue;
            letters.push_back(l);
            rec();
            letters.pop_back();
        }
    };
    rec();
}

}  // namespace detail

// Every canonical equation of total length <= n_max, each exactly once.
template <typename F>
inline void enumerate_const_words(const GeneratorSet& gens, int n_max, F&& fn) {
    std::vector<ConstWord::Block> blocks;

    std::function<void(int, std::int64_t)> after_x;   // may stop or open a constant
    std::function<void(int, std::int64_t)> after_const;  // choose the next exponent

    after_x = [&](int budget, std::int64_t a0) {
        if (a0 != 0 || !blocks.empty()) fn(ConstWord::make(a0, blocks));
        for (int q = 1; q <= budget; ++q) {
            detail::reduced_words_of_length(gens.rank(), q, [&](const FreeWord& c) {
                if (static_cast<int>(c.length()) != q) return;  // only strictly reduced spellings
                blocks.push_back({c, 0});
                after_const(budget - q, a0);
                blocks.pop_back();
            });
        }
    };
    after_const = [&](int budget, std::int64_t a0) {
        fn(ConstWord::make(a0, blocks));  // trailing exponent stays 0
        for (int j = 1; j <= budget; ++j) {
            for (int sign : {+1, -1}) {
                blocks.back().exponent = sign * j;
                after_x(budget - j, a0);
            }
        }
        blocks.back().exponent = 0;
    };

    for (std::int64_t a0 = -n_max; a0 <= n_max; ++a0) {
        int used = static_cast<int>(a0 < 0 ? -a0 : a0);
        // a0 == 0 means the word starts with a constant.
        blocks.clear();
        after_x(n_max - used, a0);
    }
}

struct GrowthRow {
    int n = 0;
    std::uint64_t max_chi = 0;
    bool all_resolved = true;
    std::uint64_t words = 0;  // canonical equations of length exactly n
};

// Exact MIF growth at desk scale: enumerate every equation of length <= n_max
// and take maxima of exact complexities. Rows inherit unresolved flags.
inline std::vector<GrowthRow> exact_growth(int n_max, int r_max,
                                           const GeneratorSet& gens,
                                           std::uint64_t cap = kDefaultBallCap) {
    std::vector<GrowthRow> rows(static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) rows[static_cast<std::size_t>(n)].n = n;
    enumerate_const_words(gens, n_max, [&](const ConstWord& w) {
        auto& row = rows[w.length()];
        ++row.words;
        ComplexityRecord rec = exact_complexity(w, gens, r_max, cap);
        if (!rec.chi) {
            row.all_resolved = false;
        } else {
            row.max_chi = std::max(row.max_chi, *rec.chi);
        }
    });
    // M(n) is a maximum over nested sets: accumulate.
    for (std::size_t n = 1; n < rows.size(); ++n) {
        rows[n].max_chi = std::max(rows[n].max_chi, rows[n - 1].max_chi);
        rows[n].all_resolved = rows[n].all_resolved && rows[n - 1].all_resolved;
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Mixed identities of finite groups
// ---------------------------------------------------------------------------

// Equation over a finite group: x^{a0} c1 x^{a1} ... ck x^{ak} with the c_i
// non-central element ids; each constant counts 1 toward the length.
struct GroupWord {
    std::int64_t a0 = 0;
    std::vector<std::pair<std::uint32_t, std::int64_t>> blocks;  // (element, exponent)

    std::uint64_t length() const {
        auto mag = [](std::int64_t v) { return static_cast<std::uint64_t>(v < 0 ? -v : v); };
        std::uint64_t n = mag(a0);
        for (const auto& [c, e] : blocks) n += 1 + mag(e);
        return n;
    }

    GroupWord inverted(const FiniteGroupTable& G) const {
        GroupWord out;
        if (blocks.empty()) {
            out.a0 = -a0;
            return out;
        }
        out.a0 = -blocks.back().second;
        for (std::size_t i = blocks.size(); i-- > 0;) {
            std::int64_t e = (i == 0) ? -a0 : -blocks[i - 1].second;
            out.blocks.emplace_back(G.inv(blocks[i].first), e);
        }
        return out;
    }

    std::uint32_t evaluate(const FiniteGroupTable& G, std::uint32_t g) const {
        std::uint32_t acc = G.power(g, a0);
        for (const auto& [c, e] : blocks) {
            acc = G.mul(acc, c);
            if (e != 0) acc = G.mul(acc, G.power(g, e));
        }
        return acc;
    }

    std::string render(const FiniteGroupTable& G) const {
        std::string out;
        auto term = [&](const std::string& name, std::int64_t e) {
            if (!out.empty()) out += ' ';
            out += name;
            if (e != 1) out += "^" + std::to_string(e);
        };
        if (a0 != 0) term("x", a0);
        for (const auto& [c, e] : blocks) {
            term(G.name(c), 1);
            if (e != 0) term("x", e);
        }
        return out;
    }

    friend auto operator<=>(const GroupWord&, const GroupWord&) = default;
};

namespace detail {

// Collation for the inversion quotient: positive exponents precede negative
// ones of the same magnitude, so x^2 represents the pair {x^2, x^-2}.
inline std::uint64_t exp_rank(std::int64_t e) {
    std::uint64_t mag = static_cast<std::uint64_t>(e < 0 ? -e : e);
    return 2 * mag + (e < 0 ? 1 : 0);
}

inline std::vector<std::uint64_t> group_word_key(const GroupWord& w) {
    std::vector<std::uint64_t> key{w.length(), w.blocks.size(), exp_rank(w.a0)};
    for (const auto& [c, e] : w.blocks) {
        key.push_back(c);
        key.push_back(exp_rank(e));
    }
    return key;
}

}  // namespace detail

struct MixedIdentitySearch {
    std::vector<GroupWord> identities;
    std::uint64_t words_tested = 0;
    std::uint64_t words_enumerated = 0;
};

// Exhaustive search for mixed identities of length <= max_length, modulo two
// exactness-preserving reductions:
//  - inversion: w and w^-1 vanish together, keep the smaller key;
//  - bookend conjugation: when a0 = ak = 0 and ck*c1 stays non-central,
//    c1^-1 w c1 is a strictly shorter equation in the enumeration that
//    vanishes iff w does, so w is skipped.
// Bare constants (k = 1 with no variable) never vanish and are skipped too.
inline MixedIdentitySearch mixed_identity_search(const FiniteGroupTable& G, int max_length,
                                                 std::uint64_t word_cap = std::uint64_t(1)
                                                                          << 24) {
    std::vector<std::uint32_t> constants;
    for (std::uint32_t g = 0; g < G.order(); ++g)
        if (!G.is_central(g)) constants.push_back(g);

    MixedIdentitySearch result;
    GroupWord current;

    auto consider = [&](const GroupWord& w) {
        ++result.words_enumerated;
        if (result.words_enumerated > word_cap)
            throw ResourceError("mixed-identity enumeration exceeded the word cap");
        if (w.blocks.size() == 1 && w.a0 == 0 && w.blocks[0].second == 0) return;
        if (w.blocks.size() >= 2 && w.a0 == 0 && w.blocks.back().second == 0) {
            std::uint32_t wrap = G.mul(w.blocks.back().first, w.blocks.front().first);
            if (!G.is_central(wrap)) return;  // a shorter conjugate is enumerated
        }
        GroupWord inv = w.inverted(G);
        if (detail::group_word_key(inv) < detail::group_word_key(w)) return;
        ++result.words_tested;
        for (std::uint32_t g = 0; g < G.order(); ++g)
            if (w.evaluate(G, g) != G.identity()) return;
        result.identities.push_back(w);
    };

    std::function<void(int)> after_x;
    std::function<void(int)> after_const;
    after_x = [&](int budget) {
        if (current.a0 != 0 || !current.blocks.empty()) consider(current);
        if (budget < 1) return;
        for (std::uint32_t c : constants) {
            current.blocks.emplace_back(c, 0);
            after_const(budget - 1);
            current.blocks.pop_back();
        }
    };
    after_const = [&](int budget) {
        consider(current);
        for (int j = 1; j <= budget; ++j) {
            for (int sign : {+1, -1}) {
                current.blocks.back().second = sign * j;
                after_x(budget - j);
            }
        }
        current.blocks.back().second = 0;
    };

    for (std::int64_t a0 = -max_length; a0 <= max_length; ++a0) {
        int used = static_cast<int>(a0 < 0 ? -a0 : a0);
        current = GroupWord{};
        current.a0 = a0;
        after_x(max_length - used);
    }
    std::sort(result.identities.begin(), result.identities.end());
    return result;
}

}  // namespace logwitness
