#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "logwitness/errors.hpp"
#include "logwitness/modp.hpp"
#include "logwitness/words.hpp"

namespace logwitness {

inline constexpr std::uint64_t kDefaultElementCap = std::uint64_t(1) << 27;

// Layered breadth-first exploration of the Cayley graph of the subgroup of
// SL_d(p) generated by the given matrices, under the symmetric labeled set
// g_0, g_0^-1, g_1, g_1^-1, ... (label 2i is generator i, 2i+1 its inverse).
//
// Elements are interned as packed 64-bit keys in discovery order, so ids are
// BFS order: within a layer, parents ascend and labels follow the fixed
// order, which makes every parent chain the lexicographically least geodesic.
class CayleyBall {
public:
    CayleyBall(std::vector<ModMatrix> generators, std::uint64_t element_cap = kDefaultElementCap)
        : cap_(element_cap) {
        if (generators.empty()) throw ValidationError("need at least one generator");
        dim_ = generators[0].dim();
        p_ = generators[0].modulus();
        pack_ = detail::ModPack(dim_, p_);
        for (const auto& g : generators) {
            if (g.dim() != dim_ || g.modulus() != p_)
                throw ValidationError("generator dimensions or moduli differ");
            labels_.push_back(pack_->key(g));
            labels_.push_back(pack_->key(g.inverse()));
        }
        std::uint64_t id_key = pack_->key(ModMatrix::identity(dim_, p_));
        keys_.push_back(id_key);
        parent_.push_back(0);
        parent_label_.push_back(0);
        index_.emplace(id_key, 0);
        layer_offsets_ = {0, 1};
    }

    std::uint32_t p() const { return p_; }
    int dim() const { return dim_; }
    std::uint64_t size() const { return keys_.size(); }
    bool complete() const { return complete_; }
    bool capped() const { return capped_; }
    int rank() const { return static_cast<int>(labels_.size() / 2); }

    // Number of fully materialized BFS layers (= max depth + 1).
    int layer_count() const { return static_cast<int>(layer_offsets_.size()) - 1; }
    std::uint64_t layer_begin(int l) const { return layer_offsets_[static_cast<std::size_t>(l)]; }
    std::uint64_t layer_end(int l) const { return layer_offsets_[static_cast<std::size_t>(l) + 1]; }

    int depth_of(std::uint64_t id) const {
        int lo = 0, hi = layer_count() - 1;
        while (lo < hi) {
            int mid = (lo + hi) / 2;
            if (id < layer_end(mid)) hi = mid; else lo = mid + 1;
        }
        return lo;
    }

    ModMatrix element(std::uint64_t id) const { return pack_->unpack(keys_[id]); }

    std::optional<std::uint64_t> find(const ModMatrix& m) const {
        auto it = index_.find(pack_->key(m));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    // Expands one BFS layer. Returns false (without changing state) once the
    // ball is closed or the cap was hit.
    bool grow_layer() {
        if (complete_ || capped_) return false;
        const int last = layer_count() - 1;
        const std::uint64_t begin = layer_begin(last), end = layer_end(last);
        std::vector<std::uint32_t> cur(static_cast<std::size_t>(dim_) * dim_);
        std::vector<std::uint32_t> mul(cur.size()), out(cur.size());
        for (std::uint64_t id = begin; id < end; ++id) {
            pack_->unpack(keys_[id], cur.data());
            for (std::size_t l = 0; l < labels_.size(); ++l) {
                pack_->unpack(labels_[l], mul.data());
                detail::flat_mul(cur.data(), mul.data(), out.data(), dim_, p_);
                std::uint64_t key = pack_->key(out.data());
                if (index_.contains(key)) continue;
                if (keys_.size() >= cap_) {
                    capped_ = true;
                    // Drop the partially built layer to keep invariants.
                    for (std::uint64_t i = keys_.size(); i-- > end;) index_.erase(keys_[i]);
                    keys_.resize(end);
                    parent_.resize(end);
                    parent_label_.resize(end);
                    return false;
                }
                index_.emplace(key, keys_.size());
                keys_.push_back(key);
                parent_.push_back(static_cast<std::uint32_t>(id));
                parent_label_.push_back(static_cast<std::uint8_t>(l));
            }
        }
        if (keys_.size() == end) {
            complete_ = true;
            return false;
        }
        layer_offsets_.push_back(keys_.size());
        return true;
    }

    void explore() {
        while (grow_layer()) {
        }
    }

    // Geodesic word for an element, read off the parent chain. Geodesics are
    // freely reduced by minimality, so syllable merging suffices.
    FreeWord lift_word(std::uint64_t id) const {
        std::vector<Syllable> rev;
        while (id != 0) {
            int label = parent_label_[id];
            int gen = label >> 1;
            std::int64_t sign = (label & 1) ? -1 : +1;
            if (!rev.empty() && rev.back().gen == gen) {
                rev.back().exp += sign;
            } else {
                rev.push_back({gen, sign});
            }
            id = parent_[id];
        }
        std::vector<Syllable> fwd(rev.rbegin(), rev.rend());
        return free_reduce(fwd);
    }

private:
    std::uint64_t cap_;
    int dim_ = 0;
    std::uint32_t p_ = 0;
    std::optional<detail::ModPack> pack_;
    std::vector<std::uint64_t> labels_;
    std::vector<std::uint64_t> keys_;
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint8_t> parent_label_;
    std::vector<std::uint64_t> layer_offsets_;
    std::unordered_map<std::uint64_t, std::uint64_t> index_;
    bool complete_ = false;
    bool capped_ = false;
};

inline CayleyBall explore(std::vector<ModMatrix> generators,
                          std::uint64_t element_cap = kDefaultElementCap) {
    CayleyBall ball(std::move(generators), element_cap);
    ball.explore();
    return ball;
}

struct DiameterRecord {
    std::uint64_t p = 0;
    int diameter = 0;
    std::vector<std::uint64_t> layer_sizes;
    std::uint64_t group_order = 0;  // elements reached (= subgroup order when complete)
};

inline DiameterRecord diameter(const CayleyBall& ball) {
    if (!ball.complete())
        throw PartialBallError("diameter needs a fully explored ball");
    DiameterRecord rec;
    rec.p = ball.p();
    rec.diameter = ball.layer_count() - 1;
    rec.group_order = ball.size();
    for (int l = 0; l < ball.layer_count(); ++l)
        rec.layer_sizes.push_back(ball.layer_end(l) - ball.layer_begin(l));
    return rec;
}

inline FreeWord lift(const CayleyBall& ball, const ModMatrix& target) {
    auto id = ball.find(target);
    if (!id) throw NotFoundError("target element is not in the explored ball");
    return ball.lift_word(*id);
}

struct InjectivityRadius {
    std::uint64_t p = 0;
    int radius = 0;
    bool collision_found = false;  // false: clean up to the radius cap
    FreeWord witness_a, witness_b; // colliding pair when found
};

// Largest r such that reduce-after-evaluate is injective on the free ball
// B(r): enumerate words in length order and hash their mod-p images until
// the first collision.
inline InjectivityRadius injectivity_radius(std::uint32_t p, const MatrixGenerators& gens,
                                            const GeneratorSet& symbols, int radius_cap = 24,
                                            std::uint64_t ball_cap = kDefaultBallCap) {
    if (symbols.rank() != gens.rank())
        throw ValidationError("symbol set and matrix generators disagree on rank");
    detail::ModPack pack(gens.dim(), p);
    std::vector<ModMatrix> reduced, reduced_inv;
    for (int i = 0; i < gens.rank(); ++i) {
        reduced.push_back(reduce_mod(gens.gen(i), p));
        reduced_inv.push_back(reduce_mod(gens.inv(i), p));
    }
    int effective_cap = radius_cap;
    while (effective_cap > 0 && ball_count(symbols.rank(), effective_cap) > ball_cap)
        --effective_cap;

    std::unordered_map<std::uint64_t, FreeWord> images;
    InjectivityRadius result;
    result.p = p;
    BallCursor cursor(symbols, effective_cap, ball_cap);
    while (auto w = cursor.next()) {
        ModMatrix img = ModMatrix::identity(gens.dim(), p);
        for (const auto& s : w->syllables()) {
            const ModMatrix& base = s.exp >= 0 ? reduced[static_cast<std::size_t>(s.gen)]
                                               : reduced_inv[static_cast<std::size_t>(s.gen)];
            img = img * base.pow(s.exp >= 0 ? s.exp : -s.exp);
        }
        auto [it, fresh] = images.try_emplace(pack.key(img), *w);
        if (!fresh) {
            result.radius = static_cast<int>(w->length()) - 1;
            result.collision_found = true;
            result.witness_a = it->second;
            result.witness_b = *w;
            return result;
        }
    }
    result.radius = effective_cap;
    result.collision_found = false;
    return result;
}

struct ProductGrowthStats {
    std::uint64_t size_a = 0;
    std::uint64_t size_aaa = 0;
    double exponent = 1.0;    // log |AAA| / log |A|
    bool whole_group = false; // AAA covers SL_d(p) up to scalars
};

// Measures |AAA| for A = B(r) in the explored ball. The whole-group flag is
// taken modulo the scalar center.
inline ProductGrowthStats product_growth(const CayleyBall& ball, int r,
                                         std::uint64_t op_budget = std::uint64_t(1) << 32) {
    if (r + 1 > ball.layer_count())
        throw PartialBallError("ball does not contain layer " + std::to_string(r));
    const int d = ball.dim();
    const std::uint32_t p = ball.p();
    detail::ModPack pack(d, p);

    std::vector<std::uint64_t> a_keys;
    for (std::uint64_t id = 0; id < ball.layer_end(r); ++id)
        a_keys.push_back(pack.key(ball.element(id)));

    auto product_set = [&](const std::vector<std::uint64_t>& lhs,
                           const std::vector<std::uint64_t>& rhs) {
        if (static_cast<unsigned __int128>(lhs.size()) * rhs.size() > op_budget)
            throw ResourceError("triple-product budget exceeded");
        std::unordered_set<std::uint64_t> out;
        std::vector<std::uint32_t> x(static_cast<std::size_t>(d) * d), y(x.size()), z(x.size());
        for (std::uint64_t lk : lhs) {
            pack.unpack(lk, x.data());
            for (std::uint64_t rk : rhs) {
                pack.unpack(rk, y.data());
                detail::flat_mul(x.data(), y.data(), z.data(), d, p);
                out.insert(pack.key(z.data()));
            }
        }
        return std::vector<std::uint64_t>(out.begin(), out.end());
    };

    auto aa = product_set(a_keys, a_keys);
    auto aaa = product_set(aa, a_keys);

    ProductGrowthStats stats;
    stats.size_a = a_keys.size();
    stats.size_aaa = aaa.size();
    stats.exponent = (stats.size_a > 1)
                         ? std::log(static_cast<double>(stats.size_aaa)) /
                               std::log(static_cast<double>(stats.size_a))
                         : 1.0;
    // Scalars lambda*I with lambda^d = 1.
    std::vector<std::uint64_t> center;
    for (std::uint32_t lam = 1; lam < p; ++lam) {
        if (detail::powmod_u64(lam, static_cast<std::uint64_t>(d), p) != 1) continue;
        ModMatrix s(d, p);
        for (int i = 0; i < d; ++i) s.at(i, i) = lam;
        center.push_back(pack.key(s));
    }
    auto order = sl_order(d, p);
    if (order) {
        auto covered = product_set(aaa, center);
        stats.whole_group = covered.size() == *order;
    }
    return stats;
}

struct SweepRow {
    std::uint64_t p = 0;
    std::uint64_t group_order = 0;
    int diameter = 0;
    int injectivity_radius = 0;
    double seconds = 0.0;
};

// Full diameter + injectivity radius for one prime. `emit_seconds` keeps the
// measured wall time out of canonical outputs unless asked for.
inline SweepRow sweep_prime(std::uint64_t p, const MatrixGenerators& gens,
                            const GeneratorSet& symbols,
                            std::uint64_t element_cap = kDefaultElementCap,
                            bool emit_seconds = false) {
    auto start = std::chrono::steady_clock::now();
    if (p > 0xFFFFFFFFull) throw ValidationError("prime too large for a sweep");
    const auto p32 = static_cast<std::uint32_t>(p);
    std::vector<ModMatrix> reduced;
    for (int i = 0; i < gens.rank(); ++i) reduced.push_back(reduce_mod(gens.gen(i), p32));
    CayleyBall ball = explore(std::move(reduced), element_cap);
    if (!ball.complete())
        throw ResourceError("SL ball for p=" + std::to_string(p) + " hit the element cap");
    DiameterRecord rec = diameter(ball);
    InjectivityRadius inj = injectivity_radius(p32, gens, symbols);
    SweepRow row;
    row.p = p;
    row.group_order = rec.group_order;
    row.diameter = rec.diameter;
    row.injectivity_radius = inj.radius;
    if (emit_seconds) {
        row.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    return row;
}

inline std::string sweep_csv(std::span<const SweepRow> rows) {
    std::string out = "p,group_order,diameter,injectivity_radius,seconds\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%llu,%llu,%d,%d,%.3f\n",
                      static_cast<unsigned long long>(r.p),
                      static_cast<unsigned long long>(r.group_order), r.diameter,
                      r.injectivity_radius, r.seconds);
        out += buf;
    }
    return out;
}

}  // namespace logwitness
