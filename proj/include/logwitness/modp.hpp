#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "logwitness/errors.hpp"
#include "logwitness/intmat.hpp"
#include "logwitness/words.hpp"

namespace logwitness {

// ---------------------------------------------------------------------------
// Primality
// ---------------------------------------------------------------------------

namespace detail {

inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t e, std::uint64_t m) {
    std::uint64_t acc = 1 % m;
    base %= m;
    while (e > 0) {
        if (e & 1) acc = mulmod_u64(acc, base, m);
        base = mulmod_u64(base, base, m);
        e >>= 1;
    }
    return acc;
}

}  // namespace detail

// Deterministic Miller-Rabin; the fixed base set decides every 64-bit input.
inline bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull,
                            31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int r = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++r;
    }
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull,
                            31ull, 37ull}) {
        std::uint64_t x = detail::powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 1; i < r; ++i) {
            x = detail::mulmod_u64(x, x, n);
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

// Plain sieve of Eratosthenes up to `limit` inclusive.
inline std::vector<std::uint64_t> sieve_primes(std::uint64_t limit) {
    std::vector<std::uint64_t> out;
    if (limit < 2) return out;
    std::vector<bool> composite(limit + 1, false);
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        out.push_back(i);
        for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Prime windows (C0*n, C0*n^2]
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kDefaultWindowPrimeCap = std::uint64_t(1) << 22;

struct PrimeWindow {
    std::uint64_t n = 0, c0 = 0;
    std::uint64_t lo = 0, hi = 0;  // primes p with lo < p <= hi
    std::vector<std::uint64_t> primes;
};

// Ascending lazy walk over the primes of (lo, hi].
class PrimeCursor {
public:
    PrimeCursor(std::uint64_t lo, std::uint64_t hi) : next_(lo + 1), hi_(hi) {}

    std::optional<std::uint64_t> next() {
        while (next_ <= hi_) {
            std::uint64_t candidate = next_++;
            if (is_prime_u64(candidate)) return candidate;
        }
        return std::nullopt;
    }

private:
    std::uint64_t next_, hi_;
};

namespace detail {

inline std::pair<std::uint64_t, std::uint64_t> window_bounds(std::uint64_t n, std::uint64_t c0) {
    if (n == 0 || c0 == 0) throw ValidationError("window parameters must be positive");
    std::uint64_t lo = c0 * n;
    if (lo / c0 != n) throw ValidationError("window lower bound overflows");
    std::uint64_t hi = lo * n;
    if (hi / lo != n) throw ValidationError("window upper bound overflows");
    return {lo, hi};
}

}  // namespace detail

inline PrimeWindow prime_window(std::uint64_t n, std::uint64_t c0,
                                std::uint64_t prime_cap = kDefaultWindowPrimeCap) {
    auto [lo, hi] = detail::window_bounds(n, c0);
    PrimeWindow w{n, c0, lo, hi, {}};
    PrimeCursor cursor(lo, hi);
    while (auto p = cursor.next()) {
        if (w.primes.size() >= prime_cap)
            throw ResourceError("prime window holds more than " + std::to_string(prime_cap) +
                                " primes");
        w.primes.push_back(*p);
    }
    if (w.primes.empty())
        throw EmptyWindowError("no primes in (" + std::to_string(lo) + ", " +
                               std::to_string(hi) + "]");
    return w;
}

struct WindowProductReport {
    std::uint64_t n = 0, c0 = 0;
    double c = 0.0;
    std::uint64_t prime_count = 0;
    double log_sum = 0.0;   // sum of log p over the window
    double threshold = 0.0; // c * n^2
    bool passes = false;
};

// Measures sum(log p) over the window against c*n^2. A failed threshold is a
// reported outcome, not an error.
inline WindowProductReport window_product_check(std::uint64_t n, std::uint64_t c0, double c) {
    auto [lo, hi] = detail::window_bounds(n, c0);
    WindowProductReport report;
    report.n = n;
    report.c0 = c0;
    report.c = c;
    report.threshold = c * static_cast<double>(n) * static_cast<double>(n);
    PrimeCursor cursor(lo, hi);
    while (auto p = cursor.next()) {
        ++report.prime_count;
        report.log_sum += std::log(static_cast<double>(*p));
    }
    if (report.prime_count == 0)
        throw EmptyWindowError("no primes in (" + std::to_string(lo) + ", " +
                               std::to_string(hi) + "]");
    report.passes = report.log_sum >= report.threshold;
    return report;
}

// ---------------------------------------------------------------------------
// SL_d(p)
// ---------------------------------------------------------------------------

// Dense d x d matrix of residues mod a prime p. Determinant-1 inputs are the
// caller's contract; reduce_mod preserves it automatically.
class ModMatrix {
public:
    ModMatrix(int dim, std::uint32_t p) : dim_(dim), p_(p), e_(static_cast<std::size_t>(dim) * dim) {}

    static ModMatrix identity(int dim, std::uint32_t p) {
        ModMatrix m(dim, p);
        for (int i = 0; i < dim; ++i) m.at(i, i) = 1 % p;
        return m;
    }

    int dim() const { return dim_; }
    std::uint32_t modulus() const { return p_; }
    std::uint32_t& at(int i, int j) { return e_[static_cast<std::size_t>(i) * dim_ + j]; }
    std::uint32_t at(int i, int j) const { return e_[static_cast<std::size_t>(i) * dim_ + j]; }
    const std::vector<std::uint32_t>& entries() const { return e_; }

    ModMatrix operator*(const ModMatrix& rhs) const {
        ModMatrix out(dim_, p_);
        for (int i = 0; i < dim_; ++i)
            for (int k = 0; k < dim_; ++k) {
                std::uint64_t lik = at(i, k);
                if (lik == 0) continue;
                for (int j = 0; j < dim_; ++j) {
                    std::uint64_t v = out.at(i, j) + lik * rhs.at(k, j) % p_;
                    out.at(i, j) = static_cast<std::uint32_t>(v % p_);
                }
            }
        return out;
    }

    std::uint32_t det_mod() const {
        // Gaussian elimination over F_p.
        std::vector<std::uint64_t> m(e_.begin(), e_.end());
        const int n = dim_;
        auto idx = [n](int i, int j) { return static_cast<std::size_t>(i) * n + j; };
        std::uint64_t det = 1;
        for (int k = 0; k < n; ++k) {
            int pivot = -1;
            for (int i = k; i < n; ++i)
                if (m[idx(i, k)] % p_ != 0) {
                    pivot = i;
                    break;
                }
            if (pivot < 0) return 0;
            if (pivot != k) {
                for (int j = 0; j < n; ++j) std::swap(m[idx(k, j)], m[idx(pivot, j)]);
                det = (p_ - det % p_) % p_;
            }
            std::uint64_t pk = m[idx(k, k)] % p_;
            det = detail::mulmod_u64(det, pk, p_);
            std::uint64_t inv = detail::powmod_u64(pk, p_ - 2, p_);
            for (int i = k + 1; i < n; ++i) {
                std::uint64_t factor = detail::mulmod_u64(m[idx(i, k)] % p_, inv, p_);
                if (factor == 0) continue;
                for (int j = k; j < n; ++j) {
                    std::uint64_t sub = detail::mulmod_u64(factor, m[idx(k, j)] % p_, p_);
                    m[idx(i, j)] = (m[idx(i, j)] % p_ + p_ - sub) % p_;
                }
            }
        }
        return static_cast<std::uint32_t>(det % p_);
    }

    // Inverse via Gauss-Jordan; requires invertibility.
    ModMatrix inverse() const {
        const int n = dim_;
        std::vector<std::uint64_t> a(e_.begin(), e_.end());
        ModMatrix out = identity(n, p_);
        auto idx = [n](int i, int j) { return static_cast<std::size_t>(i) * n + j; };
        for (int k = 0; k < n; ++k) {
            int pivot = -1;
            for (int i = k; i < n; ++i)
                if (a[idx(i, k)] % p_ != 0) {
                    pivot = i;
                    break;
                }
            if (pivot < 0) throw ValidationError("mod-p matrix is singular");
            if (pivot != k)
                for (int j = 0; j < n; ++j) {
                    std::swap(a[idx(k, j)], a[idx(pivot, j)]);
                    std::swap(out.at(k, j), out.at(pivot, j));
                }
            std::uint64_t inv = detail::powmod_u64(a[idx(k, k)] % p_, p_ - 2, p_);
            for (int j = 0; j < n; ++j) {
                a[idx(k, j)] = detail::mulmod_u64(a[idx(k, j)] % p_, inv, p_);
                out.at(k, j) = static_cast<std::uint32_t>(
                    detail::mulmod_u64(out.at(k, j), inv, p_));
            }
            for (int i = 0; i < n; ++i) {
                if (i == k) continue;
                std::uint64_t factor = a[idx(i, k)] % p_;
                if (factor == 0) continue;
                for (int j = 0; j < n; ++j) {
                    std::uint64_t sub = detail::mulmod_u64(factor, a[idx(k, j)], p_);
                    a[idx(i, j)] = (a[idx(i, j)] + p_ - sub % p_) % p_;
                    std::uint64_t sub2 = detail::mulmod_u64(factor, out.at(k, j), p_);
                    out.at(i, j) = static_cast<std::uint32_t>((out.at(i, j) + p_ - sub2) % p_);
                }
            }
        }
        return out;
    }

    ModMatrix pow(std::int64_t e) const {
        ModMatrix base = e >= 0 ? *this : inverse();
        std::uint64_t k = static_cast<std::uint64_t>(e >= 0 ? e : -e);
        ModMatrix acc = identity(dim_, p_);
        while (k > 0) {
            if (k & 1) acc = acc * base;
            base = base * base;
            k >>= 1;
        }
        return acc;
    }

    bool is_identity() const { return *this == identity(dim_, p_); }

    friend bool operator==(const ModMatrix&, const ModMatrix&) = default;

private:
    int dim_;
    std::uint32_t p_;
    std::vector<std::uint32_t> e_;
};

// Entrywise residue; a homomorphism SL_d(Z) -> SL_d(p).
inline ModMatrix reduce_mod(const IntMatrix& X, std::uint32_t p) {
    ModMatrix out(X.dim(), p);
    for (int i = 0; i < X.dim(); ++i)
        for (int j = 0; j < X.dim(); ++j) {
            BigInt r = X.at(i, j) % p;
            if (r < 0) r += p;
            out.at(i, j) = r.convert_to<std::uint32_t>();
        }
    return out;
}

// Central elements of SL_d(p) are exactly the scalar matrices.
inline bool is_central(const ModMatrix& X) {
    for (int i = 0; i < X.dim(); ++i)
        for (int j = 0; j < X.dim(); ++j) {
            if (i != j && X.at(i, j) != 0) return false;
            if (i == j && X.at(i, j) != X.at(0, 0)) return false;
        }
    return true;
}

// |SL_d(p)| = p^{d(d-1)/2} * prod_{i=2..d} (p^i - 1); nullopt on overflow.
inline std::optional<std::uint64_t> sl_order(int d, std::uint64_t p) {
    unsigned __int128 order = 1;
    const unsigned __int128 limit = ~std::uint64_t(0);
    for (int i = 0; i < d * (d - 1) / 2; ++i) {
        order *= p;
        if (order > limit) return std::nullopt;
    }
    for (int i = 2; i <= d; ++i) {
        unsigned __int128 q = 1;
        for (int j = 0; j < i; ++j) {
            q *= p;
            if (q > limit) return std::nullopt;
        }
        order *= q - 1;
        if (order > limit) return std::nullopt;
    }
    return static_cast<std::uint64_t>(order);
}

// ---------------------------------------------------------------------------
// Packing
// ---------------------------------------------------------------------------

namespace detail {

// Residue matrices pack into one 64-bit key when d^2 * bits(p-1) <= 64;
// that covers every group small enough to explore anyway.
struct ModPack {
    int dim;
    std::uint32_t p;
    int bits;

    ModPack(int d, std::uint32_t prime) : dim(d), p(prime) {
        bits = std::bit_width(std::uint32_t(p - 1));
        if (bits * d * d > 64)
            throw ResourceError("SL_" + std::to_string(d) + "(" + std::to_string(p) +
                                ") elements do not fit a 64-bit key");
    }

    std::uint64_t key(const std::uint32_t* e) const {
        std::uint64_t k = 0;
        for (int i = dim * dim - 1; i >= 0; --i) k = (k << bits) | e[i];
        return k;
    }

    std::uint64_t key(const ModMatrix& m) const { return key(m.entries().data()); }

    void unpack(std::uint64_t k, std::uint32_t* e) const {
        const std::uint64_t mask = (bits == 64) ? ~0ull : ((1ull << bits) - 1);
        for (int i = 0; i < dim * dim; ++i) {
            e[i] = static_cast<std::uint32_t>(k & mask);
            k >>= bits;
        }
    }

    ModMatrix unpack(std::uint64_t k) const {
        ModMatrix m(dim, p);
        std::vector<std::uint32_t> buf(static_cast<std::size_t>(dim) * dim);
        unpack(k, buf.data());
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) m.at(i, j) = buf[static_cast<std::size_t>(i) * dim + j];
        return m;
    }
};

// dst = a * b over F_p for flat buffers (dim <= 8).
inline void flat_mul(const std::uint32_t* a, const std::uint32_t* b, std::uint32_t* dst, int d,
                     std::uint32_t p) {
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            std::uint64_t acc = 0;
            for (int k = 0; k < d; ++k)
                acc = (acc + static_cast<std::uint64_t>(a[i * d + k]) * b[k * d + j]) % p;
            dst[i * d + j] = static_cast<std::uint32_t>(acc);
        }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Generation of SL_d(p)
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kDefaultClosureCap = std::uint64_t(1) << 22;

// Exact surjectivity test: close the generated set under multiplication and
// compare with |SL_d(p)|. Only affordable when the group order fits the cap.
inline bool check_generates(std::span<const ModMatrix> gens,
                            std::uint64_t element_cap = kDefaultClosureCap) {
    if (gens.empty()) return false;
    const int d = gens[0].dim();
    const std::uint32_t p = gens[0].modulus();
    for (const auto& g : gens)
        if (g.dim() != d || g.modulus() != p)
            throw ValidationError("generation check needs matching dimensions and moduli");
    auto order = sl_order(d, p);
    if (!order || *order > element_cap)
        throw ResourceError("SL_" + std::to_string(d) + "(" + std::to_string(p) +
                            ") exceeds the closure cap");

    detail::ModPack pack(d, p);
    const int dd = d * d;
    std::vector<std::uint64_t> multipliers;
    for (const auto& g : gens) {
        multipliers.push_back(pack.key(g));
        multipliers.push_back(pack.key(g.inverse()));
    }

    std::unordered_set<std::uint64_t> seen;
    std::vector<std::uint64_t> frontier{pack.key(ModMatrix::identity(d, p))};
    seen.insert(frontier[0]);
    std::vector<std::uint32_t> cur(dd), mul(dd), out(dd);
    while (!frontier.empty()) {
        std::vector<std::uint64_t> next;
        for (std::uint64_t key : frontier) {
            pack.unpack(key, cur.data());
            for (std::uint64_t mkey : multipliers) {
                pack.unpack(mkey, mul.data());
                detail::flat_mul(cur.data(), mul.data(), out.data(), d, p);
                std::uint64_t okey = pack.key(out.data());
                if (seen.insert(okey).second) {
                    next.push_back(okey);
                    if (seen.size() == *order) return true;
                }
            }
        }
        frontier = std::move(next);
    }
    return seen.size() == *order;
}

struct GenerationCheck {
    bool surjective = false;
    std::string method;  // "closure" | "unipotent_pair" | "unverified"
};

namespace detail {

// Projective fixed line of a (+-)unipotent 2x2 matrix: a kernel vector of
// X -+ I, normalized to (1, y) or (0, 1).
inline std::optional<std::pair<std::uint32_t, std::uint32_t>> unipotent_line(
    const ModMatrix& X) {
    const std::uint32_t p = X.modulus();
    std::uint32_t tr = static_cast<std::uint32_t>(
        (static_cast<std::uint64_t>(X.at(0, 0)) + X.at(1, 1)) % p);
    std::uint32_t sign;
    if (tr == 2 % p) {
        sign = 1;
    } else if (tr == (p - 2) % p) {
        sign = p - 1;
    } else {
        return std::nullopt;
    }
    // M = X - sign*I; nonzero kernel vector of a singular nonzero matrix.
    auto sub = [&](std::uint32_t a, std::uint32_t b) { return (a + p - b % p) % p; };
    std::uint32_t m00 = sub(X.at(0, 0), sign), m01 = X.at(0, 1);
    std::uint32_t m10 = X.at(1, 0), m11 = sub(X.at(1, 1), sign);
    if (m00 == 0 && m01 == 0 && m10 == 0 && m11 == 0) return std::nullopt;  // scalar
    // Kernel of [[m00,m01],[m10,m11]] with zero determinant.
    std::uint32_t vx, vy;
    if (m00 != 0 || m01 != 0) {
        vx = m01;
        vy = (p - m00) % p;
    } else {
        vx = m11;
        vy = (p - m10) % p;
    }
    if (vx == 0 && vy == 0) return std::nullopt;
    if (vx != 0) {
        std::uint64_t inv = powmod_u64(vx, p - 2, p);
        return std::make_pair(1u, static_cast<std::uint32_t>(mulmod_u64(vy, inv, p)));
    }
    return std::make_pair(0u, 1u);
}

}  // namespace detail

// Generation certificate for d = 2 and p >= 5 without enumerating the group.
// Two elements of order p whose fixed projective lines differ certify
// surjectivity: a proper subgroup of SL_2(p) with order divisible by p is
// conjugate into the upper-triangular group (Dickson), where all unipotents
// share one fixed line, and SL_2(p) is perfect for p >= 5 so no index-2
// subgroup can survive the projection. The search walks short products of
// the generators.
inline GenerationCheck certify_generation_sl2(std::span<const ModMatrix> gens,
                                              int word_budget = 2048) {
    if (gens.empty()) return {false, "unverified"};
    const std::uint32_t p = gens[0].modulus();
    if (gens[0].dim() != 2 || p < 5) return {false, "unverified"};

    std::vector<ModMatrix> frontier{ModMatrix::identity(2, p)};
    std::unordered_set<std::uint64_t> seen;
    detail::ModPack pack(2, p);
    seen.insert(pack.key(frontier[0]));
    std::vector<ModMatrix> multipliers;
    for (const auto& g : gens) {
        multipliers.push_back(g);
        multipliers.push_back(g.inverse());
    }
    std::optional<std::pair<std::uint32_t, std::uint32_t>> first_line;
    int visited = 0;
    while (!frontier.empty() && visited < word_budget) {
        std::vector<ModMatrix> next;
        for (const auto& cur : frontier) {
            for (const auto& m : multipliers) {
                ModMatrix prod = cur * m;
                if (!seen.insert(pack.key(prod)).second) continue;
                if (++visited > word_budget) break;
                next.push_back(prod);
                if (auto line = detail::unipotent_line(prod)) {
                    if (!first_line) {
                        first_line = line;
                    } else if (*line != *first_line) {
                        return {true, "unipotent_pair"};
                    }
                }
            }
        }
        frontier = std::move(next);
    }
    return {false, "unverified"};
}

// Tiered surjectivity: exact closure when the group is small enough,
// otherwise the unipotent-pair certificate.
inline GenerationCheck check_generates_tiered(std::span<const ModMatrix> gens,
                                              std::uint64_t closure_cap = kDefaultClosureCap) {
    if (gens.empty()) return {false, "unverified"};
    auto order = sl_order(gens[0].dim(), gens[0].modulus());
    if (order && *order <= closure_cap) {
        return {check_generates(gens, closure_cap), "closure"};
    }
    return certify_generation_sl2(gens);
}

// ---------------------------------------------------------------------------
// Good primes
// ---------------------------------------------------------------------------

struct GoodPrime {
    std::uint64_t p = 0;
    std::vector<ModMatrix> reduced_gens;
    std::vector<ModMatrix> reduced_constants;
    bool surjective = false;
    std::string generation_method;
};

using GenerationCache = std::map<std::uint64_t, GenerationCheck>;

struct GoodPrimeOptions {
    std::uint64_t closure_cap = kDefaultClosureCap;
    int max_candidates = 64;        // primes examined per window before giving up
    GenerationCache* cache = nullptr;  // optional per-generator-system memo, keyed by p
};

// Walks the window in ascending order and yields primes at which every
// reduced constant stays non-central and the reduced generators provably
// generate SL_d(p). Rejection reasons accumulate in `diagnostics`.
class GoodPrimeSearch {
public:
    GoodPrimeSearch(const ConstWord& w, const MatrixGenerators& gens, std::uint64_t n,
                    std::uint64_t c0, GoodPrimeOptions opt = {})
        : gens_(gens), opt_(opt), cursor_(0, 0) {
        auto [lo, hi] = detail::window_bounds(n, c0);
        if (lo >= hi)
            throw EmptyWindowError("window (" + std::to_string(lo) + ", " +
                                   std::to_string(hi) + "] is empty");
        cursor_ = PrimeCursor(lo, hi);
        for (const auto& b : w.blocks()) constants_.push_back(b.constant);
    }

    std::optional<GoodPrime> next() {
        while (candidates_tried_ < opt_.max_candidates) {
            auto p = cursor_.next();
            if (!p) return std::nullopt;
            ++candidates_tried_;
            if (*p > 0xFFFFFFFFull) {
                diagnostics_.push_back({*p, "modulus_too_large", -1});
                continue;
            }
            GoodPrime gp;
            gp.p = *p;
            const auto prime32 = static_cast<std::uint32_t>(*p);
            for (int i = 0; i < gens_.rank(); ++i)
                gp.reduced_gens.push_back(reduce_mod(gens_.gen(i), prime32));
            bool central_hit = false;
            for (std::size_t i = 0; i < constants_.size(); ++i) {
                ModMatrix c = eval_constant_mod(constants_[i], prime32);
                if (is_central(c)) {
                    diagnostics_.push_back({*p, "central_constant", static_cast<int>(i)});
                    central_hit = true;
                    break;
                }
                gp.reduced_constants.push_back(std::move(c));
            }
            if (central_hit) continue;
            GenerationCheck gen;
            auto cached = opt_.cache ? opt_.cache->find(*p) : GenerationCache::iterator{};
            if (opt_.cache && cached != opt_.cache->end()) {
                gen = cached->second;
            } else {
                try {
                    gen = check_generates_tiered(gp.reduced_gens, opt_.closure_cap);
                } catch (const ResourceError&) {
                    gen = {false, "unverified"};
                }
                if (opt_.cache) opt_.cache->emplace(*p, gen);
            }
            if (!gen.surjective) {
                diagnostics_.push_back({*p, "generation", -1});
                continue;
            }
            gp.surjective = true;
            gp.generation_method = gen.method;
            return gp;
        }
        return std::nullopt;
    }

    const std::vector<PrimeDiagnostic>& diagnostics() const { return diagnostics_; }

private:
    ModMatrix eval_constant_mod(const FreeWord& c, std::uint32_t p) const {
        ModMatrix acc = ModMatrix::identity(gens_.dim(), p);
        for (const auto& s : c.syllables()) {
            ModMatrix base = reduce_mod(s.exp >= 0 ? gens_.gen(s.gen) : gens_.inv(s.gen), p);
            acc = acc * base.pow(s.exp >= 0 ? s.exp : -s.exp);
        }
        return acc;
    }

    const MatrixGenerators& gens_;
    GoodPrimeOptions opt_;
    PrimeCursor cursor_;
    std::vector<FreeWord> constants_;
    std::vector<PrimeDiagnostic> diagnostics_;
    int candidates_tried_ = 0;
};

// Smallest good prime of the window; deterministic by the ascending search.
inline GoodPrime select_good_prime(const ConstWord& w, const MatrixGenerators& gens,
                                   std::uint64_t n, std::uint64_t c0,
                                   GoodPrimeOptions opt = {}) {
    GoodPrimeSearch search(w, gens, n, c0, opt);
    if (auto gp = search.next()) return *gp;
    throw WindowExhaustedError("no good prime in the window of n=" + std::to_string(n) +
                                   ", C0=" + std::to_string(c0),
                               search.diagnostics());
}

}  // namespace logwitness
