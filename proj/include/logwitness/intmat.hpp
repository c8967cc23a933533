#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "logwitness/errors.hpp"
#include "logwitness/words.hpp"

namespace logwitness {

using BigInt = boost::multiprecision::cpp_int;

inline constexpr std::uint32_t kDefaultEntryBitCap = std::uint32_t(1) << 20;

// Square integer matrix with determinant 1. Entries are exact; growth is
// bounded only by the entry-bit cap the evaluation routines enforce.
class IntMatrix {
public:
    explicit IntMatrix(int dim) : dim_(dim), e_(static_cast<std::size_t>(dim) * dim) {
        if (dim < 1) throw ValidationError("matrix dimension must be >= 1");
    }

    static IntMatrix identity(int dim) {
        IntMatrix m(dim);
        for (int i = 0; i < dim; ++i) m.at(i, i) = 1;
        return m;
    }

    static IntMatrix from_rows(const std::vector<std::vector<BigInt>>& rows) {
        int d = static_cast<int>(rows.size());
        IntMatrix m(d);
        for (int i = 0; i < d; ++i) {
            if (static_cast<int>(rows[i].size()) != d)
                throw ValidationError("matrix rows must all have the same length");
            for (int j = 0; j < d; ++j) m.at(i, j) = rows[i][static_cast<std::size_t>(j)];
        }
        return m;
    }

    int dim() const { return dim_; }
    BigInt& at(int i, int j) { return e_[static_cast<std::size_t>(i) * dim_ + j]; }
    const BigInt& at(int i, int j) const { return e_[static_cast<std::size_t>(i) * dim_ + j]; }
    const std::vector<BigInt>& entries() const { return e_; }

    IntMatrix operator*(const IntMatrix& rhs) const {
        if (dim_ != rhs.dim_) throw ValidationError("matrix dimension mismatch");
        IntMatrix out(dim_);
        for (int i = 0; i < dim_; ++i)
            for (int k = 0; k < dim_; ++k) {
                const BigInt& lik = at(i, k);
                if (lik == 0) continue;
                for (int j = 0; j < dim_; ++j) out.at(i, j) += lik * rhs.at(k, j);
            }
        return out;
    }

    friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

    bool is_identity() const { return *this == identity(dim_); }

    // Scalar matrices are the center of SL_d over the integers (+-I only).
    bool is_scalar() const {
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) {
                if (i != j && at(i, j) != 0) return false;
                if (i == j && at(i, j) != at(0, 0)) return false;
            }
        return true;
    }

    // Fraction-free Gaussian elimination; exact for any integer matrix.
    BigInt determinant() const {
        std::vector<BigInt> m = e_;
        const int n = dim_;
        auto idx = [n](int i, int j) { return static_cast<std::size_t>(i) * n + j; };
        BigInt prev = 1;
        int sign = 1;
        for (int k = 0; k + 1 < n; ++k) {
            if (m[idx(k, k)] == 0) {
                int swap_row = -1;
                for (int i = k + 1; i < n; ++i)
                    if (m[idx(i, k)] != 0) {
                        swap_row = i;
                        break;
                    }
                if (swap_row < 0) return 0;
                for (int j = 0; j < n; ++j) std::swap(m[idx(k, j)], m[idx(swap_row, j)]);
                sign = -sign;
            }
            for (int i = k + 1; i < n; ++i)
                for (int j = k + 1; j < n; ++j) {
                    BigInt v = m[idx(i, j)] * m[idx(k, k)] - m[idx(i, k)] * m[idx(k, j)];
                    m[idx(i, j)] = v / prev;  // exact by Bareiss
                }
            prev = m[idx(k, k)];
        }
        return sign > 0 ? m[idx(n - 1, n - 1)] : -m[idx(n - 1, n - 1)];
    }

    // Inverse of a determinant-1 matrix is its adjugate, still integral.
    IntMatrix inverse_unimodular() const {
        if (determinant() != 1) throw ValidationError("matrix determinant is not 1");
        const int n = dim_;
        IntMatrix out(n);
        if (n == 1) {
            out.at(0, 0) = 1;
            return out;
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                IntMatrix minor(n - 1);
                for (int r = 0, mr = 0; r < n; ++r) {
                    if (r == j) continue;
                    for (int c = 0, mc = 0; c < n; ++c) {
                        if (c == i) continue;
                        minor.at(mr, mc) = at(r, c);
                        ++mc;
                    }
                    ++mr;
                }
                BigInt cof = minor.determinant();
                out.at(i, j) = ((i + j) % 2 == 0) ? cof : -cof;
            }
        return out;
    }

    std::uint64_t max_entry_bits() const {
        std::uint64_t bits = 0;
        for (const auto& v : e_) bits = std::max<std::uint64_t>(bits, msb_bits(v));
        return bits;
    }

private:
    static std::uint64_t msb_bits(const BigInt& v) {
        if (v == 0) return 0;
        return boost::multiprecision::msb(boost::multiprecision::abs(v)) + 1;
    }

    int dim_;
    std::vector<BigInt> e_;
};

// Height: the maximal absolute value over the entries.
inline BigInt height(const IntMatrix& m) {
    BigInt h = 0;
    for (const auto& v : m.entries()) {
        BigInt a = boost::multiprecision::abs(v);
        if (a > h) h = a;
    }
    return h;
}

// The images of the abstract generators: determinant-1 integer matrices with
// precomputed inverses and the entry bound M over generators and inverses.
class MatrixGenerators {
public:
    explicit MatrixGenerators(std::vector<IntMatrix> gens) : gens_(std::move(gens)) {
        if (gens_.empty()) throw ValidationError("need at least one generator matrix");
        dim_ = gens_[0].dim();
        for (const auto& g : gens_) {
            if (g.dim() != dim_) throw ValidationError("generator dimensions differ");
            if (g.determinant() != 1) throw ValidationError("generator determinant is not 1");
            invs_.push_back(g.inverse_unimodular());
        }
        entry_bound_ = 0;
        for (const auto& g : gens_) entry_bound_ = std::max(entry_bound_, height(g));
        for (const auto& g : invs_) entry_bound_ = std::max(entry_bound_, height(g));
    }

    int rank() const { return static_cast<int>(gens_.size()); }
    int dim() const { return dim_; }
    const IntMatrix& gen(int i) const { return gens_[static_cast<std::size_t>(i)]; }
    const IntMatrix& inv(int i) const { return invs_[static_cast<std::size_t>(i)]; }
    const BigInt& max_abs_entry() const { return entry_bound_; }  // M

private:
    std::vector<IntMatrix> gens_, invs_;
    int dim_ = 0;
    BigInt entry_bound_;
};

// The classical faithful rank-2 representation: a = [[1,2],[0,1]],
// b = [[1,0],[2,1]] generate a free subgroup of SL_2(Z).
inline MatrixGenerators sanov_generators() {
    IntMatrix a(2), b(2);
    a.at(0, 0) = 1; a.at(0, 1) = 2; a.at(1, 0) = 0; a.at(1, 1) = 1;
    b.at(0, 0) = 1; b.at(0, 1) = 0; b.at(1, 0) = 2; b.at(1, 1) = 1;
    return MatrixGenerators({a, b});
}

// Elementary matrices E_ij(1), i != j: a convenient generating set of
// SL_d(Z) for d >= 3 (rank d(d-1)).
inline MatrixGenerators elementary_generators(int d) {
    if (d < 2) throw ValidationError("dimension must be >= 2");
    std::vector<IntMatrix> gens;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            if (i == j) continue;
            IntMatrix e = IntMatrix::identity(d);
            e.at(i, j) = 1;
            gens.push_back(e);
        }
    return MatrixGenerators(std::move(gens));
}

namespace detail {

inline void check_entry_cap(const IntMatrix& m, std::uint32_t bit_cap) {
    if (m.max_entry_bits() > bit_cap)
        throw ResourceError("matrix entries exceed the " + std::to_string(bit_cap) +
                            "-bit cap");
}

inline IntMatrix pow_capped(IntMatrix base, std::uint64_t e, std::uint32_t bit_cap) {
    IntMatrix acc = IntMatrix::identity(base.dim());
    while (e > 0) {
        if (e & 1) {
            acc = acc * base;
            check_entry_cap(acc, bit_cap);
        }
        e >>= 1;
        if (e > 0) {
            base = base * base;
            check_entry_cap(base, bit_cap);
        }
    }
    return acc;
}

}  // namespace detail

inline IntMatrix matrix_power(const IntMatrix& m, std::int64_t e,
                              std::uint32_t bit_cap = kDefaultEntryBitCap) {
    if (e >= 0) return detail::pow_capped(m, static_cast<std::uint64_t>(e), bit_cap);
    return detail::pow_capped(m.inverse_unimodular(), static_cast<std::uint64_t>(-e), bit_cap);
}

// Image of a free word under the representation.
inline IntMatrix eval_free_word(const FreeWord& g, const MatrixGenerators& gens,
                                std::uint32_t bit_cap = kDefaultEntryBitCap) {
    IntMatrix acc = IntMatrix::identity(gens.dim());
    for (const auto& s : g.syllables()) {
        if (s.gen < 0 || s.gen >= gens.rank())
            throw ValidationError("word uses generator index " + std::to_string(s.gen) +
                                  " outside the matrix generator set");
        const IntMatrix& base = s.exp >= 0 ? gens.gen(s.gen) : gens.inv(s.gen);
        std::int64_t e = s.exp >= 0 ? s.exp : -s.exp;
        acc = acc * detail::pow_capped(base, static_cast<std::uint64_t>(e), bit_cap);
        detail::check_entry_cap(acc, bit_cap);
    }
    return acc;
}

// The word map transported along the representation:
// X^{a0} C_1 X^{a1} ... C_k X^{ak} with C_i the image of c_i.
inline IntMatrix eval_const_word(const ConstWord& w, const IntMatrix& X,
                                 const MatrixGenerators& gens,
                                 std::uint32_t bit_cap = kDefaultEntryBitCap) {
    if (X.dim() != gens.dim()) throw ValidationError("matrix dimension mismatch");
    IntMatrix acc = matrix_power(X, w.head_exponent(), bit_cap);
    for (const auto& b : w.blocks()) {
        acc = acc * eval_free_word(b.constant, gens, bit_cap);
        detail::check_entry_cap(acc, bit_cap);
        if (b.exponent != 0) {
            acc = acc * matrix_power(X, b.exponent, bit_cap);
            detail::check_entry_cap(acc, bit_cap);
        }
    }
    return acc;
}

struct HeightBoundReport {
    int radius = 0;
    std::uint64_t words_checked = 0;
    bool all_within = true;
    double max_ratio = 0.0;       // observed height / (dM)^{|g|}
    std::string worst_word;       // rendered witness of the max ratio
};

// Exhaustively checks height(image(g)) <= (d*M)^{|g|} over the ball of the
// given radius. A violation means broken arithmetic, so it throws.
inline HeightBoundReport check_height_bound(int radius, const MatrixGenerators& gens,
                                            const GeneratorSet& symbols,
                                            std::uint64_t cap = kDefaultBallCap) {
    if (symbols.rank() != gens.rank())
        throw ValidationError("symbol set and matrix generators disagree on rank");
    HeightBoundReport report;
    report.radius = radius;
    const BigInt dM = BigInt(gens.dim()) * gens.max_abs_entry();
    walk_ball(symbols, radius, [&](const FreeWord& g) {
        ++report.words_checked;
        IntMatrix img = eval_free_word(g, gens);
        BigInt h = height(img);
        BigInt bound = 1;
        for (std::uint64_t i = 0; i < g.length(); ++i) bound *= dM;
        if (h > bound) {
            report.all_within = false;
            throw ValidationError("height bound violated by word '" + render(g, symbols) + "'");
        }
        double ratio = h.convert_to<double>() / bound.convert_to<double>();
        if (ratio > report.max_ratio) {
            report.max_ratio = ratio;
            report.worst_word = render(g, symbols);
        }
    }, cap);
    return report;
}

}  // namespace logwitness
