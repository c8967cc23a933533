#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "logwitness/errors.hpp"
#include "logwitness/rng.hpp"

namespace logwitness {

inline constexpr std::uint64_t kDefaultBallCap = std::uint64_t(1) << 26;
inline constexpr std::size_t kMaxParsedAtoms = std::size_t(1) << 22;

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

// Free basis a, b, c, ... of the group the equations live over. "x" is the
// reserved equation variable and can never be a generator name. Inverses are
// not named separately; they are negative exponents.
class GeneratorSet {
public:
    explicit GeneratorSet(int rank) {
        if (rank < 1) throw ValidationError("generator rank must be >= 1");
        names_.reserve(static_cast<std::size_t>(rank));
        for (int i = 0; i < rank; ++i) names_.push_back(default_name(i));
        validate();
    }

    explicit GeneratorSet(std::vector<std::string> names) : names_(std::move(names)) {
        if (names_.empty()) throw ValidationError("generator rank must be >= 1");
        validate();
    }

    int rank() const { return static_cast<int>(names_.size()); }
    const std::string& name(int i) const { return names_[static_cast<std::size_t>(i)]; }

    std::optional<int> index_of(std::string_view ident) const {
        for (std::size_t i = 0; i < names_.size(); ++i)
            if (names_[i] == ident) return static_cast<int>(i);
        return std::nullopt;
    }

private:
    static std::string default_name(int i) {
        if (i < 23) return std::string(1, static_cast<char>('a' + i));  // a..w, stops before x
        return "g" + std::to_string(i);
    }

    static bool valid_ident(std::string_view s) {
        if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
        return std::all_of(s.begin(), s.end(), [](char c) {
            return std::isalnum(static_cast<unsigned char>(c));
        });
    }

    void validate() const {
        for (const auto& n : names_) {
            if (!valid_ident(n)) throw ValidationError("invalid generator name: '" + n + "'");
            if (n == "x") throw ValidationError("'x' is reserved for the equation variable");
        }
        for (std::size_t i = 0; i < names_.size(); ++i)
            for (std::size_t j = i + 1; j < names_.size(); ++j)
                if (names_[i] == names_[j])
                    throw ValidationError("duplicate generator name: '" + names_[i] + "'");
    }

    std::vector<std::string> names_;
};

// ---------------------------------------------------------------------------
// Free words
// ---------------------------------------------------------------------------

struct Syllable {
    int gen = 0;               // generator index
    std::int64_t exp = 0;      // nonzero in reduced form
    friend auto operator<=>(const Syllable&, const Syllable&) = default;
};

namespace detail {

inline void push_reduced(std::vector<Syllable>& stack, int gen, std::int64_t exp) {
    if (exp == 0) return;
    if (!stack.empty() && stack.back().gen == gen) {
        stack.back().exp += exp;
        if (stack.back().exp == 0) stack.pop_back();
        return;
    }
    stack.push_back({gen, exp});
}

}  // namespace detail

// A freely reduced word over a GeneratorSet: adjacent syllables use distinct
// generators and all exponents are nonzero. The empty word is the identity.
class FreeWord {
public:
    FreeWord() = default;

    static FreeWord reduce(std::span<const Syllable> raw) {
        std::vector<Syllable> stack;
        stack.reserve(raw.size());
        for (const auto& s : raw) detail::push_reduced(stack, s.gen, s.exp);
        return FreeWord(std::move(stack));
    }

    static FreeWord generator(int gen, std::int64_t exp = 1) {
        std::vector<Syllable> s;
        if (exp != 0) s.push_back({gen, exp});
        return FreeWord(std::move(s));
    }

    const std::vector<Syllable>& syllables() const { return syls_; }
    bool is_identity() const { return syls_.empty(); }

    // Word length: sum of exponent magnitudes.
    std::uint64_t length() const {
        std::uint64_t n = 0;
        for (const auto& s : syls_) n += static_cast<std::uint64_t>(s.exp < 0 ? -s.exp : s.exp);
        return n;
    }

    int max_generator() const {
        int m = -1;
        for (const auto& s : syls_) m = std::max(m, s.gen);
        return m;
    }

    FreeWord inverse() const {
        std::vector<Syllable> out;
        out.reserve(syls_.size());
        for (auto it = syls_.rbegin(); it != syls_.rend(); ++it) out.push_back({it->gen, -it->exp});
        return FreeWord(std::move(out));
    }

    FreeWord operator*(const FreeWord& rhs) const {
        std::vector<Syllable> stack = syls_;
        for (const auto& s : rhs.syls_) detail::push_reduced(stack, s.gen, s.exp);
        return FreeWord(std::move(stack));
    }

    // g^e. Conjugate-and-cycle so that powers of conjugates stay cheap and a
    // single-syllable core costs O(1) regardless of |e|.
    FreeWord pow(std::int64_t e) const {
        if (e == 0 || syls_.empty()) return FreeWord();
        if (e < 0) return inverse().pow(-e);
        // Peel matching conjugating syllables: w = u t u^-1 with t cyclically reduced.
        std::size_t lo = 0, hi = syls_.size();
        std::vector<Syllable> prefix;
        while (hi - lo >= 2 && syls_[lo].gen == syls_[hi - 1].gen) {
            const auto& f = syls_[lo];
            const auto& l = syls_[hi - 1];
            if (f.exp + l.exp == 0) {
                prefix.push_back(f);
                ++lo;
                --hi;
                continue;
            }
            // Partial overlap: strip the smaller side into the prefix.
            std::int64_t cut = (std::abs(f.exp) < std::abs(l.exp)) ? f.exp : -l.exp;
            if ((f.exp > 0) == (l.exp > 0)) break;  // same sign: cyclically reduced already
            prefix.push_back({f.gen, cut});
            std::vector<Syllable> core(syls_.begin() + static_cast<std::ptrdiff_t>(lo),
                                       syls_.begin() + static_cast<std::ptrdiff_t>(hi));
            core.front().exp -= cut;
            core.back().exp += cut;
            if (core.front().exp == 0) core.erase(core.begin());
            if (!core.empty() && core.back().exp == 0) core.pop_back();
            FreeWord mid = FreeWord::reduce(core).pow(e);
            std::vector<Syllable> out;
            for (const auto& s : prefix) detail::push_reduced(out, s.gen, s.exp);
            for (const auto& s : mid.syls_) detail::push_reduced(out, s.gen, s.exp);
            for (auto it = prefix.rbegin(); it != prefix.rend(); ++it)
                detail::push_reduced(out, it->gen, -it->exp);
            return FreeWord(std::move(out));
        }
        std::vector<Syllable> core(syls_.begin() + static_cast<std::ptrdiff_t>(lo),
                                   syls_.begin() + static_cast<std::ptrdiff_t>(hi));
        std::vector<Syllable> out;
        for (const auto& s : prefix) detail::push_reduced(out, s.gen, s.exp);
        if (core.size() == 1) {
            detail::push_reduced(out, core[0].gen, core[0].exp * e);
        } else {
            for (std::int64_t i = 0; i < e; ++i)
                for (const auto& s : core) detail::push_reduced(out, s.gen, s.exp);
        }
        for (auto it = prefix.rbegin(); it != prefix.rend(); ++it)
            detail::push_reduced(out, it->gen, -it->exp);
        return FreeWord(std::move(out));
    }

    friend bool operator==(const FreeWord&, const FreeWord&) = default;

private:
    explicit FreeWord(std::vector<Syllable> reduced) : syls_(std::move(reduced)) {}
    std::vector<Syllable> syls_;
};

inline FreeWord free_reduce(std::span<const Syllable> raw) { return FreeWord::reduce(raw); }
inline FreeWord free_reduce(const std::vector<Syllable>& raw) {
    return FreeWord::reduce(std::span<const Syllable>(raw));
}

// ---------------------------------------------------------------------------
// Words with constants
// ---------------------------------------------------------------------------

// Canonical equation  x^{a0} c_1 x^{a1} ... c_k x^{ak}  with every c_i a
// nontrivial FreeWord and every interior exponent nonzero. Construction
// canonicalizes arbitrary alternations to this fixpoint and rejects the
// empty word.
class ConstWord {
public:
    struct Block {
        FreeWord constant;       // c_i, never the identity
        std::int64_t exponent;   // a_i; may be 0 only for the last block
        friend bool operator==(const Block&, const Block&) = default;
    };

    static ConstWord make(std::int64_t a0, std::vector<Block> blocks) {
        // Run the merge rules to a fixpoint.
        bool changed = true;
        while (changed) {
            changed = false;
            // Merge blocks separated by a zero exponent (interior only).
            for (std::size_t i = 0; i + 1 < blocks.size(); ++i) {
                if (blocks[i].exponent != 0) continue;
                blocks[i].constant = blocks[i].constant * blocks[i + 1].constant;
                blocks[i].exponent = blocks[i + 1].exponent;
                blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(i + 1));
                changed = true;
                break;
            }
            if (changed) continue;
            // Drop identity constants, merging the exponents around them.
            for (std::size_t i = 0; i < blocks.size(); ++i) {
                if (!blocks[i].constant.is_identity()) continue;
                if (i == 0) {
                    a0 += blocks[0].exponent;
                } else {
                    blocks[i - 1].exponent += blocks[i].exponent;
                }
                blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
                break;
            }
        }
        if (blocks.empty() && a0 == 0) throw TrivialWordError("word reduces to the empty equation");
        return ConstWord(a0, std::move(blocks));
    }

    static ConstWord power(std::int64_t a0) { return make(a0, {}); }

    std::int64_t head_exponent() const { return a0_; }
    const std::vector<Block>& blocks() const { return blocks_; }
    std::size_t constant_count() const { return blocks_.size(); }

    std::uint64_t length() const {
        auto mag = [](std::int64_t v) { return static_cast<std::uint64_t>(v < 0 ? -v : v); };
        std::uint64_t n = mag(a0_);
        for (const auto& b : blocks_) n += b.constant.length() + mag(b.exponent);
        return n;
    }

    int max_generator() const {
        int m = -1;
        for (const auto& b : blocks_) m = std::max(m, b.constant.max_generator());
        return m;
    }

    ConstWord inverse() const {
        // (x^{a0} c1 x^{a1} ... ck x^{ak})^-1 = x^{-ak} ck^-1 ... c1^-1 x^{-a0}
        if (blocks_.empty()) return ConstWord(-a0_, {});
        std::int64_t head = -blocks_.back().exponent;
        std::vector<Block> out;
        out.reserve(blocks_.size());
        for (std::size_t i = blocks_.size(); i-- > 0;) {
            std::int64_t e = (i == 0) ? -a0_ : -blocks_[i - 1].exponent;
            out.push_back({blocks_[i].constant.inverse(), e});
        }
        return ConstWord(head, std::move(out));
    }

    friend bool operator==(const ConstWord&, const ConstWord&) = default;

private:
    ConstWord(std::int64_t a0, std::vector<Block> blocks) : a0_(a0), blocks_(std::move(blocks)) {}

    std::int64_t a0_ = 0;
    std::vector<Block> blocks_;
};

inline std::uint64_t const_word_length(const ConstWord& w) { return w.length(); }

// The word map: substitute g for x and reduce in the free group.
inline FreeWord substitute(const ConstWord& w, const FreeWord& g) {
    FreeWord acc = g.pow(w.head_exponent());
    for (const auto& b : w.blocks()) {
        acc = acc * b.constant;
        if (b.exponent != 0) acc = acc * g.pow(b.exponent);
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Grammar
// ---------------------------------------------------------------------------
//
//   word   := term+                 juxtaposition = product
//   term   := atom ("^" int)?
//   atom   := ident | "(" word ")"
//   ident  := letter (letter|digit)*     "x" is the reserved variable
//   int    := ("-")? digit+
//
// Whitespace between terms is ignored. The pretty-printer emits the same
// grammar with single spaces between terms.

namespace detail {

struct VarSyllable {
    int sym;                // generator index, or -1 for the variable x
    std::int64_t exp;
};

class WordParser {
public:
    WordParser(std::string_view text, const GeneratorSet& gens, bool allow_variable)
        : text_(text), gens_(gens), allow_variable_(allow_variable) {}

    std::vector<VarSyllable> parse() {
        std::vector<VarSyllable> out;
        parse_word(out, 0);
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return out;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg + " at position " + std::to_string(pos_));
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool at_atom_start() {
        skip_ws();
        if (pos_ >= text_.size()) return false;
        char c = text_[pos_];
        return c == '(' || std::isalpha(static_cast<unsigned char>(c));
    }

    void parse_word(std::vector<VarSyllable>& out, int depth) {
        if (!at_atom_start()) fail("expected a term");
        while (at_atom_start()) parse_term(out, depth);
    }

    void parse_term(std::vector<VarSyllable>& out, int depth) {
        skip_ws();
        if (text_[pos_] == '(') {
            ++pos_;
            std::vector<VarSyllable> inner;
            parse_word(inner, depth + 1);
            skip_ws();
            if (pos_ >= text_.size() || text_[pos_] != ')') fail("expected ')'");
            ++pos_;
            std::int64_t e = parse_exponent();
            append_group(out, inner, e);
            return;
        }
        std::string ident = parse_ident();
        std::int64_t e = parse_exponent();
        int sym;
        if (ident == "x") {
            if (!allow_variable_) throw ParseError("the variable 'x' cannot appear in a constant word");
            sym = -1;
        } else if (auto idx = gens_.index_of(ident)) {
            sym = *idx;
        } else {
            throw ParseError("unknown generator '" + ident + "'");
        }
        if (e != 0) out.push_back({sym, e});
    }

    std::string parse_ident() {
        if (!std::isalpha(static_cast<unsigned char>(text_[pos_]))) fail("expected an identifier");
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    std::int64_t parse_exponent() {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != '^') return 1;
        ++pos_;
        skip_ws();
        std::size_t start = pos_;
        if (pos_ < text_.size() && text_[pos_] == '-') ++pos_;
        std::size_t digits_start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ == digits_start) fail("malformed exponent");
        std::int64_t value = 0;
        auto sv = text_.substr(start, pos_ - start);
        auto res = std::from_chars(sv.data(), sv.data() + sv.size(), value);
        constexpr std::int64_t kMaxExp = std::int64_t(1) << 40;
        if (res.ec != std::errc() || value > kMaxExp || value < -kMaxExp)
            fail("exponent out of range");
        return value;
    }

    void append_group(std::vector<VarSyllable>& out, const std::vector<VarSyllable>& grp,
                      std::int64_t e) {
        if (e == 0 || grp.empty()) return;
        std::vector<VarSyllable> unit = grp;
        if (e < 0) {
            std::reverse(unit.begin(), unit.end());
            for (auto& s : unit) s.exp = -s.exp;
            e = -e;
        }
        if (out.size() + unit.size() * static_cast<std::size_t>(e) > kMaxParsedAtoms)
            throw ResourceError("parsed word exceeds the atom cap");
        for (std::int64_t i = 0; i < e; ++i) out.insert(out.end(), unit.begin(), unit.end());
    }

    std::string_view text_;
    const GeneratorSet& gens_;
    bool allow_variable_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline FreeWord parse_free_word(std::string_view text, const GeneratorSet& gens) {
    auto atoms = detail::WordParser(text, gens, /*allow_variable=*/false).parse();
    std::vector<Syllable> raw;
    raw.reserve(atoms.size());
    for (const auto& a : atoms) raw.push_back({a.sym, a.exp});
    return free_reduce(raw);
}

namespace detail {

// Assembles an alternating atom sequence (generator letters and x-powers)
// into the canonical equation form.
inline ConstWord assemble_const_word(std::span<const VarSyllable> atoms) {
    // Split into x-runs and maximal constant runs.
    std::int64_t a0 = 0;
    std::vector<ConstWord::Block> blocks;
    std::vector<Syllable> run;
    std::int64_t xexp = 0;
    auto flush_run = [&]() {
        if (run.empty()) return;
        // Identity runs become identity blocks; ConstWord::make removes them.
        blocks.push_back({free_reduce(run), 0});
        run.clear();
    };
    auto flush_x = [&]() {
        if (xexp == 0) return;
        if (blocks.empty()) {
            a0 += xexp;
        } else {
            blocks.back().exponent += xexp;
        }
        xexp = 0;
    };
    for (const auto& a : atoms) {
        if (a.sym < 0) {
            flush_run();
            xexp += a.exp;
        } else {
            flush_x();
            run.push_back({a.sym, a.exp});
        }
    }
    flush_run();
    flush_x();
    return ConstWord::make(a0, std::move(blocks));
}

}  // namespace detail

inline ConstWord parse_const_word(std::string_view text, const GeneratorSet& gens) {
    auto atoms = detail::WordParser(text, gens, /*allow_variable=*/true).parse();
    return detail::assemble_const_word(atoms);
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

namespace detail {

inline void render_term(std::string& out, const std::string& name, std::int64_t exp) {
    if (!out.empty()) out += ' ';
    out += name;
    if (exp != 1) {
        out += '^';
        out += std::to_string(exp);
    }
}

}  // namespace detail

// Identity renders as the empty string (the grammar itself has no notation
// for it).
inline std::string render(const FreeWord& w, const GeneratorSet& gens) {
    std::string out;
    for (const auto& s : w.syllables()) detail::render_term(out, gens.name(s.gen), s.exp);
    return out;
}

inline std::string render(const ConstWord& w, const GeneratorSet& gens) {
    std::string out;
    if (w.head_exponent() != 0) detail::render_term(out, "x", w.head_exponent());
    for (const auto& b : w.blocks()) {
        for (const auto& s : b.constant.syllables())
            detail::render_term(out, gens.name(s.gen), s.exp);
        if (b.exponent != 0) detail::render_term(out, "x", b.exponent);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ball enumeration
// ---------------------------------------------------------------------------

// Number of freely reduced words of length <= radius over `rank` generators,
// saturating at uint64 max.
inline std::uint64_t ball_count(int rank, int radius) {
    const std::uint64_t letters = 2ull * static_cast<std::uint64_t>(rank);
    std::uint64_t total = 1, layer = 1;
    for (int j = 1; j <= radius; ++j) {
        std::uint64_t mult = (j == 1) ? letters : letters - 1;
        if (layer > ~std::uint64_t(0) / mult) return ~std::uint64_t(0);
        layer *= mult;
        if (total > ~std::uint64_t(0) - layer) return ~std::uint64_t(0);
        total += layer;
    }
    return total;
}

// Enumerates the ball B(radius) of the free group in length order, and within
// each length lexicographically with letter order a < a^-1 < b < b^-1 < ...
// (letter 2i is generator i, letter 2i+1 its inverse).
class BallCursor {
public:
    BallCursor(const GeneratorSet& gens, int radius, std::uint64_t cap = kDefaultBallCap)
        : rank_(gens.rank()), radius_(radius) {
        if (radius < 0) throw ValidationError("ball radius must be >= 0");
        if (ball_count(rank_, radius_) > cap)
            throw ResourceError("free ball of radius " + std::to_string(radius) +
                                " exceeds the enumeration cap");
    }

    std::optional<FreeWord> next() {
        if (done_) return std::nullopt;
        if (!started_) {
            started_ = true;
            return FreeWord();  // radius >= 0 always contains the identity
        }
        if (!advance()) {
            done_ = true;
            return std::nullopt;
        }
        return word_from_letters();
    }

private:
    int letter_count() const { return 2 * rank_; }
    static bool blocked(int letter, int prev) { return (letter ^ 1) == prev; }

    int first_valid(int prev) const { return blocked(0, prev) ? 1 : 0; }

    bool advance() {
        const int L = static_cast<int>(letters_.size());
        if (L == 0 || !increment()) {
            if (static_cast<int>(letters_.size()) >= radius_) return false;
            letters_.assign(letters_.size() + 1, 0);
            for (std::size_t i = 1; i < letters_.size(); ++i)
                letters_[i] = first_valid(letters_[i - 1]);
        }
        return true;
    }

    bool increment() {
        int i = static_cast<int>(letters_.size()) - 1;
        while (i >= 0) {
            int prev = (i > 0) ? letters_[i - 1] : -1;
            int l = letters_[i] + 1;
            while (l < letter_count() && i > 0 && blocked(l, prev)) ++l;
            if (l < letter_count()) {
                letters_[i] = l;
                for (std::size_t j = static_cast<std::size_t>(i) + 1; j < letters_.size(); ++j)
                    letters_[j] = first_valid(letters_[j - 1]);
                return true;
            }
            --i;
        }
        return false;
    }

    FreeWord word_from_letters() const {
        std::vector<Syllable> raw;
        for (int l : letters_) raw.push_back({l >> 1, (l & 1) ? -1 : +1});
        return free_reduce(raw);
    }

    int rank_;
    int radius_;
    std::vector<int> letters_;
    bool started_ = false;
    bool done_ = false;
};

template <typename F>
inline void walk_ball(const GeneratorSet& gens, int radius, F&& fn,
                      std::uint64_t cap = kDefaultBallCap) {
    BallCursor cur(gens, radius, cap);
    while (auto w = cur.next()) fn(*w);
}

// ---------------------------------------------------------------------------
// Random equations
// ---------------------------------------------------------------------------

// Draws a canonical equation of exact total length n. Five families keep the
// experiments from collapsing onto equations that already fail at the
// identity: plain alternations, conjugate shapes c v c^-1 ... whose constants
// multiply to e, power/commutator shapes x^m c x^-m c^-1, left-normed nested
// commutators [..[[x^m,c1],c2]..,ck], and balanced commutator trees that
// vanish on the whole closed 1-ball (the hard family).
inline ConstWord random_const_word(SplitMix64& rng, std::uint64_t n, const GeneratorSet& gens) {
    if (n == 0) throw ValidationError("cannot sample an equation of length 0");
    const int rank = gens.rank();
    auto random_free = [&](std::uint64_t len) {
        std::vector<Syllable> raw;
        int prev_letter = -1;
        for (std::uint64_t i = 0; i < len; ++i) {
            int l;
            do {
                l = static_cast<int>(rng.below(2ull * static_cast<std::uint64_t>(rank)));
            } while (prev_letter >= 0 && (l ^ 1) == prev_letter);
            raw.push_back({l >> 1, (l & 1) ? -1 : +1});
            prev_letter = l;
        }
        return free_reduce(raw);
    };

    // Balanced commutator tree [L(x), R(x)] whose left arm uses only the
    // first generator as constants and right arm only the second. Each arm
    // vanishes on all powers of its own generator, so the whole equation
    // dies on the identity and on every length-1 element: witnesses start
    // at depth 2. Signs are arranged so no junction cancels and the length
    // comes out exact (reachable when n >= 16 and 4 | n).
    auto try_balanced = [&]() -> std::optional<ConstWord> {
        if (rank < 2 || n < 16 || n % 4 != 0) return std::nullopt;
        using Tokens = std::vector<detail::VarSyllable>;
        auto invert = [](const Tokens& t) {
            Tokens out;
            out.reserve(t.size());
            for (auto it = t.rbegin(); it != t.rend(); ++it) out.push_back({it->sym, -it->exp});
            return out;
        };
        auto splice = [&](const Tokens& l, const Tokens& r) {
            Tokens out = l;
            out.insert(out.end(), r.begin(), r.end());
            Tokens li = invert(l), ri = invert(r);
            out.insert(out.end(), li.begin(), li.end());
            out.insert(out.end(), ri.begin(), ri.end());
            return out;
        };
        // budget even >= 4; a node needs budget >= 16 with 4 | budget.
        std::function<Tokens(std::uint64_t, int, std::int64_t)> build =
            [&](std::uint64_t budget, int letter, std::int64_t first_sign) -> Tokens {
            bool can_split = budget >= 16 && budget % 4 == 0;
            if (!can_split || rng.below(3) == 0) {
                auto m = static_cast<std::int64_t>((budget - 2) / 2);
                std::int64_t s = rng.coin() ? 1 : -1;
                return {{-1, first_sign * m}, {letter, s}, {-1, -first_sign * m}, {letter, -s}};
            }
            std::uint64_t half = budget / 2;
            std::uint64_t bl = 4 + 2 * rng.below((half - 8) / 2 + 1);
            Tokens l = build(bl, letter, first_sign);
            Tokens r = build(half - bl, letter, -first_sign);
            // Same-letter leaf pairs must carry distinct constant signs, or
            // the junction into the inverted copy cancels.
            if (l.size() == 4 && r.size() == 4 && l[1].exp == r[1].exp) {
                r[1].exp = -r[1].exp;
                r[3].exp = -r[3].exp;
            }
            return splice(l, r);
        };
        std::uint64_t half = n / 2;
        std::uint64_t bl = 4 + 2 * rng.below((half - 8) / 2 + 1);
        int g0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(rank)));
        int g1;
        do {
            g1 = static_cast<int>(rng.below(static_cast<std::uint64_t>(rank)));
        } while (g1 == g0);
        Tokens l = build(bl, g0, 1);
        Tokens r = build(half - bl, g1, -1);
        ConstWord w = detail::assemble_const_word(splice(l, r));
        if (w.length() != n) return std::nullopt;
        return w;
    };

    // Nested commutator of depth k over a core x^{+-m}, conjugated up to the
    // exact length: |w| = 2^k (m+2) - 2 + 2|u|. Only some lengths are
    // reachable (the core length is even for k >= 1); other draws fall
    // through to the remaining families.
    auto try_nested = [&]() -> std::optional<ConstWord> {
        if (n < 8 || rank < 2) return std::nullopt;
        int k_max = 1;
        while (k_max < 10 && (std::uint64_t(3) << (k_max + 1)) - 2 <= n) ++k_max;
        int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(k_max)));
        const std::uint64_t pow2 = std::uint64_t(1) << k;
        if ((n + 2) / pow2 < 3) return std::nullopt;
        const std::uint64_t m = 1 + rng.below((n + 2) / pow2 - 2);
        const std::uint64_t core_len = pow2 * (m + 2) - 2;
        const std::uint64_t r = n - core_len;
        if (r % 2 != 0) return std::nullopt;

        std::vector<detail::VarSyllable> v{
            {-1, rng.coin() ? static_cast<std::int64_t>(m) : -static_cast<std::int64_t>(m)}};
        int prev_gen = -1;
        int last_gen = -1;
        std::int64_t last_sign = 1;
        for (int i = 0; i < k; ++i) {
            int g;
            do {
                g = static_cast<int>(rng.below(static_cast<std::uint64_t>(rank)));
            } while (g == prev_gen);
            std::int64_t sign = rng.coin() ? 1 : -1;
            std::vector<detail::VarSyllable> inv;
            inv.reserve(v.size());
            for (auto it = v.rbegin(); it != v.rend(); ++it) inv.push_back({it->sym, -it->exp});
            v.push_back({g, sign});
            v.insert(v.end(), inv.begin(), inv.end());
            v.push_back({g, -sign});
            prev_gen = g;
            last_gen = g;
            last_sign = -sign;
        }
        if (r > 0) {
            // Conjugate by u of length r/2; the last letter of u must not
            // cancel into the trailing c_k^-1 of the core.
            std::vector<detail::VarSyllable> u;
            int prev_letter = -1;
            for (std::uint64_t i = 0; i < r / 2; ++i) {
                int l;
                bool last = (i == r / 2 - 1);
                do {
                    l = static_cast<int>(rng.below(2ull * static_cast<std::uint64_t>(rank)));
                } while ((prev_letter >= 0 && (l ^ 1) == prev_letter) ||
                         (last && (l >> 1) == last_gen &&
                          ((l & 1) ? -1 : 1) == last_sign));
                u.push_back({l >> 1, (l & 1) ? -1 : +1});
                prev_letter = l;
            }
            std::vector<detail::VarSyllable> conj = u;
            conj.insert(conj.end(), v.begin(), v.end());
            for (auto it = u.rbegin(); it != u.rend(); ++it) conj.push_back({it->sym, -it->exp});
            v = std::move(conj);
        }
        ConstWord w = detail::assemble_const_word(v);
        if (w.length() != n) return std::nullopt;
        return w;
    };

    const std::uint64_t style = rng.below(10);
    if (style == 9) {
        if (auto balanced = try_balanced()) return *balanced;
        if (auto nested = try_nested()) return *nested;
    }
    if (style == 8) {
        if (auto nested = try_nested()) return *nested;
        if (auto balanced = try_balanced()) return *balanced;
    }
    if (n >= 4 && (style == 5 || style >= 8)) {
        // x^m c x^-m c^-1 with m + m + |c| + |c| = n.
        std::uint64_t clen = 1 + rng.below(std::max<std::uint64_t>(1, n / 2 - 1));
        clen = std::min(clen, n / 2 - 1);
        std::int64_t m = static_cast<std::int64_t>(n / 2 - clen);
        if (m >= 1) {
            FreeWord c = random_free(clen);
            std::uint64_t slack = n - 2 * static_cast<std::uint64_t>(m) - 2 * clen;
            std::vector<ConstWord::Block> blocks;
            blocks.push_back({c, -m});
            blocks.push_back({c.inverse(), static_cast<std::int64_t>(slack)});
            return ConstWord::make(m, std::move(blocks));
        }
    }
    if (n >= 4 && style >= 6) {
        // c x^{e1} c^-1 x^{e2}: constants cancel, so the word dies at x = e.
        std::uint64_t clen = 1 + rng.below(n / 4 + 1);
        clen = std::min<std::uint64_t>(clen, (n - 2) / 2);
        std::uint64_t rest = n - 2 * clen;
        std::int64_t e1 = 1 + static_cast<std::int64_t>(rng.below(rest));
        std::int64_t e2 = static_cast<std::int64_t>(rest) - e1;
        if (rng.coin()) e1 = -e1;
        if (rng.coin()) e2 = -e2;
        FreeWord c = random_free(clen);
        std::vector<ConstWord::Block> blocks;
        blocks.push_back({c, e1});
        blocks.push_back({c.inverse(), e2});
        return ConstWord::make(0, std::move(blocks));
    }

    // Plain alternation: split the budget into x-runs and constant runs.
    std::uint64_t remaining = n;
    bool next_is_x = rng.coin();
    std::int64_t a0 = 0;
    std::vector<ConstWord::Block> blocks;
    bool first = true;
    while (remaining > 0) {
        std::uint64_t take = 1 + rng.below(std::max<std::uint64_t>(1, remaining / 2));
        take = std::min(take, remaining);
        if (next_is_x) {
            std::int64_t e = static_cast<std::int64_t>(take);
            if (rng.coin()) e = -e;
            if (first && blocks.empty()) {
                a0 += e;
            } else {
                blocks.back().exponent += e;
            }
        } else {
            FreeWord c = random_free(take);
            // Appending to an existing trailing constant would break
            // canonicality; give it a separating exponent first.
            if (!blocks.empty() && blocks.back().exponent == 0 && remaining >= take + 1) {
                blocks.back().exponent = rng.coin() ? 1 : -1;
                remaining -= 1;
                take = std::min(take, remaining);
                c = random_free(take);
            }
            if (blocks.empty() || blocks.back().exponent != 0) {
                blocks.push_back({std::move(c), 0});
            } else {
                blocks.back().constant = blocks.back().constant * c;
            }
        }
        remaining -= std::min(take, remaining);
        first = false;
        next_is_x = !next_is_x;
    }
    ConstWord w = ConstWord::make(a0, std::move(blocks));
    if (w.length() == n) return w;
    // Reduction during assembly shortened the word; pad with a head power.
    std::int64_t pad = static_cast<std::int64_t>(n - w.length());
    std::int64_t head = w.head_exponent();
    head += (head >= 0) ? pad : -pad;
    return ConstWord::make(head, w.blocks());
}

}  // namespace logwitness
