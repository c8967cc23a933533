#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "logwitness/cayley.hpp"
#include "logwitness/errors.hpp"
#include "logwitness/intmat.hpp"
#include "logwitness/modp.hpp"
#include "logwitness/oracle.hpp"
#include "logwitness/parallel.hpp"
#include "logwitness/rng.hpp"
#include "logwitness/words.hpp"

namespace logwitness {

struct PipelineConfig {
    std::uint64_t c0 = 4;
    std::uint64_t c0_max = 64;
    std::uint64_t element_cap = kDefaultElementCap;
    std::uint32_t entry_bit_cap = kDefaultEntryBitCap;
    std::uint64_t closure_cap = kDefaultClosureCap;
    int max_primes_per_window = 32;
    int oracle_radius = 4;     // paired oracle runs inside experiments
    std::uint64_t seed = 0;
    bool verify_rescan = false;  // re-check witness minimality and both squares
    bool emit_seconds = false;   // wall times in reports; off keeps outputs canonical
};

struct WitnessReport {
    std::string word;           // canonical rendering of the equation
    std::uint64_t n = 0;        // its length
    std::uint64_t prime = 0;
    ModMatrix witness_mod_p;    // the element of SL_d(p) the scan stopped at
    FreeWord lift;              // geodesic preimage of the witness
    std::uint64_t lift_length = 0;
    bool exact_nontrivial = false;
    int search_depth = 0;       // BFS depth at which the scan stopped
    double explore_ms = 0.0, scan_ms = 0.0, verify_ms = 0.0;

    // Context not part of the serialized report.
    std::uint64_t c0_used = 0;
    std::string generation_method;
    std::uint64_t elements_scanned = 0;

    WitnessReport() : witness_mod_p(1, 2) {}
};

namespace detail {

inline ModMatrix eval_word_map_mod(const ConstWord& w, const ModMatrix& X,
                                   std::span<const ModMatrix> constants) {
    ModMatrix acc = X.pow(w.head_exponent());
    for (std::size_t i = 0; i < w.blocks().size(); ++i) {
        acc = acc * constants[i];
        std::int64_t e = w.blocks()[i].exponent;
        if (e != 0) acc = acc * X.pow(e);
    }
    return acc;
}

}  // namespace detail

struct ScanResult {
    std::optional<std::uint64_t> witness_id;  // BFS id of the first non-central value
    std::uint64_t scanned = 0;
};

// Scans ball elements in BFS order, growing layers lazily, until the word
// map takes a non-central value. Exhausting a closed ball without a hit is a
// legitimate outcome at small p (the reduced equation can vanish on the
// whole group); the caller then moves to the next prime.
inline ScanResult scan_ball_for_witness(const ConstWord& w, CayleyBall& ball,
                                        std::span<const ModMatrix> constants) {
    ScanResult result;
    std::uint64_t id = 0;
    while (true) {
        for (; id < ball.size(); ++id) {
            ++result.scanned;
            ModMatrix value = detail::eval_word_map_mod(w, ball.element(id), constants);
            if (!is_central(value)) {
                result.witness_id = id;
                return result;
            }
        }
        if (!ball.grow_layer()) return result;
    }
}

namespace detail {

class StageTimer {
public:
    explicit StageTimer(bool enabled) : enabled_(enabled) { mark(); }
    void mark() { last_ = std::chrono::steady_clock::now(); }
    double lap_ms() {
        if (!enabled_) return 0.0;
        auto now = std::chrono::steady_clock::now();
        double ms = std::chrono::duration<double, std::milli>(now - last_).count();
        last_ = now;
        return ms;
    }

private:
    bool enabled_;
    std::chrono::steady_clock::time_point last_;
};

}  // namespace detail

// Witness pipeline bound to one generator system. Caches Cayley balls and
// generation checks per prime, so batch runs over many equations stay cheap.
class Session {
public:
    Session(GeneratorSet symbols, MatrixGenerators matrices, PipelineConfig cfg = {})
        : symbols_(std::move(symbols)), matrices_(std::move(matrices)), cfg_(cfg) {
        if (symbols_.rank() != matrices_.rank())
            throw ValidationError("symbol set and matrix generators disagree on rank");
    }

    const GeneratorSet& symbols() const { return symbols_; }
    const MatrixGenerators& matrices() const { return matrices_; }
    const PipelineConfig& config() const { return cfg_; }

    // Selects a good prime, scans SL_d(p) in BFS order for a non-central
    // word-map value, lifts the first hit through the parent links, and
    // verifies the lift exactly over the integers.
    WitnessReport find_witness(const ConstWord& w) {
        const std::uint64_t n = w.length();
        const std::uint64_t window_n = std::max<std::uint64_t>(n, 2);  // (C0, C0] is empty
        std::vector<PrimeDiagnostic> diags;
        for (std::uint64_t c0 = cfg_.c0; c0 <= cfg_.c0_max; c0 *= 2) {
            GoodPrimeOptions opt;
            opt.closure_cap = cfg_.closure_cap;
            opt.max_candidates = cfg_.max_primes_per_window;
            opt.cache = &generation_cache_;
            GoodPrimeSearch search(w, matrices_, window_n, c0, opt);
            while (auto gp = search.next()) {
                if (auto report = scan_prime(w, n, *gp, c0, diags)) return *report;
            }
            const auto& d = search.diagnostics();
            diags.insert(diags.end(), d.begin(), d.end());
        }
        throw WindowExhaustedError(
            "no witness found for '" + render(w, symbols_) + "' up to C0=" +
                std::to_string(cfg_.c0_max),
            std::move(diags));
    }

    // Certified upper bound on the complexity of w: the lift has w(g) != e.
    std::uint64_t complexity_upper_bound(const ConstWord& w) {
        return find_witness(w).lift_length;
    }

private:
    std::optional<WitnessReport> scan_prime(const ConstWord& w, std::uint64_t n,
                                            const GoodPrime& gp, std::uint64_t c0,
                                            std::vector<PrimeDiagnostic>& diags) {
        detail::StageTimer timer(cfg_.emit_seconds);
        CayleyBall& ball = ball_for(gp);
        double explore_ms = timer.lap_ms();

        ScanResult scan = scan_ball_for_witness(w, ball, gp.reduced_constants);
        const std::uint64_t scanned = scan.scanned;
        const std::optional<std::uint64_t> hit = scan.witness_id;
        double scan_ms = timer.lap_ms();

        if (!hit) {
            if (ball.complete()) {
                // Possible at small p: the reduced equation vanishes on the
                // whole group. Move on to the next prime.
                diags.push_back({gp.p, "no_witness", -1});
                return std::nullopt;
            }
            throw ResourceError("element cap hit at p=" + std::to_string(gp.p) +
                                " before any witness; raise the cap");
        }

        WitnessReport report;
        report.word = render(w, symbols_);
        report.n = n;
        report.prime = gp.p;
        report.witness_mod_p = ball.element(*hit);
        report.lift = ball.lift_word(*hit);
        report.lift_length = report.lift.length();
        report.search_depth = ball.depth_of(*hit);
        report.c0_used = c0;
        report.generation_method = gp.generation_method;
        report.elements_scanned = scanned;
        report.explore_ms = explore_ms;
        report.scan_ms = scan_ms;

        timer.mark();
        verify(w, gp, ball, *hit, report);
        report.verify_ms = timer.lap_ms();
        return report;
    }

    void verify(const ConstWord& w, const GoodPrime& gp, const CayleyBall& ball,
                std::uint64_t hit, WitnessReport& report) {
        // Double-entry check: the substituted word must survive free
        // reduction AND the exact integer evaluation must be non-central.
        FreeWord substituted = substitute(w, report.lift);
        bool word_nontrivial = !substituted.is_identity();
        IntMatrix lift_exact = eval_free_word(report.lift, matrices_, cfg_.entry_bit_cap);
        IntMatrix value_exact = eval_const_word(w, lift_exact, matrices_, cfg_.entry_bit_cap);
        bool matrix_noncentral = !value_exact.is_scalar();
        if (word_nontrivial != matrix_noncentral)
            throw Error("verification paths disagree on '" + report.word + "'");
        report.exact_nontrivial = word_nontrivial && matrix_noncentral;
        if (!report.exact_nontrivial)
            throw Error("witness failed exact verification on '" + report.word + "'");

        // The exact value must reduce back to the scanned value.
        ModMatrix value_mod = detail::eval_word_map_mod(w, ball.element(hit),
                                                        gp.reduced_constants);
        if (reduce_mod(value_exact, static_cast<std::uint32_t>(gp.p)) != value_mod)
            throw Error("reduction square broke at the witness");

        if (cfg_.verify_rescan) {
            // Commutation square at the witness.
            if (eval_free_word(substituted, matrices_, cfg_.entry_bit_cap) != value_exact)
                throw Error("commutation square broke at the witness");
            // Minimality: everything strictly shallower evaluates centrally.
            for (std::uint64_t id = 0; id < ball.layer_begin(report.search_depth); ++id) {
                ModMatrix value =
                    detail::eval_word_map_mod(w, ball.element(id), gp.reduced_constants);
                if (!is_central(value))
                    throw Error("scan order missed a shallower witness");
            }
        }
    }

    CayleyBall& ball_for(const GoodPrime& gp) {
        auto it = balls_.find(gp.p);
        if (it == balls_.end()) {
            it = balls_.emplace(gp.p, CayleyBall(gp.reduced_gens, cfg_.element_cap)).first;
        }
        return it->second;
    }

    GeneratorSet symbols_;
    MatrixGenerators matrices_;
    PipelineConfig cfg_;
    std::map<std::uint64_t, CayleyBall> balls_;
    GenerationCache generation_cache_;
};

inline WitnessReport find_witness(const ConstWord& w, const GeneratorSet& symbols,
                                  const MatrixGenerators& matrices, PipelineConfig cfg = {}) {
    Session session(symbols, matrices, cfg);
    return session.find_witness(w);
}

inline std::uint64_t complexity_upper_bound(const ConstWord& w, const GeneratorSet& symbols,
                                            const MatrixGenerators& matrices,
                                            PipelineConfig cfg = {}) {
    Session session(symbols, matrices, cfg);
    return session.complexity_upper_bound(w);
}

// ---------------------------------------------------------------------------
// Growth experiment
// ---------------------------------------------------------------------------

struct GrowthExperimentRow {
    std::uint64_t n = 0;
    std::uint32_t samples = 0;
    std::int64_t max_oracle_chi = -1;     // -1: no sample resolved at the oracle radius
    std::int64_t max_pipeline_bound = -1; // -1: the row failed (see error)
    std::uint64_t prime_used_max = 0;
    double fitted_c = 0.0;                // max bound / log n (0 when log n = 0)
    double seconds = 0.0;
    bool ok = true;
    std::string error;
};

// Samples `samples_per_n` equations of each length and pairs the pipeline
// bound with the brute-force oracle. Each (row, sample) draws its own seed,
// so output is identical for any worker count.
inline std::vector<GrowthExperimentRow> growth_experiment(
    const std::vector<std::uint64_t>& n_values, std::uint32_t samples_per_n,
    const GeneratorSet& symbols, const MatrixGenerators& matrices, PipelineConfig cfg,
    std::uint64_t seed) {
    std::vector<GrowthExperimentRow> rows;
    for (std::uint64_t n : n_values) {
        auto start = std::chrono::steady_clock::now();
        GrowthExperimentRow row;
        row.n = n;
        row.samples = samples_per_n;
        const std::uint64_t row_seed = derive_seed(seed, n);

        struct SampleOutcome {
            std::int64_t chi = -1;
            std::int64_t bound = -1;
            std::uint64_t prime = 0;
            std::string error;
        };
        std::vector<SampleOutcome> outcomes(samples_per_n);
        const int workers = worker_count();
        std::vector<std::unique_ptr<Session>> sessions;
        for (int t = 0; t < std::max(workers, 1); ++t)
            sessions.push_back(std::make_unique<Session>(symbols, matrices, cfg));
        parallel_for(samples_per_n, workers, [&](std::uint64_t j) {
            Session& session = *sessions[j % static_cast<std::uint64_t>(std::max(workers, 1))];
            SampleOutcome& out = outcomes[j];
            try {
                SplitMix64 rng(derive_seed(row_seed, j));
                ConstWord w = random_const_word(rng, n, symbols);
                WitnessReport report = session.find_witness(w);
                out.bound = static_cast<std::int64_t>(report.lift_length);
                out.prime = report.prime;
                ComplexityRecord oracle =
                    exact_complexity(w, symbols, cfg.oracle_radius);
                if (oracle.chi) out.chi = static_cast<std::int64_t>(*oracle.chi);
            } catch (const std::exception& e) {
                out.error = e.what();
            }
        });
        for (const auto& out : outcomes) {
            if (!out.error.empty()) {
                row.ok = false;
                row.error = out.error;
                continue;
            }
            row.max_pipeline_bound = std::max(row.max_pipeline_bound, out.bound);
            row.max_oracle_chi = std::max(row.max_oracle_chi, out.chi);
            row.prime_used_max = std::max(row.prime_used_max, out.prime);
        }
        if (!row.ok) row.max_pipeline_bound = -1;
        if (row.max_pipeline_bound >= 0 && n >= 2)
            row.fitted_c = static_cast<double>(row.max_pipeline_bound) /
                           std::log(static_cast<double>(n));
        if (cfg.emit_seconds)
            row.seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string growth_csv(std::span<const GrowthExperimentRow> rows) {
    std::string out = "n,samples,max_oracle_chi,max_pipeline_bound,prime_used_max,fitted_C,seconds\n";
    char buf[200];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%llu,%u,%lld,%lld,%llu,%.4f,%.3f\n",
                      static_cast<unsigned long long>(r.n), r.samples,
                      static_cast<long long>(r.max_oracle_chi),
                      static_cast<long long>(r.max_pipeline_bound),
                      static_cast<unsigned long long>(r.prime_used_max), r.fitted_c,
                      r.seconds);
        out += buf;
    }
    return out;
}

}  // namespace logwitness
