// logwitness: finds short non-solutions to one-variable word equations with
// constants over free matrix groups, with brute-force oracles and sweep
// experiments. All file outputs are byte-reproducible for fixed flags and
// seed; wall-clock timings only appear with --timings.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "logwitness/logwitness.hpp"

namespace lw = logwitness;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitExhausted = 2;
constexpr int kExitUnresolved = 3;
constexpr int kExitResource = 4;

struct CommonOpts {
    std::string word;
    std::string preset = "sanov";
    std::string matrix_file;
    std::string config_file;
    std::string out;
    std::string format;
    std::vector<std::uint64_t> n_values;
    std::vector<std::uint64_t> primes;
    std::string group;
    int max_length = 2;
    int radius = 6;
    std::uint32_t samples = 50;
    std::optional<std::uint64_t> seed;
    std::uint64_t c0 = 4;
    std::uint64_t cap_elements = lw::kDefaultElementCap;
    std::uint64_t cap_bits = lw::kDefaultEntryBitCap;
    bool timings = false;
    bool verify = false;
};

// Flags override config-file values; config values override defaults.
void apply_config(const CLI::App* cmd, CommonOpts& o) {
    if (o.config_file.empty()) return;
    lw::Json cfg = lw::load_json_file(o.config_file);
    auto unset = [&](const std::string& flag) {
        const CLI::Option* opt = cmd->get_option_no_throw("--" + flag);
        return opt != nullptr && opt->count() == 0 && cfg.contains(flag);
    };
    if (unset("word")) o.word = cfg["word"].get<std::string>();
    if (unset("preset")) o.preset = cfg["preset"].get<std::string>();
    if (unset("matrix-file")) o.matrix_file = cfg["matrix-file"].get<std::string>();
    if (unset("out")) o.out = cfg["out"].get<std::string>();
    if (unset("format")) o.format = cfg["format"].get<std::string>();
    if (unset("group")) o.group = cfg["group"].get<std::string>();
    if (unset("max-length")) o.max_length = cfg["max-length"].get<int>();
    if (unset("radius")) o.radius = cfg["radius"].get<int>();
    if (unset("samples")) o.samples = cfg["samples"].get<std::uint32_t>();
    if (unset("seed")) o.seed = cfg["seed"].get<std::uint64_t>();
    if (unset("c0")) o.c0 = cfg["c0"].get<std::uint64_t>();
    if (unset("cap-elements")) o.cap_elements = cfg["cap-elements"].get<std::uint64_t>();
    if (unset("cap-bits")) o.cap_bits = cfg["cap-bits"].get<std::uint64_t>();
    if (unset("timings")) o.timings = cfg["timings"].get<bool>();
    if (unset("verify")) o.verify = cfg["verify"].get<bool>();
    auto list = [&](const std::string& flag, std::vector<std::uint64_t>& into) {
        const CLI::Option* opt = cmd->get_option_no_throw("--" + flag);
        if (opt == nullptr || opt->count() > 0 || !cfg.contains(flag)) return;
        into.clear();
        for (const auto& v : cfg[flag]) into.push_back(v.get<std::uint64_t>());
    };
    list("n", o.n_values);
    list("primes", o.primes);
}

void require_format(const CommonOpts& o, const std::string& expected) {
    if (!o.format.empty() && o.format != expected)
        throw lw::ValidationError("this subcommand only emits " + expected);
}

void emit(const std::string& payload, const std::string& out) {
    std::fwrite(payload.data(), 1, payload.size(), stdout);
    if (!out.empty()) {
        std::ofstream f(out, std::ios::binary);
        if (!f) throw lw::ValidationError("cannot write '" + out + "'");
        f << payload;
    }
}

std::pair<lw::GeneratorSet, lw::MatrixGenerators> resolve_generators(const CommonOpts& o) {
    if (!o.matrix_file.empty()) return lw::load_matrix_file(o.matrix_file);
    if (o.preset == "sanov") return {lw::GeneratorSet(2), lw::sanov_generators()};
    if (o.preset.rfind("elem", 0) == 0) {
        int d = std::stoi(o.preset.substr(4));
        lw::MatrixGenerators gens = lw::elementary_generators(d);
        return {lw::GeneratorSet(gens.rank()), std::move(gens)};
    }
    throw lw::ValidationError("unknown preset '" + o.preset + "' (try sanov or elem<d>)");
}

lw::PipelineConfig pipeline_config(const CommonOpts& o) {
    lw::PipelineConfig cfg;
    cfg.c0 = o.c0;
    cfg.element_cap = o.cap_elements;
    cfg.entry_bit_cap = static_cast<std::uint32_t>(o.cap_bits);
    cfg.oracle_radius = o.radius;
    cfg.verify_rescan = o.verify;
    cfg.emit_seconds = o.timings;
    if (o.seed) cfg.seed = *o.seed;
    return cfg;
}

int cmd_witness(const CLI::App* cmd, CommonOpts& o) {
    apply_config(cmd, o);
    require_format(o, "json");
    auto [symbols, matrices] = resolve_generators(o);
    lw::ConstWord w = lw::parse_const_word(o.word, symbols);
    lw::Session session(symbols, matrices, pipeline_config(o));
    lw::WitnessReport report = session.find_witness(w);
    std::fprintf(stderr, "p=%llu depth=%d scanned=%llu generation=%s\n",
                 static_cast<unsigned long long>(report.prime), report.search_depth,
                 static_cast<unsigned long long>(report.elements_scanned),
                 report.generation_method.c_str());
    emit(lw::witness_report_to_json(report, symbols).dump(2) + "\n", o.out);
    return kExitOk;
}

int cmd_complexity(const CLI::App* cmd, CommonOpts& o) {
    apply_config(cmd, o);
    require_format(o, "json");
    auto [symbols, matrices] = resolve_generators(o);
    lw::ConstWord w = lw::parse_const_word(o.word, symbols);
    lw::ComplexityRecord rec = lw::exact_complexity(w, symbols, o.radius, o.cap_elements);
    emit(lw::complexity_record_to_json(rec, w, symbols).dump(2) + "\n", o.out);
    return rec.chi ? kExitOk : kExitUnresolved;
}

int cmd_growth(const CLI::App* cmd, CommonOpts& o) {
    apply_config(cmd, o);
    require_format(o, "csv");
    if (!o.seed) throw lw::ValidationError("--seed is required for sampling subcommands");
    if (o.n_values.empty()) throw lw::ValidationError("--n needs at least one length");
    auto [symbols, matrices] = resolve_generators(o);
    auto rows = lw::growth_experiment(o.n_values, o.samples, symbols, matrices,
                                      pipeline_config(o), *o.seed);
    for (const auto& row : rows)
        if (!row.ok)
            std::fprintf(stderr, "row n=%llu failed: %s\n",
                         static_cast<unsigned long long>(row.n), row.error.c_str());
    emit(lw::growth_csv(rows), o.out);
    return kExitOk;
}

int cmd_sweep(const CLI::App* cmd, CommonOpts& o) {
    apply_config(cmd, o);
    require_format(o, "csv");
    for (std::uint64_t p : o.primes)
        if (!lw::is_prime_u64(p))
            throw lw::ValidationError(std::to_string(p) + " is not prime");
    auto [symbols, matrices] = resolve_generators(o);
    std::vector<lw::SweepRow> rows(o.primes.size());
    lw::parallel_for(o.primes.size(), lw::worker_count(), [&](std::uint64_t i) {
        rows[i] = lw::sweep_prime(o.primes[i], matrices, symbols, o.cap_elements, o.timings);
    });
    emit(lw::sweep_csv(rows), o.out);
    return kExitOk;
}

int cmd_mifcheck(const CLI::App* cmd, CommonOpts& o) {
    apply_config(cmd, o);
    require_format(o, "json");
    lw::FiniteGroupTable table = [&]() {
        try {
            return lw::FiniteGroupTable::builtin(o.group);
        } catch (const lw::NotFoundError&) {
            std::ifstream probe(o.group);
            if (!probe) throw;
            return lw::load_group_file(o.group);
        }
    }();
    auto found = lw::mixed_identity_search(table, o.max_length);
    std::fprintf(stderr, "order=%u tested=%llu enumerated=%llu\n", table.order(),
                 static_cast<unsigned long long>(found.words_tested),
                 static_cast<unsigned long long>(found.words_enumerated));
    lw::Json arr = lw::Json::array();
    for (const auto& w : found.identities) arr.push_back(w.render(table));
    emit(arr.dump(2) + "\n", o.out);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"short non-solutions to word equations over free matrix groups"};
    app.require_subcommand(1);
    CommonOpts o;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", o.config_file, "JSON config; flags override its values");
        cmd->add_option("--out", o.out, "also write the payload to this file");
        cmd->add_option("--format", o.format, "output format (fixed per subcommand)");
    };
    auto add_generators = [&](CLI::App* cmd) {
        cmd->add_option("--preset", o.preset, "generator preset: sanov | elem<d>");
        cmd->add_option("--matrix-file", o.matrix_file,
                        "JSON file with determinant-1 integer generators");
    };

    CLI::App* witness = app.add_subcommand("witness", "find a short non-solution");
    witness->add_option("--word", o.word, "equation in x and the generators");
    add_generators(witness);
    witness->add_option("--c0", o.c0, "initial window constant");
    witness->add_option("--cap-elements", o.cap_elements, "Cayley ball element cap");
    witness->add_option("--cap-bits", o.cap_bits, "exact-entry bit cap");
    witness->add_option("--seed", o.seed, "accepted for config symmetry");
    witness->add_flag("--verify", o.verify, "re-check minimality and both squares");
    witness->add_flag("--timings", o.timings, "emit wall times (breaks reproducibility)");
    add_common(witness);

    CLI::App* complexity = app.add_subcommand("complexity", "exact complexity by brute force");
    complexity->add_option("--word", o.word, "equation in x and the generators");
    complexity->add_option("--radius", o.radius, "free ball radius to exhaust");
    complexity->add_option("--cap-elements", o.cap_elements, "ball enumeration cap");
    add_generators(complexity);
    add_common(complexity);

    CLI::App* growth = app.add_subcommand("growth", "sampled growth experiment");
    growth->add_option("--n", o.n_values, "equation lengths")->delimiter(',');
    growth->add_option("--samples", o.samples, "equations per length");
    growth->add_option("--seed", o.seed, "experiment seed (required)");
    growth->add_option("--radius", o.radius, "oracle radius for the paired lower bound");
    growth->add_option("--c0", o.c0, "initial window constant");
    growth->add_option("--cap-elements", o.cap_elements, "Cayley ball element cap");
    growth->add_option("--cap-bits", o.cap_bits, "exact-entry bit cap");
    growth->add_flag("--timings", o.timings, "emit wall times (breaks reproducibility)");
    add_generators(growth);
    add_common(growth);

    CLI::App* diam = app.add_subcommand("diameter", "exact Cayley diameters of SL_d(p)");
    CLI::App* injrad = app.add_subcommand("injrad", "injectivity radii of reduction mod p");
    for (CLI::App* cmd : {diam, injrad}) {
        cmd->add_option("--primes", o.primes, "primes to sweep")->delimiter(',');
        cmd->add_option("--cap-elements", o.cap_elements, "Cayley ball element cap");
        cmd->add_flag("--timings", o.timings, "emit wall times (breaks reproducibility)");
        add_generators(cmd);
        add_common(cmd);
    }

    CLI::App* mif = app.add_subcommand("mifcheck", "exhaustive mixed-identity search");
    mif->add_option("--group", o.group, "builtin (c2, psl2-<p>) or a table file");
    mif->add_option("--max-length", o.max_length, "maximal equation length");
    add_common(mif);

    try {
        app.parse(argc, argv);
        if (app.got_subcommand(witness)) return cmd_witness(witness, o);
        if (app.got_subcommand(complexity)) return cmd_complexity(complexity, o);
        if (app.got_subcommand(growth)) return cmd_growth(growth, o);
        if (app.got_subcommand(diam)) return cmd_sweep(diam, o);
        if (app.got_subcommand(injrad)) return cmd_sweep(injrad, o);
        if (app.got_subcommand(mif)) return cmd_mifcheck(mif, o);
        std::cerr << "no subcommand\n";
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const lw::WindowExhaustedError& e) {
        std::cerr << "error: " << e.what() << "\n"
                  << lw::diagnostics_to_json(e.diagnostics).dump(2) << "\n";
        return kExitExhausted;
    } catch (const lw::ResourceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitResource;
    } catch (const lw::EmptyWindowError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitExhausted;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
