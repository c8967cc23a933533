#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "logwitness/errors.hpp"
#include "logwitness/intmat.hpp"
#include "logwitness/modp.hpp"
#include "logwitness/oracle.hpp"
#include "logwitness/pipeline.hpp"
#include "logwitness/words.hpp"

namespace logwitness {

using Json = nlohmann::json;

inline Json mod_matrix_to_json(const ModMatrix& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.dim(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.dim(); ++j) row.push_back(m.at(i, j));
        rows.push_back(std::move(row));
    }
    return Json{{"p", m.modulus()}, {"dim", m.dim()}, {"entries", std::move(rows)}};
}

inline Json witness_report_to_json(const WitnessReport& r, const GeneratorSet& symbols) {
    return Json{
        {"word", r.word},
        {"n", r.n},
        {"prime", r.prime},
        {"witness_mod_p", mod_matrix_to_json(r.witness_mod_p)},
        {"lift", render(r.lift, symbols)},
        {"lift_length", r.lift_length},
        {"exact_nontrivial", r.exact_nontrivial},
        {"search_depth", r.search_depth},
        {"timings",
         Json{{"explore_ms", r.explore_ms}, {"scan_ms", r.scan_ms}, {"verify_ms", r.verify_ms}}},
    };
}

inline Json complexity_record_to_json(const ComplexityRecord& rec, const ConstWord& w,
                                      const GeneratorSet& symbols) {
    Json j{
        {"word", render(w, symbols)},
        {"radius_searched", rec.radius_searched},
        {"scanned", rec.scanned},
    };
    if (rec.chi) {
        j["chi"] = *rec.chi;
        j["witness"] = render(rec.witness, symbols);
    } else {
        j["chi"] = "unresolved >= " + std::to_string(rec.radius_searched + 1);
        j["witness"] = nullptr;
    }
    return j;
}

inline Json diagnostics_to_json(const std::vector<PrimeDiagnostic>& diags) {
    Json arr = Json::array();
    for (const auto& d : diags) {
        Json item{{"prime", d.p}, {"failed_clause", d.failed_clause}};
        if (d.constant_index >= 0) {
            item["constant_index"] = d.constant_index;
        } else {
            item["constant_index"] = nullptr;
        }
        arr.push_back(std::move(item));
    }
    return arr;
}

// ---------------------------------------------------------------------------
// File loaders
// ---------------------------------------------------------------------------

inline Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const Json::exception& e) {
        throw ParseError("invalid JSON in '" + path + "': " + e.what());
    }
    return j;
}

inline BigInt bigint_from_json(const Json& v) {
    if (v.is_string()) return BigInt(v.get<std::string>());
    if (v.is_number_integer()) return BigInt(v.get<long long>());
    throw ParseError("matrix entries must be decimal integer strings");
}

// Generator file: {"dim": d, "generators": [[["1","2"],["0","1"]], ...],
// "names": ["a","b"]} with entries as decimal strings (row-major).
inline std::pair<GeneratorSet, MatrixGenerators> load_matrix_file(const std::string& path) {
    Json j = load_json_file(path);
    if (!j.contains("generators") || !j["generators"].is_array() || j["generators"].empty())
        throw ParseError("matrix file needs a nonempty 'generators' array");
    std::vector<IntMatrix> gens;
    for (const auto& gj : j["generators"]) {
        if (!gj.is_array() || gj.empty()) throw ParseError("generator must be an array of rows");
        std::vector<std::vector<BigInt>> rows;
        for (const auto& rj : gj) {
            std::vector<BigInt> row;
            for (const auto& v : rj) row.push_back(bigint_from_json(v));
            rows.push_back(std::move(row));
        }
        gens.push_back(IntMatrix::from_rows(rows));
    }
    if (j.contains("dim") && j["dim"].get<int>() != gens[0].dim())
        throw ParseError("declared dim disagrees with the matrices");
    MatrixGenerators matrices(std::move(gens));
    if (j.contains("names")) {
        auto names = j["names"].get<std::vector<std::string>>();
        return {GeneratorSet(names), std::move(matrices)};
    }
    return {GeneratorSet(matrices.rank()), std::move(matrices)};
}

// Group table file: {"order": m, "mul": [[...], ...], "names": [...]}.
inline FiniteGroupTable load_group_file(const std::string& path) {
    Json j = load_json_file(path);
    if (!j.contains("order") || !j.contains("mul"))
        throw ParseError("group file needs 'order' and 'mul'");
    auto order = j["order"].get<std::uint32_t>();
    std::vector<std::uint32_t> mul;
    for (const auto& row : j["mul"])
        for (const auto& v : row) mul.push_back(v.get<std::uint32_t>());
    std::vector<std::string> names;
    if (j.contains("names")) names = j["names"].get<std::vector<std::string>>();
    try {
        return FiniteGroupTable::from_table(order, std::move(mul), std::move(names));
    } catch (const ValidationError& e) {
        throw ValidationError("group file '" + path + "': " + e.what());
    }
}

}  // namespace logwitness
