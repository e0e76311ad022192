// json_io.hpp
//
// JSON (de)serialization for the interchange formats: circuits, measurement
// patterns, schedules, depth reports, teleportation schemes, ladder specs
// and queries, and bond grids. Parsing is strict — missing fields, wrong
// types, or unknown enum names throw std::invalid_argument with the offending
// key — and every loader finishes with the type's own validate() so a file
// that parses is also semantically well-formed. Complex numbers are [re, im]
// pairs; matrices are row-major nested lists of them.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "compiler.hpp"
#include "gates.hpp"
#include "ladder.hpp"
#include "pattern.hpp"
#include "teleport.hpp"
#include "valence_bond.hpp"

namespace mbqc {

using njson = nlohmann::json;

namespace jio {

inline const njson& field(const njson& j, const char* key) {
    if (!j.is_object())
        throw std::invalid_argument(std::string("json: expected object around '") + key + "'");
    const auto it = j.find(key);
    if (it == j.end())
        throw std::invalid_argument(std::string("json: missing field '") + key + "'");
    return *it;
}

inline int as_int(const njson& j, const char* what) {
    if (!j.is_number_integer())
        throw std::invalid_argument(std::string("json: '") + what + "' must be an integer");
    return j.get<int>();
}

inline double as_number(const njson& j, const char* what) {
    if (!j.is_number())
        throw std::invalid_argument(std::string("json: '") + what + "' must be a number");
    return j.get<double>();
}

inline const njson& as_array(const njson& j, const char* what) {
    if (!j.is_array())
        throw std::invalid_argument(std::string("json: '") + what + "' must be an array");
    return j;
}

inline std::vector<int> int_list(const njson& j, const char* what) {
    std::vector<int> out;
    for (const auto& x : as_array(j, what)) out.push_back(as_int(x, what));
    return out;
}

}  // namespace jio

// --- complex numbers and matrices ---------------------------------------------

inline njson complex_to_json(const cplx& z) { return njson::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const njson& j) {
    if (!j.is_array() || j.size() != 2)
        throw std::invalid_argument("json: complex number must be a [re, im] pair");
    return {jio::as_number(j[0], "re"), jio::as_number(j[1], "im")};
}

inline njson matrix_to_json(const ComplexMatrix& m) {
    njson rows = njson::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        njson row = njson::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline ComplexMatrix matrix_from_json(const njson& j) {
    const njson& rows = jio::as_array(j, "matrix");
    if (rows.empty()) throw std::invalid_argument("json: matrix must have rows");
    const std::size_t cols = jio::as_array(rows[0], "matrix row").size();
    if (cols == 0) throw std::invalid_argument("json: matrix row must have entries");
    ComplexMatrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const njson& row = jio::as_array(rows[r], "matrix row");
        if (row.size() != cols) throw std::invalid_argument("json: ragged matrix");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = complex_from_json(row[c]);
    }
    return m;
}

// --- circuits ------------------------------------------------------------------

inline njson circuit_to_json(const Circuit& c) {
    njson gates = njson::array();
    for (const Gate& g : c.gates) {
        njson jg;
        jg["kind"] = gate_kind_name(g.kind);
        if (gate_uses_theta(g.kind)) jg["theta"] = g.theta;
        jg["targets"] = g.targets;
        gates.push_back(std::move(jg));
    }
    return njson{{"n", c.n}, {"gates", gates}};
}

inline Circuit circuit_from_json(const njson& j) {
    Circuit c;
    c.n = jio::as_int(jio::field(j, "n"), "n");
    for (const auto& jg : jio::as_array(jio::field(j, "gates"), "gates")) {
        const njson& kind = jio::field(jg, "kind");
        if (!kind.is_string()) throw std::invalid_argument("json: gate 'kind' must be a string");
        const GateKind k = gate_kind_from_name(kind.get<std::string>());
        const std::vector<int> targets = jio::int_list(jio::field(jg, "targets"), "targets");
        if (gate_uses_theta(k)) {
            const double theta = jio::as_number(jio::field(jg, "theta"), "theta");
            c.gates.push_back(Gate::make(k, targets, theta));
        } else {
            if (jg.contains("theta"))
                throw std::invalid_argument("json: gate kind takes no 'theta'");
            c.gates.push_back(Gate::make(k, targets));
        }
    }
    c.validate();
    return c;
}

// --- measurement patterns --------------------------------------------------------

inline njson pattern_to_json(const MeasurementPattern& p) {
    njson j;
    j["sites"] = p.graph.sites;
    njson edges = njson::array();
    for (const auto& [a, b] : p.graph.edges) edges.push_back(njson::array({a, b}));
    j["edges"] = edges;
    j["inputs"] = p.inputs;
    j["outputs"] = p.outputs;
    njson instructions = njson::array();
    for (const auto& ins : p.instructions) {
        njson ji;
        ji["site"] = ins.site;
        ji["basis"] = ins.basis == MeasBasis::Mz ? "Mz" : "M";
        ji["theta"] = ins.angle;
        ji["sign_deps"] = std::vector<OutcomeId>(ins.sign_deps.ids.begin(), ins.sign_deps.ids.end());
        ji["id"] = ins.id;
        instructions.push_back(std::move(ji));
    }
    j["instructions"] = instructions;
    njson frame = njson::object();
    for (const auto& [site, e] : p.frame) {
        njson je;
        je["x_deps"] = std::vector<OutcomeId>(e.x_deps.ids.begin(), e.x_deps.ids.end());
        je["z_deps"] = std::vector<OutcomeId>(e.z_deps.ids.begin(), e.z_deps.ids.end());
        frame[std::to_string(site)] = std::move(je);
    }
    j["frame"] = frame;
    return j;
}

inline MeasurementPattern pattern_from_json(const njson& j) {
    MeasurementPattern p;
    p.graph.sites = jio::int_list(jio::field(j, "sites"), "sites");
    for (const auto& je : jio::as_array(jio::field(j, "edges"), "edges")) {
        if (!je.is_array() || je.size() != 2)
            throw std::invalid_argument("json: edge must be a [site, site] pair");
        p.graph.edges.emplace_back(jio::as_int(je[0], "edge"), jio::as_int(je[1], "edge"));
    }
    p.inputs = jio::int_list(jio::field(j, "inputs"), "inputs");
    p.outputs = jio::int_list(jio::field(j, "outputs"), "outputs");
    for (const auto& ji : jio::as_array(jio::field(j, "instructions"), "instructions")) {
        MeasurementInstruction ins;
        ins.site = jio::as_int(jio::field(ji, "site"), "site");
        const njson& basis = jio::field(ji, "basis");
        if (!basis.is_string()) throw std::invalid_argument("json: 'basis' must be a string");
        const std::string name = basis.get<std::string>();
        if (name == "Mz")
            ins.basis = MeasBasis::Mz;
        else if (name == "M")
            ins.basis = MeasBasis::M;
        else
            throw std::invalid_argument("json: unknown basis '" + name + "'");
        ins.angle = jio::as_number(jio::field(ji, "theta"), "theta");
        ins.sign_deps = ParitySet::of(jio::int_list(jio::field(ji, "sign_deps"), "sign_deps"));
        ins.id = jio::as_int(jio::field(ji, "id"), "id");
        p.instructions.push_back(std::move(ins));
    }
    const njson& frame = jio::field(j, "frame");
    if (!frame.is_object()) throw std::invalid_argument("json: 'frame' must be an object");
    for (const auto& [key, je] : frame.items()) {
        int site = 0;
        try {
            site = std::stoi(key);
        } catch (const std::exception&) {
            throw std::invalid_argument("json: frame key must be a site number");
        }
        FrameEntry e;
        e.x_deps = ParitySet::of(jio::int_list(jio::field(je, "x_deps"), "x_deps"));
        e.z_deps = ParitySet::of(jio::int_list(jio::field(je, "z_deps"), "z_deps"));
        p.frame[site] = std::move(e);
    }
    p.validate();
    return p;
}

// --- schedules and depth reports -------------------------------------------------

inline njson schedule_to_json(const Schedule& s) {
    njson classical = njson::array();
    for (const auto& step : s.classical_steps) {
        njson parities = njson::array();
        for (const auto& pset : step.parities)
            parities.push_back(std::vector<OutcomeId>(pset.ids.begin(), pset.ids.end()));
        classical.push_back(std::move(parities));
    }
    return njson{{"layers", s.layers}, {"classical", classical}};
}

inline Schedule schedule_from_json(const njson& j) {
    Schedule s;
    for (const auto& jl : jio::as_array(jio::field(j, "layers"), "layers"))
        s.layers.push_back(jio::int_list(jl, "layer"));
    for (const auto& js : jio::as_array(jio::field(j, "classical"), "classical")) {
        ClassicalStep step;
        for (const auto& jp : jio::as_array(js, "classical step"))
            step.parities.push_back(ParitySet::of(jio::int_list(jp, "parity")));
        s.classical_steps.push_back(std::move(step));
    }
    return s;
}

inline njson depth_report_to_json(const DepthReport& r) {
    return njson{{"quantum_layers", r.quantum_layers},
                 {"classical_parity_depth", r.classical_parity_depth},
                 {"gate_count", r.gate_count},
                 {"site_count", r.site_count}};
}

// --- teleportation schemes --------------------------------------------------------

inline njson scheme_to_json(const TeleportScheme& s) {
    njson ops = njson::array();
    for (const auto& u : s.ops) ops.push_back(matrix_to_json(u));
    return njson{{"d", s.d}, {"ops", ops}, {"k", s.k}};
}

inline TeleportScheme scheme_from_json(const njson& j) {
    TeleportScheme s;
    s.d = jio::as_int(jio::field(j, "d"), "d");
    if (s.d < 2) throw std::invalid_argument("json: scheme 'd' must be >= 2");
    s.resource = MaxEntangled::standard(s.d);
    for (const auto& jm : jio::as_array(jio::field(j, "ops"), "ops"))
        s.ops.push_back(matrix_from_json(jm));
    for (const auto& jk : jio::as_array(jio::field(j, "k"), "k"))
        s.k.push_back(jio::as_number(jk, "k"));
    s.validate();
    return s;
}

// --- ladders ---------------------------------------------------------------------

inline njson ladder_to_json(const LadderSpec& s) {
    njson unitaries = njson::array();
    for (const auto& u : s.unitaries) unitaries.push_back(matrix_to_json(u));
    return njson{{"n", s.n}, {"unitaries", unitaries}};
}

inline LadderSpec ladder_from_json(const njson& j) {
    LadderSpec s;
    s.n = jio::as_int(jio::field(j, "n"), "n");
    for (const auto& jm : jio::as_array(jio::field(j, "unitaries"), "unitaries"))
        s.unitaries.push_back(matrix_from_json(jm));
    s.validate();
    return s;
}

// Query items: {"line": int, "basis": "M"|"Mz", "theta": number}. When
// `with_outcomes` (joint-probability queries) an "outcome" of 0/1 is
// required; sampling queries must omit it.
inline njson ladder_query_to_json(const MeasurementQuery& q, bool with_outcomes = true) {
    njson items = njson::array();
    for (const auto& it : q.items) {
        njson ji;
        ji["line"] = it.line;
        ji["basis"] = it.basis == MeasBasis::Mz ? "Mz" : "M";
        ji["theta"] = it.angle;
        if (with_outcomes) ji["outcome"] = it.outcome;
        items.push_back(std::move(ji));
    }
    return njson{{"items", items}};
}

inline MeasurementQuery ladder_query_from_json(const njson& j, bool with_outcomes) {
    MeasurementQuery q;
    for (const auto& ji : jio::as_array(jio::field(j, "items"), "items")) {
        LineMeasurement lm;
        lm.line = jio::as_int(jio::field(ji, "line"), "line");
        const njson& basis = jio::field(ji, "basis");
        if (!basis.is_string()) throw std::invalid_argument("json: 'basis' must be a string");
        const std::string name = basis.get<std::string>();
        if (name == "Mz")
            lm.basis = MeasBasis::Mz;
        else if (name == "M")
            lm.basis = MeasBasis::M;
        else
            throw std::invalid_argument("json: unknown basis '" + name + "'");
        lm.angle = jio::as_number(jio::field(ji, "theta"), "theta");
        if (with_outcomes)
            lm.outcome = jio::as_int(jio::field(ji, "outcome"), "outcome");
        else if (ji.contains("outcome"))
            throw std::invalid_argument("json: sampling queries must not fix outcomes");
        q.items.push_back(lm);
    }
    return q;
}

// --- bond grids -------------------------------------------------------------------

inline njson grid_to_json(const BondGrid& g) {
    njson sites = njson::array();
    for (const auto& [site, arity] : g.site_arity) sites.push_back(njson::array({site, arity}));
    njson bonds = njson::array();
    for (const auto& b : g.bonds)
        bonds.push_back(njson::array({b.a.site, b.a.slot, b.b.site, b.b.slot}));
    return njson{{"sites", sites}, {"bonds", bonds}};
}

inline BondGrid grid_from_json(const njson& j) {
    BondGrid g;
    for (const auto& js : jio::as_array(jio::field(j, "sites"), "sites")) {
        if (!js.is_array() || js.size() != 2)
            throw std::invalid_argument("json: grid site must be a [site, arity] pair");
        const int site = jio::as_int(js[0], "site");
        if (g.site_arity.count(site)) throw std::invalid_argument("json: duplicate grid site");
        g.site_arity[site] = jio::as_int(js[1], "arity");
    }
    for (const auto& jb : jio::as_array(jio::field(j, "bonds"), "bonds")) {
        if (!jb.is_array() || jb.size() != 4)
            throw std::invalid_argument("json: bond must be [site, slot, site, slot]");
        Bond b;
        b.a.site = jio::as_int(jb[0], "bond");
        b.a.slot = jio::as_int(jb[1], "bond");
        b.b.site = jio::as_int(jb[2], "bond");
        b.b.slot = jio::as_int(jb[3], "bond");
        g.bonds.push_back(b);
    }
    g.validate();
    return g;
}

// --- files -----------------------------------------------------------------------

inline njson load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    njson j;
    try {
        in >> j;
    } catch (const njson::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    return j;
}

// Write via a temp file + rename so a failed run never leaves a partial file.
inline void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write file: " + tmp);
        out << content;
        if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace mbqc
