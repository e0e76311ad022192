// compiler.hpp
//
// Circuit-to-measurement-pattern compilation via a fixed lowering catalog,
// dependency-layer scheduling (greedy ASAP, the Clifford one-layer case and
// the restricted two-layer case), corrected-readout reinterpretation and
// distributions (exhaustive branch enumeration plus a polynomial
// density-matrix path for non-adaptive patterns), depth metrics, and the
// rewrite of mid-circuit measurements into unitary pointer circuits.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "gates.hpp"
#include "pattern.hpp"
#include "pauli.hpp"
#include "state.hpp"

namespace mbqc {

// --- gate lowering ---------------------------------------------------------------

// One lowering primitive on an n-wire register: either a CZ edge between two
// wires or a single measurement step on one wire. A step with base angle b
// contributes W(-b) to the wire (with an X^s byproduct), so a gate lowers to
// the step list of its W factorization, leftmost step applied first.
struct LoweredPrimitive {
    bool is_edge = false;
    int wire_a = 0;      // step: the wire acted on; edge: first endpoint
    int wire_b = 0;      // edge: second endpoint
    double base = 0.0;   // step: base measurement angle

    static LoweredPrimitive step(int wire, double base) { return {false, wire, 0, base}; }
    static LoweredPrimitive edge(int a, int b) { return {true, a, b, 0.0}; }
};

// Fixed rewrites, using H = W(0), X = W(pi)W(0), Z = W(0)W(pi),
// Phase(t) = W(0)W(t), Rx(t) ~ W(2t)W(0), Rz(t) ~ W(0)W(2t), and
// CX = (I (x) H) CZ (I (x) H) on (control, target). At most 4 steps per gate.
inline std::vector<LoweredPrimitive> lower_gate(const Gate& g) {
    using LP = LoweredPrimitive;
    const int w = g.targets[0];
    switch (g.kind) {
        case GateKind::H: return {LP::step(w, 0.0)};
        case GateKind::X: return {LP::step(w, 0.0), LP::step(w, -kPi)};
        case GateKind::Z: return {LP::step(w, -kPi), LP::step(w, 0.0)};
        case GateKind::Y:  // Y ~ XZ, Z applied first
            return {LP::step(w, -kPi), LP::step(w, 0.0), LP::step(w, 0.0), LP::step(w, -kPi)};
        case GateKind::S: return {LP::step(w, -kPi / 2.0), LP::step(w, 0.0)};
        case GateKind::Phase: return {LP::step(w, -g.theta), LP::step(w, 0.0)};
        case GateKind::RotX: return {LP::step(w, 0.0), LP::step(w, -2.0 * g.theta)};
        case GateKind::RotZ: return {LP::step(w, -2.0 * g.theta), LP::step(w, 0.0)};
        case GateKind::W: return {LP::step(w, -g.theta)};
        case GateKind::CZ: return {LP::edge(g.targets[0], g.targets[1])};
        case GateKind::CX:
            return {LP::step(g.targets[1], 0.0), LP::edge(g.targets[0], g.targets[1]),
                    LP::step(g.targets[1], 0.0)};
    }
    throw std::logic_error("lower_gate: unsupported gate kind");
}

// Pattern with no measurements: wires 0..n-1 are sites 1..n, inputs = outputs.
inline MeasurementPattern identity_pattern(int n) {
    if (n < 0) throw std::invalid_argument("identity_pattern: negative wire count");
    MeasurementPattern p;
    for (int i = 1; i <= n; ++i) p.graph.sites.push_back(i);
    p.inputs = p.graph.sites;
    p.outputs = p.graph.sites;
    return p;
}

namespace detail {

// n-wire pattern realizing one primitive. Wires are sites 1..n; a step adds
// site n+1, measures the stepped wire's site and rewires its output.
inline MeasurementPattern primitive_pattern(int n, const LoweredPrimitive& pr) {
    MeasurementPattern p = identity_pattern(n);
    if (pr.is_edge) {
        p.graph.add_edge(pr.wire_a + 1, pr.wire_b + 1);
        return p;
    }
    const int in_site = pr.wire_a + 1;
    const int new_site = n + 1;
    p.graph.sites.push_back(new_site);
    p.graph.add_edge(in_site, new_site);
    p.instructions.push_back({in_site, MeasBasis::M, pr.base, {}, in_site});
    p.outputs[static_cast<std::size_t>(pr.wire_a)] = new_site;
    p.frame[new_site].x_deps = ParitySet::of({in_site});
    return p;
}

}  // namespace detail

// --- compilation -----------------------------------------------------------------

// Compile a gate list into one composed measurement pattern. Input sites are
// 1..n in wire order; every branch's corrected output equals the circuit's
// action on the input. Site count <= n + 4 * gate count.
inline MeasurementPattern compile(const Circuit& c) {
    c.validate();
    MeasurementPattern acc = identity_pattern(c.n);
    for (const auto& g : c.gates) {
        for (const auto& pr : lower_gate(g)) {
            std::map<int, int> wiring;
            for (std::size_t i = 0; i < acc.outputs.size(); ++i)
                wiring[acc.outputs[i]] = static_cast<int>(i) + 1;
            acc = compose(acc, detail::primitive_pattern(c.n, pr), wiring);
        }
    }
    return acc;
}

// Single-wire pattern for an arbitrary 1-qubit unitary: a four-step chain
// from its W factorization by default, or the five-site Euler-angle pattern.
inline MeasurementPattern pattern_for_unitary(const ComplexMatrix& u, bool use_euler = false) {
    if (use_euler) return pattern_euler(euler_xzx(u));
    const WAngles wa = w_decompose(u);
    Circuit c;
    c.n = 1;
    c.gates = {Gate::make(GateKind::W, {0}, wa.theta3), Gate::make(GateKind::W, {0}, wa.theta2),
               Gate::make(GateKind::W, {0}, wa.theta1), Gate::make(GateKind::W, {0}, 0.0)};
    return compile(c);
}

// --- scheduling ------------------------------------------------------------------

// One round of classical processing between measurement layers: the XOR sets
// evaluated once the layer's outcomes are in.
struct ClassicalStep {
    std::vector<ParitySet> parities;
};

// Measurement layering of a pattern. classical_steps[i] lists the parities
// evaluated after layers[i] fires: the sign_deps of layer-(i+2) instructions
// for i+2 <= layer count, plus, after the final layer, the nonempty
// byproduct-frame parities on the outputs.
struct Schedule {
    std::vector<std::vector<OutcomeId>> layers;
    std::vector<ClassicalStep> classical_steps;
    std::size_t gate_count = 0;
    std::size_t site_count = 0;
};

// Greedy as-soon-as-possible layering of the sign-dependency DAG: an
// instruction's layer is one past the deepest layer it depends on.
// Dependency-free instructions (all Mz readouts included) land in layer 1.
inline Schedule schedule(const MeasurementPattern& p, std::size_t gate_count = 0) {
    p.validate();
    Schedule s;
    s.gate_count = gate_count;
    s.site_count = p.graph.sites.size();

    std::map<OutcomeId, std::size_t> layer_of;  // 0-based
    for (const auto& ins : p.instructions) {
        std::size_t layer = 0;
        for (OutcomeId d : ins.sign_deps.ids) layer = std::max(layer, layer_of.at(d) + 1);
        layer_of[ins.id] = layer;
        if (layer >= s.layers.size()) s.layers.resize(layer + 1);
        s.layers[layer].push_back(ins.id);
    }
    if (s.layers.empty()) return s;

    s.classical_steps.resize(s.layers.size());
    for (const auto& ins : p.instructions) {
        const std::size_t layer = layer_of.at(ins.id);
        if (layer > 0) s.classical_steps[layer - 1].parities.push_back(ins.sign_deps);
    }
    for (const auto& [site, e] : p.frame) {
        if (!e.x_deps.empty()) s.classical_steps.back().parities.push_back(e.x_deps);
        if (!e.z_deps.empty()) s.classical_steps.back().parities.push_back(e.z_deps);
    }
    return s;
}

// Machine-check a schedule against its pattern: every instruction in exactly
// one layer, dependencies strictly earlier, dep-free Mz readouts in layer 1.
inline void check_schedule(const MeasurementPattern& p, const Schedule& s) {
    std::map<OutcomeId, std::size_t> layer_of;
    for (std::size_t l = 0; l < s.layers.size(); ++l)
        for (OutcomeId id : s.layers[l])
            if (!layer_of.emplace(id, l).second)
                throw std::logic_error("check_schedule: instruction in two layers");
    if (layer_of.size() != p.instructions.size())
        throw std::logic_error("check_schedule: layer/instruction count mismatch");
    for (const auto& ins : p.instructions) {
        const auto it = layer_of.find(ins.id);
        if (it == layer_of.end())
            throw std::logic_error("check_schedule: instruction missing from layers");
        for (OutcomeId d : ins.sign_deps.ids)
            if (layer_of.at(d) >= it->second)
                throw std::logic_error("check_schedule: dependency not strictly earlier");
        if (ins.basis == MeasBasis::Mz && it->second != 0)
            throw std::logic_error("check_schedule: Mz readout outside the first layer");
    }
}

// Scheduler for circuits over {CX, Rx} or over {CX, Rz}. With this compiler's
// lowering every base-0 step stays dependency-free (CX fragments consume
// cross-wire byproducts as outcome relabelings, never as angle adaptations),
// so each rotation's angle-bearing step depends only on layer-1 outcomes and
// the greedy schedule needs at most two layers. All-CX circuits degenerate to
// a single layer.
inline Schedule schedule_two_layer(const Circuit& c) {
    bool saw_rx = false, saw_rz = false;
    for (const auto& g : c.gates) {
        if (g.kind == GateKind::CX) continue;
        if (g.kind == GateKind::RotX) saw_rx = true;
        else if (g.kind == GateKind::RotZ) saw_rz = true;
        else
            throw std::invalid_argument(
                "schedule_two_layer: gate outside {CX, Rx} / {CX, Rz}");
    }
    if (saw_rx && saw_rz)
        throw std::invalid_argument("schedule_two_layer: Rx and Rz cannot be mixed");
    Schedule s = schedule(compile(c), c.gates.size());
    if (s.layers.size() > 2)
        throw std::logic_error("schedule_two_layer: scheduling exceeded two layers");
    return s;
}

// Parallel-time summary of a schedule. classical_parity_depth is the depth of
// a balanced XOR tree over the largest parity set evaluated in any step.
struct DepthReport {
    std::size_t quantum_layers = 0;
    int classical_parity_depth = 0;
    std::size_t gate_count = 0;
    std::size_t site_count = 0;
};

inline DepthReport depth_report(const Schedule& s) {
    DepthReport r;
    r.quantum_layers = s.layers.size();
    r.gate_count = s.gate_count;
    r.site_count = s.site_count;
    for (const auto& step : s.classical_steps)
        for (const auto& ps : step.parities)
            if (!ps.empty())
                r.classical_parity_depth =
                    std::max(r.classical_parity_depth,
                             parity_depth(static_cast<int>(ps.ids.size())));
    return r;
}

// --- readout reinterpretation ------------------------------------------------------

// Corrected readout bits for output sites measured in the Z basis:
// bit_i = k_i xor (resolved X byproduct parity on output i). Z byproduct
// exponents never affect Z-basis readout statistics and are ignored.
inline std::vector<int> reinterpret_output(const OutcomeRecord& z_outcomes,
                                           const PauliFrame& frame,
                                           const OutcomeRecord& record,
                                           const std::vector<int>& output_sites) {
    std::vector<int> bits;
    bits.reserve(output_sites.size());
    for (int site : output_sites) {
        int b = z_outcomes.get(site) & 1;
        const auto it = frame.find(site);
        if (it != frame.end()) b ^= it->second.x_deps.resolve(record);
        bits.push_back(b);
    }
    return bits;
}

// Readout form of a pattern: every output site gets a dependency-free Mz
// whose outcome id is the site id itself; outputs and frame are cleared.
// Feed the ORIGINAL pattern's frame and outputs to reinterpret_output.
inline MeasurementPattern append_z_readout(const MeasurementPattern& p) {
    p.validate();
    std::set<OutcomeId> used;
    for (const auto& ins : p.instructions) used.insert(ins.id);
    MeasurementPattern r = p;
    for (int o : p.outputs) {
        if (used.count(o))
            throw std::invalid_argument("append_z_readout: output site id collides with an outcome id");
        r.instructions.push_back({o, MeasBasis::Mz, 0.0, {}, o});
    }
    r.outputs.clear();
    r.frame.clear();
    return r;
}

// --- corrected readout distributions -----------------------------------------------

inline std::vector<double> circuit_distribution(const Circuit& c, const QubitState& input) {
    const QubitState out = apply_circuit(c, input);
    std::vector<double> d(out.dim());
    for (std::size_t i = 0; i < out.dim(); ++i) d[i] = std::norm(out.amps[i]);
    return d;
}

inline double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("total_variation: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return 0.5 * s;
}

// Corrected Z-readout distribution by exhaustive branch enumeration: each
// branch's X byproduct becomes an index shift of its output |amplitude|^2.
inline std::vector<double> readout_distribution_via_frame(const MeasurementPattern& p,
                                                          const QubitState& input) {
    const std::size_t n_out = p.outputs.size();
    std::vector<double> dist(std::size_t{1} << n_out, 0.0);
    lazy_enumerate(p, input, [&](RunResult&& r) {
        std::size_t shift = 0;
        for (std::size_t i = 0; i < n_out; ++i) {
            const auto it = r.frame.find(p.outputs[i]);
            if (it != r.frame.end() && it->second.x_deps.resolve(r.outcomes))
                shift |= std::size_t{1} << (n_out - 1 - i);
        }
        for (std::size_t j = 0; j < r.output.dim(); ++j)
            dist[j ^ shift] += r.probability * std::norm(r.output.amps[j]);
    });
    return dist;
}

// The same distribution via the readout form: outputs are measured in the Z
// basis like everything else and each branch's bits are reinterpreted
// classically through the byproduct frame.
inline std::vector<double> readout_distribution_via_z(const MeasurementPattern& p,
                                                      const QubitState& input) {
    const MeasurementPattern rp = append_z_readout(p);
    const std::size_t n_out = p.outputs.size();
    std::vector<double> dist(std::size_t{1} << n_out, 0.0);
    lazy_enumerate(rp, input, [&](RunResult&& r) {
        const auto bits = reinterpret_output(r.outcomes, p.frame, r.outcomes, p.outputs);
        std::size_t idx = 0;
        for (int b : bits) idx = (idx << 1) | static_cast<std::size_t>(b & 1);
        dist[idx] += r.probability;
    });
    return dist;
}

namespace detail {

// <bra| rho |bra'> contraction of one qubit of an n_live-qubit density
// matrix, leaving n_live - 1 qubits.
inline ComplexMatrix dm_project_out(const ComplexMatrix& m, const std::vector<cplx>& bra,
                                    int q, int n_live) {
    const std::size_t half = std::size_t{1} << (n_live - 1);
    const int sb = n_live - 1 - q;  // state-bit position of qubit q
    const std::size_t low_mask = (std::size_t{1} << sb) - 1;
    auto full = [&](std::size_t r, std::size_t b) {
        return ((r & ~low_mask) << 1) | (b << sb) | (r & low_mask);
    };
    ComplexMatrix out(half, half);
    for (std::size_t r = 0; r < half; ++r)
        for (std::size_t c = 0; c < half; ++c) {
            cplx v{0.0, 0.0};
            for (int b = 0; b < 2; ++b)
                for (int b2 = 0; b2 < 2; ++b2)
                    v += std::conj(bra[b]) * m(full(r, b), full(c, b2)) * bra[b2];
            out(r, c) = v;
        }
    return out;
}

}  // namespace detail

// Corrected Z-readout distribution for non-adaptive patterns at polynomial
// cost in the branch count: evolves an ensemble of density matrices keyed by
// the classical X-correction mask accumulated so far. Measuring instruction i
// splits every member in two; outcome 1 toggles the mask bits of the outputs
// whose x_deps contain i. X byproducts thus never touch the quantum state
// (they commute to the classical side because nothing quantum follows them),
// and Z byproducts drop because they cannot change Z-basis statistics.
inline std::vector<double> readout_distribution_dep_free(const MeasurementPattern& p,
                                                         const QubitState& input) {
    p.validate();
    for (const auto& ins : p.instructions)
        if (!ins.sign_deps.empty())
            throw std::invalid_argument("readout_distribution_dep_free: pattern is adaptive");
    if (input.n != static_cast<int>(p.inputs.size()))
        throw std::invalid_argument("readout_distribution_dep_free: input width mismatch");
    if (std::abs(input.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("readout_distribution_dep_free: input must be normalized");

    const std::size_t n_out = p.outputs.size();
    std::map<OutcomeId, std::size_t> toggle;  // outcome id -> output-register mask
    for (std::size_t i = 0; i < n_out; ++i) {
        const auto it = p.frame.find(p.outputs[i]);
        if (it == p.frame.end()) continue;
        for (OutcomeId d : it->second.x_deps.ids)
            toggle[d] |= std::size_t{1} << (n_out - 1 - i);
    }

    std::vector<int> live = p.inputs;
    std::set<int> materialized(p.inputs.begin(), p.inputs.end());
    std::set<std::pair<int, int>> applied;
    std::map<std::size_t, ComplexMatrix> members;
    {
        ComplexMatrix rho(input.dim(), input.dim());
        for (std::size_t i = 0; i < input.dim(); ++i)
            for (std::size_t j = 0; j < input.dim(); ++j)
                rho(i, j) = input.amps[i] * std::conj(input.amps[j]);
        members.emplace(0, std::move(rho));
    }

    auto qubit_of = [&](int site) {
        const auto it = std::find(live.begin(), live.end(), site);
        if (it == live.end()) throw std::logic_error("readout_distribution_dep_free: site not live");
        return static_cast<int>(it - live.begin());
    };
    auto materialize = [&](int site) {
        if (!materialized.insert(site).second) return;
        ComplexMatrix plus(2, 2);
        plus(0, 0) = plus(0, 1) = plus(1, 0) = plus(1, 1) = cplx{0.5, 0.0};
        for (auto& [mask, m] : members) m = kron(m, plus);
        live.push_back(site);
    };
    auto ready = [&](int site) {
        materialize(site);
        for (const auto& e : p.graph.edges) {
            if (e.first != site && e.second != site) continue;
            if (applied.count(e)) continue;
            materialize(e.first == site ? e.second : e.first);
            const int n_live = static_cast<int>(live.size());
            const std::size_t ba = std::size_t{1} << (n_live - 1 - qubit_of(e.first));
            const std::size_t bb = std::size_t{1} << (n_live - 1 - qubit_of(e.second));
            const std::size_t dim = std::size_t{1} << n_live;
            for (auto& [mask, m] : members)
                for (std::size_t r = 0; r < dim; ++r)
                    for (std::size_t c = 0; c < dim; ++c) {
                        const bool fr = (r & ba) && (r & bb);
                        const bool fc = (c & ba) && (c & bb);
                        if (fr != fc) m(r, c) = -m(r, c);
                    }
            applied.insert(e);
        }
    };
    auto split = [&](int site, const std::vector<cplx>& bra0, const std::vector<cplx>& bra1,
                     std::size_t toggle_mask) {
        ready(site);
        const int q = qubit_of(site);
        const int n_live = static_cast<int>(live.size());
        std::map<std::size_t, ComplexMatrix> next;
        auto add = [&](std::size_t key, ComplexMatrix&& m) {
            const auto [it, fresh] = next.try_emplace(key, std::move(m));
            if (!fresh) it->second = it->second + m;
        };
        for (auto& [mask, m] : members) {
            add(mask, detail::dm_project_out(m, bra0, q, n_live));
            add(mask ^ toggle_mask, detail::dm_project_out(m, bra1, q, n_live));
        }
        members = std::move(next);
        live.erase(live.begin() + q);
    };

    for (const auto& ins : p.instructions) {
        const std::vector<cplx> bra0 =
            ins.basis == MeasBasis::M ? meas_ket(0, ins.angle) : z_ket(0);
        const std::vector<cplx> bra1 =
            ins.basis == MeasBasis::M ? meas_ket(1, ins.angle) : z_ket(1);
        const auto it = toggle.find(ins.id);
        split(ins.site, bra0, bra1, it == toggle.end() ? 0 : it->second);
    }
    for (std::size_t i = 0; i < n_out; ++i)
        split(p.outputs[i], z_ket(0), z_ket(1), std::size_t{1} << (n_out - 1 - i));

    std::vector<double> dist(std::size_t{1} << n_out, 0.0);
    for (const auto& [mask, m] : members) dist[mask] += m(0, 0).real();
    return dist;
}

// --- mid-circuit measurement removal -----------------------------------------------

// Mid-circuit single-qubit measurement: Mz reads the computational basis; M
// reads the basis {(|0> + (-1)^s e^{i theta} |1>)/sqrt2}. The measured qubit
// is left in the pointer state |s>, i.e. an M measurement acts as W(-theta)
// followed by a computational-basis collapse.
struct MidMeasure {
    int qubit = 0;
    MeasBasis basis = MeasBasis::M;
    double angle = 0.0;
    OutcomeId id = 0;
};

// X or Z on `qubit`, applied iff the outcome recorded under `control` is 1.
struct ClassicalGate {
    GateKind kind = GateKind::X;
    int qubit = 0;
    OutcomeId control = 0;
};

using MeasuredOp = std::variant<Gate, MidMeasure, ClassicalGate>;

struct MeasuredCircuit {
    int n = 0;
    std::vector<MeasuredOp> ops;

    void validate() const {
        if (n < 0) throw std::invalid_argument("MeasuredCircuit: negative qubit count");
        const auto in_range = [&](int q, const char* what) {
            if (q < 0 || q >= n)
                throw std::invalid_argument(std::string("MeasuredCircuit: ") + what +
                                            " out of range");
        };
        std::set<OutcomeId> declared;
        for (const auto& op : ops) {
            if (const auto* g = std::get_if<Gate>(&op)) {
                if (static_cast<int>(g->targets.size()) != gate_arity(g->kind))
                    throw std::invalid_argument("MeasuredCircuit: gate arity mismatch");
                for (int t : g->targets) in_range(t, "gate target");
                if (g->targets.size() == 2 && g->targets[0] == g->targets[1])
                    throw std::invalid_argument("MeasuredCircuit: duplicate targets");
            } else if (const auto* m = std::get_if<MidMeasure>(&op)) {
                in_range(m->qubit, "measured qubit");
                if (!declared.insert(m->id).second)
                    throw std::invalid_argument("MeasuredCircuit: duplicate measurement id");
            } else {
                const auto& cg = std::get<ClassicalGate>(op);
                if (cg.kind != GateKind::X && cg.kind != GateKind::Z)
                    throw std::invalid_argument(
                        "MeasuredCircuit: controlled corrections are X or Z only");
                in_range(cg.qubit, "controlled-gate target");
                if (!declared.count(cg.control))
                    throw std::invalid_argument(
                        "MeasuredCircuit: control references undeclared measurement");
            }
        }
    }
};

struct PurgeResult {
    Circuit circuit;                           // unitary, width n + #measurements
    std::vector<OutcomeId> measurement_order;  // ancilla j records measurement_order[j]
    std::map<OutcomeId, int> ancilla;          // measurement id -> ancilla qubit
};

// Rewrite mid-circuit measurements into unitary pointer dynamics: each
// measurement gets a fresh |0> ancilla; a rotated-basis measurement first
// maps its basis to the computational one (W(-theta)), then CX copies the
// bit onto the ancilla; classically controlled gates become CX/CZ from the
// ancilla. Reading the ancillas in the Z basis at the end reproduces the
// original joint outcome/output distribution exactly.
inline PurgeResult purge_measurements(const MeasuredCircuit& mc) {
    mc.validate();
    std::size_t n_meas = 0;
    for (const auto& op : mc.ops)
        if (std::holds_alternative<MidMeasure>(op)) ++n_meas;

    PurgeResult r;
    r.circuit.n = mc.n + static_cast<int>(n_meas);
    int next_ancilla = mc.n;
    for (const auto& op : mc.ops) {
        if (const auto* g = std::get_if<Gate>(&op)) {
            r.circuit.gates.push_back(*g);
        } else if (const auto* m = std::get_if<MidMeasure>(&op)) {
            if (m->basis == MeasBasis::M)
                r.circuit.gates.push_back(Gate::make(GateKind::W, {m->qubit}, -m->angle));
            r.circuit.gates.push_back(Gate::make(GateKind::CX, {m->qubit, next_ancilla}));
            r.ancilla[m->id] = next_ancilla;
            r.measurement_order.push_back(m->id);
            ++next_ancilla;
        } else {
            const auto& cg = std::get<ClassicalGate>(op);
            const auto it = r.ancilla.find(cg.control);
            if (it == r.ancilla.end())
                throw std::invalid_argument(
                    "purge_measurements: control references undeclared measurement");
            r.circuit.gates.push_back(Gate::make(
                cg.kind == GateKind::X ? GateKind::CX : GateKind::CZ, {it->second, cg.qubit}));
        }
    }
    r.circuit.validate();
    return r;
}

// Joint distribution over (packed mid-circuit outcomes, final basis index);
// packed bit j is the outcome of the j-th measurement in program order.
using JointKey = std::pair<std::uint64_t, std::size_t>;

inline std::map<JointKey, double> measured_circuit_distribution(const MeasuredCircuit& mc,
                                                                const QubitState& input) {
    mc.validate();
    if (input.n != mc.n)
        throw std::invalid_argument("measured_circuit_distribution: input width mismatch");

    std::map<OutcomeId, int> bit_of;
    for (const auto& op : mc.ops)
        if (const auto* m = std::get_if<MidMeasure>(&op))
            bit_of[m->id] = static_cast<int>(bit_of.size());

    std::map<JointKey, double> dist;
    std::function<void(QubitState, std::size_t, std::uint64_t)> walk =
        [&](QubitState state, std::size_t at, std::uint64_t packed) {
            if (at == mc.ops.size()) {
                for (std::size_t i = 0; i < state.dim(); ++i) {
                    const double pr = std::norm(state.amps[i]);
                    if (pr > 0.0) dist[{packed, i}] += pr;
                }
                return;
            }
            const auto& op = mc.ops[at];
            if (const auto* g = std::get_if<Gate>(&op)) {
                apply_unitary_inplace(state, matrix_of(*g), g->targets);
                walk(std::move(state), at + 1, packed);
            } else if (const auto* m = std::get_if<MidMeasure>(&op)) {
                if (m->basis == MeasBasis::M)
                    apply_unitary_inplace(state, w_gate(-m->angle), {m->qubit});
                for (int b = 0; b < 2; ++b) {
                    ComplexMatrix pb(2, 2);
                    pb(static_cast<std::size_t>(b), static_cast<std::size_t>(b)) = cplx{1.0, 0.0};
                    QubitState child = apply_linear_map(state, pb, {m->qubit});
                    if (child.norm2() > 1e-28)
                        walk(std::move(child), at + 1,
                             packed | (static_cast<std::uint64_t>(b) << bit_of.at(m->id)));
                }
            } else {
                const auto& cg = std::get<ClassicalGate>(op);
                if ((packed >> bit_of.at(cg.control)) & 1)
                    apply_unitary_inplace(
                        state, cg.kind == GateKind::X ? pauli_x() : pauli_z(), {cg.qubit});
                walk(std::move(state), at + 1, packed);
            }
        };
    walk(input, 0, 0);
    return dist;
}

// The same joint distribution read from a purged circuit: the original
// register is the high index bits and ancilla j's Z readout is packed bit j.
inline std::map<JointKey, double> purged_joint_distribution(const PurgeResult& pr,
                                                            const QubitState& input) {
    const int a = static_cast<int>(pr.measurement_order.size());
    if (pr.circuit.n != input.n + a)
        throw std::invalid_argument("purged_joint_distribution: input width mismatch");
    QubitState reg = input;
    for (int j = 0; j < a; ++j) reg = tensor(reg, QubitState(1));
    reg = apply_circuit(pr.circuit, reg);

    std::map<JointKey, double> dist;
    for (std::size_t idx = 0; idx < reg.dim(); ++idx) {
        const double prob = std::norm(reg.amps[idx]);
        if (prob <= 0.0) continue;
        std::uint64_t packed = 0;
        for (int j = 0; j < a; ++j) packed |= ((idx >> (a - 1 - j)) & 1ull) << j;
        dist[{packed, idx >> a}] += prob;
    }
    return dist;
}

inline double joint_total_variation(const std::map<JointKey, double>& x,
                                    const std::map<JointKey, double>& y) {
    double s = 0.0;
    for (const auto& [k, v] : x) {
        const auto it = y.find(k);
        s += std::abs(v - (it == y.end() ? 0.0 : it->second));
    }
    for (const auto& [k, v] : y)
        if (!x.count(k)) s += std::abs(v);
    return 0.5 * s;
}

}  // namespace mbqc
