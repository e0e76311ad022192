// pattern.hpp
//
// Cluster states, adaptive measurement patterns, their execution (reference
// full-cluster executor and a lazy just-in-time executor), the standard
// single-wire pattern library, pattern composition with byproduct-frame
// absorption, and Z-measurement site deletion.
//
// Execution semantics: prepare every non-input site as |+>, apply CZ on every
// edge, then measure sites in instruction order. M(theta) instructions project
// onto (|0> + (-1)^s e^{i theta_eff} |1>)/sqrt2 where theta_eff flips sign
// with the parity of sign_deps outcomes; Mz projects onto |s>. Output sites
// stay unmeasured; the output_frame records the symbolic byproduct
// X^{x_deps} Z^{z_deps} accumulated on them.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gates.hpp"
#include "pauli.hpp"
#include "random.hpp"
#include "state.hpp"

namespace mbqc {

enum class MeasBasis { Mz, M };

struct MeasurementInstruction {
    int site = 0;
    MeasBasis basis = MeasBasis::M;
    double angle = 0.0;       // base angle, M basis only
    ParitySet sign_deps;      // outcome parities flipping the angle sign
    OutcomeId id = 0;
};

struct ClusterGraph {
    std::vector<int> sites;                        // ordered, unique
    std::vector<std::pair<int, int>> edges;        // normalized (min, max)
    std::map<int, std::pair<int, int>> coords;     // optional grid placement

    bool has_site(int s) const {
        return std::find(sites.begin(), sites.end(), s) != sites.end();
    }

    void add_edge(int a, int b) {
        if (a == b) throw std::invalid_argument("ClusterGraph: self-loop");
        edges.emplace_back(std::min(a, b), std::max(a, b));
    }

    std::vector<int> neighbors(int s) const {
        std::vector<int> r;
        for (const auto& [a, b] : edges) {
            if (a == s) r.push_back(b);
            if (b == s) r.push_back(a);
        }
        return r;
    }

    void validate() const {
        std::set<int> seen(sites.begin(), sites.end());
        if (seen.size() != sites.size())
            throw std::invalid_argument("ClusterGraph: duplicate sites");
        std::set<std::pair<int, int>> es;
        for (const auto& [a, b] : edges) {
            if (a == b) throw std::invalid_argument("ClusterGraph: self-loop");
            if (!seen.count(a) || !seen.count(b))
                throw std::invalid_argument("ClusterGraph: edge references unknown site");
            if (!es.insert({std::min(a, b), std::max(a, b)}).second)
                throw std::invalid_argument("ClusterGraph: duplicate edge");
        }
        for (const auto& [s, xy] : coords)
            if (!seen.count(s))
                throw std::invalid_argument("ClusterGraph: coordinate for unknown site");
    }
};

struct MeasurementPattern {
    ClusterGraph graph;
    std::vector<int> inputs;    // ordered; carry the input state
    std::vector<int> outputs;   // ordered; never measured
    std::vector<MeasurementInstruction> instructions;
    PauliFrame frame;           // symbolic byproduct on output sites

    const MeasurementInstruction* instruction_at(int site) const {
        for (const auto& ins : instructions)
            if (ins.site == site) return &ins;
        return nullptr;
    }

    void validate(bool allow_unmeasured_sites = false) const {
        graph.validate();
        std::set<int> site_set(graph.sites.begin(), graph.sites.end());
        auto check_subset = [&](const std::vector<int>& v, const char* what) {
            std::set<int> s(v.begin(), v.end());
            if (s.size() != v.size())
                throw std::invalid_argument(std::string("pattern: duplicate ") + what);
            for (int x : v)
                if (!site_set.count(x))
                    throw std::invalid_argument(std::string("pattern: unknown ") + what);
        };
        check_subset(inputs, "input site");
        check_subset(outputs, "output site");

        std::set<int> output_set(outputs.begin(), outputs.end());
        std::set<int> measured;
        std::set<OutcomeId> ids;
        for (const auto& ins : instructions) {
            if (!site_set.count(ins.site))
                throw std::invalid_argument("pattern: instruction on unknown site");
            if (output_set.count(ins.site))
                throw std::invalid_argument("pattern: output site measured");
            if (!measured.insert(ins.site).second)
                throw std::invalid_argument("pattern: site measured twice");
            if (!ids.insert(ins.id).second)
                throw std::invalid_argument("pattern: duplicate outcome id");
            if (ins.basis == MeasBasis::Mz && !ins.sign_deps.empty())
                throw std::invalid_argument("pattern: Mz instructions are never adaptive");
        }
        // sign_deps reference strictly earlier instructions.
        std::set<OutcomeId> prior;
        for (const auto& ins : instructions) {
            for (OutcomeId d : ins.sign_deps.ids)
                if (!prior.count(d))
                    throw std::invalid_argument("pattern: sign_deps must reference earlier outcomes");
            prior.insert(ins.id);
        }
        if (!allow_unmeasured_sites) {
            for (int s : graph.sites)
                if (!measured.count(s) && !output_set.count(s))
                    throw std::invalid_argument("pattern: site neither measured nor output");
        }
        for (const auto& [site, e] : frame) {
            if (!output_set.count(site))
                throw std::invalid_argument("pattern: frame entry on non-output site");
            for (OutcomeId d : e.x_deps.ids)
                if (!ids.count(d)) throw std::invalid_argument("pattern: frame references unknown outcome");
            for (OutcomeId d : e.z_deps.ids)
                if (!ids.count(d)) throw std::invalid_argument("pattern: frame references unknown outcome");
        }
    }
};

// --- cluster construction ------------------------------------------------------

// Product-input cluster: every site |+> unless `inputs` provides a 1-qubit
// state; then CZ on every edge. Register order = graph.sites order.
inline QubitState build_cluster(const ClusterGraph& g,
                                const std::map<int, QubitState>& inputs = {}) {
    g.validate();
    for (const auto& [s, st] : inputs) {
        if (!g.has_site(s)) throw std::invalid_argument("build_cluster: unknown input site");
        if (st.n != 1) throw std::invalid_argument("build_cluster: inputs must be 1-qubit states");
    }
    QubitState reg(0);
    for (int s : g.sites) {
        auto it = inputs.find(s);
        reg = tensor(reg, it == inputs.end() ? plus_state() : it->second);
    }
    for (const auto& [a, b] : g.edges) {
        const int qa = static_cast<int>(std::find(g.sites.begin(), g.sites.end(), a) -
                                        g.sites.begin());
        const int qb = static_cast<int>(std::find(g.sites.begin(), g.sites.end(), b) -
                                        g.sites.begin());
        apply_unitary_inplace(reg, cz(), {qa, qb});
    }
    return reg;
}

// Cluster with an (arbitrarily entangled) input state over p.inputs.
inline QubitState cluster_with_input(const MeasurementPattern& p, const QubitState& input) {
    if (input.n != static_cast<int>(p.inputs.size()))
        throw std::invalid_argument("cluster_with_input: input width mismatch");
    // Register [inputs..., remaining sites...] then permute to graph order.
    std::set<int> input_set(p.inputs.begin(), p.inputs.end());
    std::vector<int> order = p.inputs;
    for (int s : p.graph.sites)
        if (!input_set.count(s)) order.push_back(s);

    QubitState reg = input;
    for (std::size_t i = p.inputs.size(); i < order.size(); ++i)
        reg = tensor(reg, plus_state());

    std::vector<int> perm(order.size());
    for (std::size_t q = 0; q < p.graph.sites.size(); ++q) {
        const int site = p.graph.sites[q];
        perm[q] = static_cast<int>(std::find(order.begin(), order.end(), site) - order.begin());
    }
    reg = permute_qubits(reg, perm);

    for (const auto& [a, b] : p.graph.edges) {
        const int qa = static_cast<int>(std::find(p.graph.sites.begin(), p.graph.sites.end(), a) -
                                        p.graph.sites.begin());
        const int qb = static_cast<int>(std::find(p.graph.sites.begin(), p.graph.sites.end(), b) -
                                        p.graph.sites.begin());
        apply_unitary_inplace(reg, cz(), {qa, qb});
    }
    return reg;
}

// --- execution -----------------------------------------------------------------

struct RunResult {
    OutcomeRecord outcomes;
    QubitState output;    // over p.outputs, in order; normalized when probability > 0
    PauliFrame frame;     // symbolic byproduct, never applied
    double probability = 0.0;
};

namespace detail {

inline double effective_angle(const MeasurementInstruction& ins, const OutcomeRecord& rec) {
    if (ins.basis == MeasBasis::Mz) return 0.0;
    return ins.sign_deps.resolve(rec) ? -ins.angle : ins.angle;
}

inline std::vector<cplx> measurement_bra(const MeasurementInstruction& ins, int outcome,
                                         const OutcomeRecord& rec) {
    return ins.basis == MeasBasis::M ? meas_ket(outcome, effective_angle(ins, rec))
                                     : z_ket(outcome);
}

// Reorder a register whose qubits correspond to `live_sites` into `wanted`.
inline QubitState reorder_to(const QubitState& s, const std::vector<int>& live_sites,
                             const std::vector<int>& wanted) {
    std::vector<int> perm(wanted.size());
    for (std::size_t q = 0; q < wanted.size(); ++q) {
        auto it = std::find(live_sites.begin(), live_sites.end(), wanted[q]);
        if (it == live_sites.end())
            throw std::logic_error("reorder_to: missing output site");
        perm[q] = static_cast<int>(it - live_sites.begin());
    }
    return permute_qubits(s, perm);
}

}  // namespace detail

// Reference executor: entangle everything, then measure in instruction order,
// forcing the given outcomes. Probability 0 branches are reported as such.
inline RunResult run_pattern_branch(const MeasurementPattern& p, const QubitState& input,
                                    const std::map<OutcomeId, int>& forced) {
    if (std::abs(input.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("run_pattern_branch: input must be normalized");
    QubitState reg = cluster_with_input(p, input);
    std::vector<int> live = p.graph.sites;

    RunResult r;
    r.frame = p.frame;
    for (const auto& ins : p.instructions) {
        auto it = forced.find(ins.id);
        if (it == forced.end())
            throw std::invalid_argument("run_pattern_branch: missing forced outcome");
        const int s = it->second & 1;
        const auto bra = detail::measurement_bra(ins, s, r.outcomes);
        const auto pos = std::find(live.begin(), live.end(), ins.site);
        if (pos == live.end())
            throw std::logic_error("run_pattern_branch: measured site not live");
        reg = project(reg, bra, {static_cast<int>(pos - live.begin())});
        live.erase(pos);
        r.outcomes.set(ins.id, s);
    }
    r.probability = reg.norm2();
    if (r.probability < 1e-28) {
        r.probability = 0.0;
        QubitState zero(static_cast<int>(p.outputs.size()));
        zero.amps.assign(zero.dim(), cplx{0.0, 0.0});
        zero.subnormalized = true;
        r.output = zero;
        return r;
    }
    r.output = detail::reorder_to(reg, live, p.outputs).normalized();
    return r;
}

inline RunResult run_pattern_sample(const MeasurementPattern& p, const QubitState& input,
                                    std::uint64_t seed) {
    if (std::abs(input.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("run_pattern_sample: input must be normalized");
    Rng rng(seed);
    QubitState reg = cluster_with_input(p, input);
    std::vector<int> live = p.graph.sites;

    RunResult r;
    r.frame = p.frame;
    r.probability = 1.0;
    for (const auto& ins : p.instructions) {
        const auto pos = std::find(live.begin(), live.end(), ins.site);
        const int qubit = static_cast<int>(pos - live.begin());
        QubitState b0 = project(reg, detail::measurement_bra(ins, 0, r.outcomes), {qubit});
        const double p0 = b0.norm2();
        const int s = (rng.uniform() < p0) ? 0 : 1;
        if (s == 0) {
            reg = std::move(b0);
            r.probability *= p0;
        } else {
            reg = project(reg, detail::measurement_bra(ins, 1, r.outcomes), {qubit});
            r.probability *= (1.0 - p0);
        }
        reg = reg.normalized();
        live.erase(pos);
        r.outcomes.set(ins.id, s);
    }
    r.output = detail::reorder_to(reg, live, p.outputs);
    r.output.subnormalized = false;
    return r;
}

// All 2^k outcome branches through the reference executor (small k only).
inline std::vector<RunResult> enumerate_branches(const MeasurementPattern& p,
                                                 const QubitState& input) {
    const std::size_t k = p.instructions.size();
    if (k > 20) throw std::invalid_argument("enumerate_branches: too many instructions");
    std::vector<RunResult> out;
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << k); ++b) {
        std::map<OutcomeId, int> forced;
        for (std::size_t j = 0; j < k; ++j)
            forced[p.instructions[j].id] = static_cast<int>((b >> j) & 1);
        out.push_back(run_pattern_branch(p, input, forced));
    }
    return out;
}

// --- lazy executor ---------------------------------------------------------------
//
// Materializes sites just in time: before measuring a site, create it and any
// not-yet-created neighbors (as |+>), apply only the edges incident to the
// measured site, then project. Deferred CZs commute past measurements of
// other sites, so this agrees with the reference executor branch by branch.

namespace detail {

struct LazyExec {
    const MeasurementPattern* p = nullptr;
    QubitState reg{0};
    std::vector<int> reg_sites;               // site label per register qubit
    std::set<int> materialized;
    std::set<std::pair<int, int>> applied;    // edges already applied
    OutcomeRecord outcomes;
    double probability = 1.0;

    static LazyExec start(const MeasurementPattern& pat, const QubitState& input) {
        if (input.n != static_cast<int>(pat.inputs.size()))
            throw std::invalid_argument("lazy executor: input width mismatch");
        LazyExec e;
        e.p = &pat;
        e.reg = input;
        e.reg_sites = pat.inputs;
        e.materialized.insert(pat.inputs.begin(), pat.inputs.end());
        return e;
    }

    int qubit_of(int site) const {
        auto it = std::find(reg_sites.begin(), reg_sites.end(), site);
        if (it == reg_sites.end()) throw std::logic_error("lazy executor: site not live");
        return static_cast<int>(it - reg_sites.begin());
    }

    void materialize(int site) {
        if (materialized.count(site)) return;
        reg = tensor(reg, plus_state());
        reg_sites.push_back(site);
        materialized.insert(site);
    }

    // Materialize `site` and its pending neighbors; apply its pending edges.
    void ready(int site) {
        materialize(site);
        for (const auto& e : p->graph.edges) {
            if (e.first != site && e.second != site) continue;
            if (applied.count(e)) continue;
            const int other = (e.first == site) ? e.second : e.first;
            materialize(other);
            apply_unitary_inplace(reg, cz(), {qubit_of(e.first), qubit_of(e.second)});
            applied.insert(e);
        }
    }

    // Returns the branch probability of the chosen outcome; renormalizes.
    double measure(const MeasurementInstruction& ins, int outcome) {
        ready(ins.site);
        const int q = qubit_of(ins.site);
        QubitState next = project(reg, measurement_bra(ins, outcome, outcomes), {q});
        const double pr = next.norm2() / reg.norm2();
        reg = std::move(next);
        if (pr > 1e-28) reg = reg.normalized();
        reg_sites.erase(reg_sites.begin() + q);
        outcomes.set(ins.id, outcome);
        probability *= pr;
        return pr;
    }

    RunResult finish() {
        for (int s : p->outputs) ready(s);
        RunResult r;
        r.outcomes = outcomes;
        r.frame = p->frame;
        r.probability = probability;
        r.output = reorder_to(reg, reg_sites, p->outputs);
        r.output.subnormalized = false;
        return r;
    }
};

}  // namespace detail

inline RunResult lazy_run_branch(const MeasurementPattern& p, const QubitState& input,
                                 const std::map<OutcomeId, int>& forced) {
    auto e = detail::LazyExec::start(p, input);
    for (const auto& ins : p.instructions) {
        auto it = forced.find(ins.id);
        if (it == forced.end())
            throw std::invalid_argument("lazy_run_branch: missing forced outcome");
        if (e.measure(ins, it->second & 1) <= 1e-28) {
            RunResult r;
            r.outcomes = e.outcomes;
            r.frame = p.frame;
            r.probability = 0.0;
            QubitState zero(static_cast<int>(p.outputs.size()));
            zero.amps.assign(zero.dim(), cplx{0.0, 0.0});
            zero.subnormalized = true;
            r.output = zero;
            return r;
        }
    }
    return e.finish();
}

inline RunResult lazy_run_sample(const MeasurementPattern& p, const QubitState& input,
                                 std::uint64_t seed) {
    Rng rng(seed);
    auto e = detail::LazyExec::start(p, input);
    for (const auto& ins : p.instructions) {
        e.ready(ins.site);
        const int q = e.qubit_of(ins.site);
        const double p0 =
            project(e.reg, detail::measurement_bra(ins, 0, e.outcomes), {q}).norm2() /
            e.reg.norm2();
        e.measure(ins, rng.uniform() < p0 ? 0 : 1);
    }
    return e.finish();
}

// Depth-first enumeration over all branches with shared prefixes. Branches of
// probability <= 1e-28 are pruned. Visit order: outcome 0 before outcome 1.
inline void lazy_enumerate(const MeasurementPattern& p, const QubitState& input,
                           const std::function<void(RunResult&&)>& visit) {
    std::function<void(detail::LazyExec&, std::size_t)> rec =
        [&](detail::LazyExec& e, std::size_t idx) {
            if (idx == p.instructions.size()) {
                auto leaf = e;
                visit(leaf.finish());
                return;
            }
            const auto& ins = p.instructions[idx];
            for (int s : {0, 1}) {
                auto child = e;
                if (child.measure(ins, s) > 1e-28) rec(child, idx + 1);
            }
        };
    auto root = detail::LazyExec::start(p, input);
    rec(root, 0);
}

// --- pattern library --------------------------------------------------------------

// Two-site chain, one M(theta) measurement: realizes X^{s1} W(-theta).
inline MeasurementPattern pattern_single_step(double theta) {
    MeasurementPattern p;
    p.graph.sites = {1, 2};
    p.graph.add_edge(1, 2);
    p.inputs = {1};
    p.outputs = {2};
    p.instructions = {{1, MeasBasis::M, theta, {}, 1}};
    p.frame[2].x_deps = ParitySet::of({1});
    return p;
}

// Three-site chain, two X measurements: identity wire with frame Z^{s1} X^{s2}.
inline MeasurementPattern pattern_wire() {
    MeasurementPattern p;
    p.graph.sites = {1, 2, 3};
    p.graph.add_edge(1, 2);
    p.graph.add_edge(2, 3);
    p.inputs = {1};
    p.outputs = {3};
    p.instructions = {{1, MeasBasis::M, 0.0, {}, 1}, {2, MeasBasis::M, 0.0, {}, 2}};
    p.frame[3].z_deps = ParitySet::of({1});
    p.frame[3].x_deps = ParitySet::of({2});
    return p;
}

// Five-site chain realizing u = rx(zeta) rz(eta) rx(xi) with frame
// X^{s2+s4} Z^{s1+s3}; derived from four chained W-form steps.
inline MeasurementPattern pattern_euler(const EulerAngles& a) {
    MeasurementPattern p;
    p.graph.sites = {1, 2, 3, 4, 5};
    for (int i = 1; i < 5; ++i) p.graph.add_edge(i, i + 1);
    p.inputs = {1};
    p.outputs = {5};
    p.instructions = {
        {1, MeasBasis::M, 0.0, {}, 1},
        {2, MeasBasis::M, -2.0 * a.xi, ParitySet::of({1}), 2},
        {3, MeasBasis::M, -2.0 * a.eta, ParitySet::of({2}), 3},
        {4, MeasBasis::M, -2.0 * a.zeta, ParitySet::of({1, 3}), 4},
    };
    p.frame[5].x_deps = ParitySet::of({2, 4});
    p.frame[5].z_deps = ParitySet::of({1, 3});
    return p;
}

// Three-site chain realizing rx(theta) with frame X^{s2} Z^{s1}; the second
// measurement adapts its angle sign to s1.
inline MeasurementPattern pattern_rx(double theta) {
    MeasurementPattern p;
    p.graph.sites = {1, 2, 3};
    p.graph.add_edge(1, 2);
    p.graph.add_edge(2, 3);
    p.inputs = {1};
    p.outputs = {3};
    p.instructions = {{1, MeasBasis::M, 0.0, {}, 1},
                      {2, MeasBasis::M, -2.0 * theta, ParitySet::of({1}), 2}};
    p.frame[3].x_deps = ParitySet::of({2});
    p.frame[3].z_deps = ParitySet::of({1});
    return p;
}

// Minimal two-wire CZ: the bare entangling edge, no measurements, empty frame.
inline MeasurementPattern pattern_cz() {
    MeasurementPattern p;
    p.graph.sites = {1, 2};
    p.graph.add_edge(1, 2);
    p.inputs = {1, 2};
    p.outputs = {1, 2};
    return p;
}

// Grid-embedded CZ: each wire runs in-a-out as an identity wire, with the
// entangling rung between the two input sites. Realizes (P1 (x) P2) CZ with
// frame Z^{s1} X^{s3} on the first output and Z^{s2} X^{s4} on the second.
inline MeasurementPattern pattern_cz_grid() {
    MeasurementPattern p;
    p.graph.sites = {1, 2, 3, 4, 5, 6};
    p.graph.add_edge(1, 3);
    p.graph.add_edge(3, 5);
    p.graph.add_edge(2, 4);
    p.graph.add_edge(4, 6);
    p.graph.add_edge(1, 2);  // entangling rung
    p.graph.coords = {{1, {0, 0}}, {3, {0, 1}}, {5, {0, 2}},
                      {2, {1, 0}}, {4, {1, 1}}, {6, {1, 2}}};
    p.inputs = {1, 2};
    p.outputs = {5, 6};
    p.instructions = {{1, MeasBasis::M, 0.0, {}, 1},
                      {2, MeasBasis::M, 0.0, {}, 2},
                      {3, MeasBasis::M, 0.0, {}, 3},
                      {4, MeasBasis::M, 0.0, {}, 4}};
    p.frame[5].z_deps = ParitySet::of({1});
    p.frame[5].x_deps = ParitySet::of({3});
    p.frame[6].z_deps = ParitySet::of({2});
    p.frame[6].x_deps = ParitySet::of({4});
    return p;
}

// Single site that is both input and output; composition glue.
inline MeasurementPattern pattern_identity_wire(int site = 1) {
    MeasurementPattern p;
    p.graph.sites = {site};
    p.inputs = {site};
    p.outputs = {site};
    return p;
}

// --- composition --------------------------------------------------------------

// How an angle's sign flip interacts with the measurement basis family:
// at 0 or pi the flip is vacuous; at +-pi/2 it relabels the outcome;
// otherwise it is a genuine adaptation.
enum class AngleFlipClass { Vacuous, Relabel, Generic };

inline AngleFlipClass angle_flip_class(double base, double tol = 1e-9) {
    double r = std::fmod(base, 2.0 * kPi);
    if (r < 0) r += 2.0 * kPi;
    auto near = [&](double x) { return std::abs(r - x) <= tol; };
    if (near(0.0) || near(kPi) || near(2.0 * kPi)) return AngleFlipClass::Vacuous;
    if (near(kPi / 2.0) || near(3.0 * kPi / 2.0)) return AngleFlipClass::Relabel;
    return AngleFlipClass::Generic;
}

namespace detail {

inline void substitute_flips(ParitySet& set, const std::map<OutcomeId, ParitySet>& flips) {
    for (const auto& [id, add] : flips)
        if (set.contains(id)) set.merge(add);
}

}  // namespace detail

// Sequential composition: run p1, feed its outputs into p2's inputs per
// `wiring` (a bijection p1 output site -> p2 input site). All entangling
// edges of the merged pattern precede any measurement; p1's symbolic output
// frame is absorbed into p2's instructions: angle-sign flips where the
// measurement family needs them, outcome relabelings where a flip is
// equivalent to one, and frame pass-through on p2's outputs.
inline MeasurementPattern compose(const MeasurementPattern& p1, const MeasurementPattern& p2,
                                  const std::map<int, int>& wiring) {
    p1.validate();
    p2.validate();

    // wiring must be a bijection from p1.outputs onto p2.inputs.
    if (wiring.size() != p1.outputs.size() || wiring.size() != p2.inputs.size())
        throw std::invalid_argument("compose: wiring must cover all outputs and inputs");
    {
        std::set<int> vals;
        for (const auto& [from, to] : wiring) {
            if (std::find(p1.outputs.begin(), p1.outputs.end(), from) == p1.outputs.end())
                throw std::invalid_argument("compose: wiring key is not a p1 output");
            if (std::find(p2.inputs.begin(), p2.inputs.end(), to) == p2.inputs.end())
                throw std::invalid_argument("compose: wiring value is not a p2 input");
            if (!vals.insert(to).second)
                throw std::invalid_argument("compose: wiring is not injective");
        }
    }

    // Fresh labels for p2's non-input sites and all of p2's outcome ids.
    int fresh = 0;
    for (int s : p1.graph.sites) fresh = std::max(fresh, s);
    for (const auto& ins : p1.instructions) fresh = std::max(fresh, ins.id);
    for (int s : p2.graph.sites) fresh = std::max(fresh, s);
    for (const auto& ins : p2.instructions) fresh = std::max(fresh, ins.id);
    ++fresh;

    std::map<int, int> site_map;  // p2 site -> merged site
    for (const auto& [from, to] : wiring) site_map[to] = from;
    for (int s : p2.graph.sites)
        if (!site_map.count(s)) site_map[s] = fresh++;

    std::map<OutcomeId, OutcomeId> id_map;
    for (const auto& ins : p2.instructions) id_map[ins.id] = fresh++;

    auto map_set = [&](const ParitySet& s) {
        ParitySet r;
        for (OutcomeId id : s.ids) r.toggle(id_map.at(id));
        return r;
    };

    // Renamed p2 pieces.
    std::vector<std::pair<int, int>> p2_edges;
    for (const auto& [a, b] : p2.graph.edges) {
        const int ma = site_map.at(a), mb = site_map.at(b);
        p2_edges.emplace_back(std::min(ma, mb), std::max(ma, mb));
    }
    std::vector<MeasurementInstruction> p2_ins;
    for (const auto& ins : p2.instructions)
        p2_ins.push_back({site_map.at(ins.site), ins.basis, ins.angle,
                          map_set(ins.sign_deps), id_map.at(ins.id)});
    PauliFrame p2_frame;
    for (const auto& [site, e] : p2.frame) {
        p2_frame[site_map.at(site)].x_deps = map_set(e.x_deps);
        p2_frame[site_map.at(site)].z_deps = map_set(e.z_deps);
    }
    std::vector<int> p2_outputs;
    for (int s : p2.outputs) p2_outputs.push_back(site_map.at(s));

    // Absorb p1's output frame.
    // Phase 1: X parts push a Z onto every p2-edge neighbor (the byproduct
    // commutes across the fresh entangling edges).
    std::map<int, FrameEntry> pending;
    for (const auto& [site, e] : p1.frame) pending[site] = e;
    {
        const auto snapshot = pending;
        for (const auto& [site, e] : snapshot) {
            if (e.x_deps.empty()) continue;
            for (const auto& [a, b] : p2_edges) {
                if (a != site && b != site) continue;
                pending[a == site ? b : a].z_deps.merge(e.x_deps);
            }
        }
    }

    // Phase 2: resolve pending parts at each site.
    std::map<OutcomeId, ParitySet> flips;  // recorded outcome -> relabel parity
    PauliFrame passthrough;
    for (auto& [site, e] : pending) {
        if (e.empty()) continue;
        MeasurementInstruction* ins = nullptr;
        for (auto& cand : p2_ins)
            if (cand.site == site) ins = &cand;
        if (ins) {
            if (ins->basis == MeasBasis::M) {
                if (!e.x_deps.empty()) {
                    switch (angle_flip_class(ins->angle)) {
                        case AngleFlipClass::Vacuous:
                            break;  // flip changes nothing at 0 / pi
                        case AngleFlipClass::Relabel:
                            flips[ins->id].merge(e.x_deps);
                            break;
                        case AngleFlipClass::Generic:
                            ins->sign_deps.merge(e.x_deps);
                            break;
                    }
                }
                if (!e.z_deps.empty()) flips[ins->id].merge(e.z_deps);
            } else {  // Mz: X flips the recorded bit, Z is phase-only
                if (!e.x_deps.empty()) flips[ins->id].merge(e.x_deps);
            }
        } else {
            // Unmeasured by p2: must be a p2 output; frame passes through.
            if (std::find(p2_outputs.begin(), p2_outputs.end(), site) == p2_outputs.end())
                throw std::logic_error("compose: pending frame on unknown site");
            passthrough[site].x_deps.merge(e.x_deps);
            passthrough[site].z_deps.merge(e.z_deps);
        }
    }

    // Phase 3: relabeled outcomes used downstream get the flip parities added.
    if (!flips.empty()) {
        for (auto& ins : p2_ins) detail::substitute_flips(ins.sign_deps, flips);
        for (auto& [site, e] : p2_frame) {
            detail::substitute_flips(e.x_deps, flips);
            detail::substitute_flips(e.z_deps, flips);
        }
    }

    // Assemble.
    MeasurementPattern m;
    m.graph.sites = p1.graph.sites;
    for (int s : p2.graph.sites)
        if (!wiring.count(site_map.at(s)) &&
            std::find(m.graph.sites.begin(), m.graph.sites.end(), site_map.at(s)) ==
                m.graph.sites.end())
            m.graph.sites.push_back(site_map.at(s));
    // Edge toggle: a doubled edge cancels (CZ is an involution).
    std::set<std::pair<int, int>> edge_set(p1.graph.edges.begin(), p1.graph.edges.end());
    for (const auto& e : p2_edges) {
        if (edge_set.count(e))
            edge_set.erase(e);
        else
            edge_set.insert(e);
    }
    m.graph.edges.assign(edge_set.begin(), edge_set.end());
    m.graph.coords = p1.graph.coords;
    for (const auto& [s, xy] : p2.graph.coords) m.graph.coords[site_map.at(s)] = xy;

    m.inputs = p1.inputs;
    m.outputs = p2_outputs;
    m.instructions = p1.instructions;
    for (auto& ins : p2_ins) m.instructions.push_back(std::move(ins));
    m.frame = p2_frame;
    for (const auto& [site, e] : passthrough) {
        m.frame[site].x_deps.merge(e.x_deps);
        m.frame[site].z_deps.merge(e.z_deps);
    }
    return m;
}

// Disjoint (parallel) union; site and outcome label sets must not collide.
inline MeasurementPattern tensor_patterns(const MeasurementPattern& a,
                                          const MeasurementPattern& b) {
    std::set<int> a_sites(a.graph.sites.begin(), a.graph.sites.end());
    for (int s : b.graph.sites)
        if (a_sites.count(s))
            throw std::invalid_argument("tensor_patterns: site label collision");
    std::set<OutcomeId> a_ids;
    for (const auto& ins : a.instructions) a_ids.insert(ins.id);
    for (const auto& ins : b.instructions)
        if (a_ids.count(ins.id))
            throw std::invalid_argument("tensor_patterns: outcome id collision");

    MeasurementPattern m = a;
    m.graph.sites.insert(m.graph.sites.end(), b.graph.sites.begin(), b.graph.sites.end());
    m.graph.edges.insert(m.graph.edges.end(), b.graph.edges.begin(), b.graph.edges.end());
    for (const auto& [s, xy] : b.graph.coords) m.graph.coords[s] = xy;
    m.inputs.insert(m.inputs.end(), b.inputs.begin(), b.inputs.end());
    m.outputs.insert(m.outputs.end(), b.outputs.begin(), b.outputs.end());
    m.instructions.insert(m.instructions.end(), b.instructions.begin(), b.instructions.end());
    for (const auto& [site, e] : b.frame) m.frame[site] = e;
    return m;
}

// --- Z-measurement site deletion -------------------------------------------------

// Logically removes an unmeasured, non-input, non-output site by prepending a
// non-adaptive Mz measurement there. The leftover Z^{k_A} on each neighbor is
// absorbed: outcome relabeling for M-measured neighbors (all downstream
// references pick up k_A), a frame Z-dependency for output neighbors, and
// nothing for Mz-measured neighbors (phase only).
inline MeasurementPattern delete_site_z(const MeasurementPattern& p, int site) {
    if (!p.graph.has_site(site))
        throw std::invalid_argument("delete_site_z: unknown site");
    if (std::find(p.inputs.begin(), p.inputs.end(), site) != p.inputs.end())
        throw std::invalid_argument("delete_site_z: site is an input");
    if (std::find(p.outputs.begin(), p.outputs.end(), site) != p.outputs.end())
        throw std::invalid_argument("delete_site_z: site is an output");
    if (p.instruction_at(site))
        throw std::invalid_argument("delete_site_z: site is already measured");

    MeasurementPattern r = p;
    int fresh = 0;
    for (int s : p.graph.sites) fresh = std::max(fresh, s);
    for (const auto& ins : p.instructions) fresh = std::max(fresh, ins.id);
    const OutcomeId ka = ++fresh;

    r.instructions.insert(r.instructions.begin(),
                          MeasurementInstruction{site, MeasBasis::Mz, 0.0, {}, ka});

    for (int nbr : p.graph.neighbors(site)) {
        const MeasurementInstruction* ins = p.instruction_at(nbr);
        if (ins && ins->basis == MeasBasis::M) {
            // Z flips the recorded outcome; rewrite downstream references.
            for (auto& later : r.instructions)
                if (later.sign_deps.contains(ins->id)) later.sign_deps.toggle(ka);
            for (auto& [fs, e] : r.frame) {
                if (e.x_deps.contains(ins->id)) e.x_deps.toggle(ka);
                if (e.z_deps.contains(ins->id)) e.z_deps.toggle(ka);
            }
        } else if (!ins &&
                   std::find(p.outputs.begin(), p.outputs.end(), nbr) != p.outputs.end()) {
            r.frame[nbr].z_deps.toggle(ka);
        }
        // Mz-measured neighbors: the Z byproduct only contributes a phase.
        // Unmeasured non-output neighbors must themselves be deleted later,
        // where the pending Z is likewise phase-only.
    }
    return r;
}

}  // namespace mbqc
