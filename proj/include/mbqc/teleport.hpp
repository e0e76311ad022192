// teleport.hpp
//
// Teleportation-based gate execution over generic local dimension d:
// maximally entangled resources, operator-basis / POVM scheme validation,
// branch-exhaustive gate teleportation, and the three-bond two-qubit
// teleported-CZ construction with its 8-dimensional GHZ-type measurement.
//
// Bipartite vectors are stored system-1-major: amps[i*d + j] = <ij|phi>.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gates.hpp"
#include "linalg.hpp"
#include "pauli.hpp"
#include "random.hpp"
#include "state.hpp"

namespace mbqc {

using dvec = std::vector<cplx>;

inline double dvec_norm2(const dvec& v) {
    double s = 0.0;
    for (const auto& a : v) s += std::norm(a);
    return s;
}

inline dvec tensor_dvec(const dvec& a, const dvec& b) {
    dvec r(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i * b.size() + j] = a[i] * b[j];
    return r;
}

// Maximally entangled bipartite state of two d-dimensional systems.
struct MaxEntangled {
    int d = 0;
    dvec amps;                 // d*d entries
    bool schmidt_form = false; // true when built as (1/sqrt d) sum |i>|i>

    static MaxEntangled standard(int d) {
        MaxEntangled m;
        m.d = d;
        m.amps.assign(static_cast<std::size_t>(d) * d, cplx{0.0, 0.0});
        for (int i = 0; i < d; ++i) m.amps[static_cast<std::size_t>(i) * d + i] =
            1.0 / std::sqrt(static_cast<double>(d));
        m.schmidt_form = true;
        return m;
    }

    // All Schmidt coefficients equal 1/sqrt d, i.e. M M^dag = I/d for the
    // d x d amplitude matrix M[i][j] = amps[i*d+j].
    bool is_maximally_entangled(double tol = 1e-12) const {
        ComplexMatrix m(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m(i, j) = amps[static_cast<std::size_t>(i) * d + j];
        return (m * m.adjoint())
            .approx_equal(ComplexMatrix::identity(d) * cplx(1.0 / d), tol);
    }
};

// |phi(U)> = (U^dag (x) I) |phi>.
inline dvec phi_u(const ComplexMatrix& u, const MaxEntangled& res) {
    const int d = res.d;
    if (u.rows() != static_cast<std::size_t>(d) || u.cols() != u.rows())
        throw std::invalid_argument("phi_u: operator dimension mismatch");
    dvec out(res.amps.size(), cplx{0.0, 0.0});
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            cplx acc = 0.0;
            for (int k = 0; k < d; ++k)
                acc += std::conj(u(k, i)) * res.amps[static_cast<std::size_t>(k) * d + j];
            out[static_cast<std::size_t>(i) * d + j] = acc;
        }
    return out;
}

// Contract <phi| against systems 1,2 of a three-system vector
// total[(i*d + j)*d + k]; returns the remaining system-3 vector.
inline dvec project_first_two(const dvec& total, const dvec& phi, int d) {
    const std::size_t dd = static_cast<std::size_t>(d) * d;
    if (total.size() != dd * d || phi.size() != dd)
        throw std::invalid_argument("project_first_two: dimension mismatch");
    dvec out(d, cplx{0.0, 0.0});
    for (std::size_t ij = 0; ij < dd; ++ij) {
        const cplx c = std::conj(phi[ij]);
        if (c == cplx{0.0, 0.0}) continue;
        for (int k = 0; k < d; ++k) out[k] += c * total[ij * d + k];
    }
    return out;
}

// True iff ops is a unitary operator basis: exactly d*d unitaries with
// (1/d) Tr(U_i U_j^dag) = delta_ij.
inline bool validate_operator_basis(const std::vector<ComplexMatrix>& ops, int d,
                                    double tol = 1e-10) {
    if (ops.size() != static_cast<std::size_t>(d) * d)
        throw std::invalid_argument("validate_operator_basis: need exactly d^2 operators");
    for (const auto& u : ops) {
        if (u.rows() != static_cast<std::size_t>(d) || u.cols() != u.rows())
            throw std::invalid_argument("validate_operator_basis: operator dimension mismatch");
        if (!u.is_unitary(kUnitaryTol)) return false;
    }
    for (std::size_t i = 0; i < ops.size(); ++i)
        for (std::size_t j = 0; j < ops.size(); ++j) {
            const cplx t = (ops[i] * ops[j].adjoint()).trace() / static_cast<double>(d);
            const cplx want = (i == j) ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
            if (std::abs(t - want) > tol) return false;
        }
    return true;
}

struct TeleportScheme {
    int d = 0;
    MaxEntangled resource;
    std::vector<ComplexMatrix> ops;  // n >= d^2 unitaries
    std::vector<double> k;           // positive weights in the completeness sum

    void validate() const {
        if (d < 2) throw std::invalid_argument("TeleportScheme: d must be >= 2");
        if (resource.d != d) throw std::invalid_argument("TeleportScheme: resource dimension");
        if (ops.size() < static_cast<std::size_t>(d) * d)
            throw std::invalid_argument("TeleportScheme: need at least d^2 operators");
        if (k.size() != ops.size())
            throw std::invalid_argument("TeleportScheme: weight count mismatch");
        for (double w : k)
            if (w <= 0.0) throw std::invalid_argument("TeleportScheme: weights must be positive");
        for (const auto& u : ops)
            if (u.rows() != static_cast<std::size_t>(d) || !u.is_unitary(kUnitaryTol))
                throw std::invalid_argument("TeleportScheme: operators must be d x d unitaries");
    }
};

// Completeness: sum_i k_i |phi(U_i)><phi(U_i)| = I_{d^2} entrywise.
inline bool validate_povm(const TeleportScheme& s, double tol = 1e-10) {
    s.validate();
    const std::size_t dd = static_cast<std::size_t>(s.d) * s.d;
    ComplexMatrix acc(dd, dd);
    for (std::size_t i = 0; i < s.ops.size(); ++i) {
        const dvec phi = phi_u(s.ops[i], s.resource);
        for (std::size_t r = 0; r < dd; ++r)
            for (std::size_t c = 0; c < dd; ++c)
                acc(r, c) += s.k[i] * phi[r] * std::conj(phi[c]);
    }
    return acc.approx_equal(ComplexMatrix::identity(dd), tol);
}

// --- stock schemes -----------------------------------------------------------

// {I, X, Z, XZ} in outcome order 00, 01, 10, 11 of the entangled-basis labels.
inline std::vector<ComplexMatrix> pauli_ops_1q() {
    return {identity2(), pauli_x(), pauli_z(), pauli_x() * pauli_z()};
}

inline TeleportScheme bell_scheme() {
    TeleportScheme s;
    s.d = 2;
    s.resource = MaxEntangled::standard(2);
    s.ops = pauli_ops_1q();
    s.k.assign(4, 1.0);
    return s;
}

// {U_i * u} for a fixed 1-qubit u (rotated entangled basis).
inline TeleportScheme rotated_bell_scheme(const ComplexMatrix& u) {
    TeleportScheme s = bell_scheme();
    for (auto& op : s.ops) op = op * u;
    return s;
}

// Overcomplete d=2 example: plain plus rotated basis, each weighted 1/2.
inline TeleportScheme doubled_bell_scheme(const ComplexMatrix& u) {
    TeleportScheme s = bell_scheme();
    for (const auto& op : pauli_ops_1q()) s.ops.push_back(op * u);
    s.k.assign(8, 0.5);
    return s;
}

// d=4 scheme teleporting CZ: ops (P_i (x) P_j) CZ over the 16 Pauli pairs,
// index = 4*i + j with the 1-qubit order {I, X, Z, XZ}.
inline TeleportScheme cz4_scheme() {
    TeleportScheme s;
    s.d = 4;
    s.resource = MaxEntangled::standard(4);
    const auto ps = pauli_ops_1q();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) s.ops.push_back(kron(ps[i], ps[j]) * cz());
    s.k.assign(16, 1.0);
    return s;
}

// --- gate teleportation --------------------------------------------------------

struct TeleportBranch {
    int index = 0;                    // scheme operator index
    double probability = 0.0;         // k_i * |projection|^2
    dvec output;                      // renormalized system-3 state
    std::optional<PauliOp> residual;  // ops[i] * gate_u^dag, when it is a Pauli
};

inline std::vector<TeleportBranch> teleport_branches(const TeleportScheme& s,
                                                     const ComplexMatrix& gate_u,
                                                     const dvec& input) {
    s.validate();
    if (input.size() != static_cast<std::size_t>(s.d))
        throw std::invalid_argument("teleport_branches: input dimension != d");
    if (gate_u.rows() != static_cast<std::size_t>(s.d) || !gate_u.is_unitary(kUnitaryTol))
        throw std::invalid_argument("teleport_branches: gate must be a d x d unitary");

    const dvec total = tensor_dvec(input, s.resource.amps);
    std::vector<TeleportBranch> out;
    out.reserve(s.ops.size());
    for (std::size_t i = 0; i < s.ops.size(); ++i) {
        TeleportBranch b;
        b.index = static_cast<int>(i);
        dvec raw = project_first_two(total, phi_u(s.ops[i], s.resource), s.d);
        const double n2 = dvec_norm2(raw);
        b.probability = s.k[i] * n2;
        if (n2 > 1e-300) {
            const double inv = 1.0 / std::sqrt(n2);
            for (auto& a : raw) a *= inv;
        }
        b.output = std::move(raw);
        auto rec = recognize_pauli(s.ops[i] * gate_u.adjoint(), 1e-9);
        if (rec) b.residual = rec->first;
        out.push_back(std::move(b));
    }
    return out;
}

struct TeleportResult {
    int outcome = 0;
    dvec output;
    std::optional<PauliOp> residual;
};

inline TeleportResult teleport_gate(const TeleportScheme& s, const ComplexMatrix& gate_u,
                                    const dvec& input, std::uint64_t seed) {
    auto branches = teleport_branches(s, gate_u, input);
    std::vector<double> w;
    w.reserve(branches.size());
    for (const auto& b : branches) w.push_back(b.probability);
    Rng rng(seed);
    auto& picked = branches[rng.sample_discrete(w)];
    return {picked.index, std::move(picked.output), picked.residual};
}

// --- three-bond teleported CZ ---------------------------------------------------
//
// Eight wires: input state on wires 0,1; three cz|++> bonds pairing up wires
// 2..7; an 8-dimensional measurement on wire groups (0,2,4) and (1,3,5) in the
// basis {(|t> +- |t~>)/sqrt2 : t in {000,001,010,100}}; output on wires 6,7
// obeys output ~ (P_i (x) P_j) (H (x) H) CZ |input>.

inline std::vector<cplx> ghz_ket(int t_index, int sign) {
    static const int patterns[4] = {0b000, 0b001, 0b010, 0b100};
    if (t_index < 0 || t_index > 3) throw std::invalid_argument("ghz_ket: bad index");
    std::vector<cplx> v(8, cplx{0.0, 0.0});
    const double r = 1.0 / std::sqrt(2.0);
    v[patterns[t_index]] = r;
    v[patterns[t_index] ^ 0b111] = (sign & 1) ? -r : r;
    return v;
}

// Bond pairing for which the output law verifies, frozen from the search
// below (first hit in deterministic enumeration order): one bond joins the
// two measured groups, the other two feed the output wires.
inline std::vector<std::pair<int, int>> cz3_default_bonds() {
    return {{2, 3}, {4, 6}, {5, 7}};
}

struct Cz3Branch {
    int a = 0, b = 0;          // outcome indices, 0..7 each (t_index*2 + sign)
    double probability = 0.0;
    QubitState output;         // 2 qubits, renormalized
    PauliOp residual;          // P_i (x) P_j on the outputs
    bool law_holds = false;    // output matches residual * (H(x)H) CZ * input
};

inline QubitState cz3_prepare(const QubitState& input,
                              const std::vector<std::pair<int, int>>& bonds) {
    if (input.n != 2) throw std::invalid_argument("cz3_prepare: input must be 2 qubits");
    QubitState full = input;
    for (int i = 0; i < 6; ++i) full = tensor(full, plus_state());
    for (const auto& [p, q] : bonds) full = apply_unitary(full, cz(), {p, q});
    return full;
}

inline std::vector<Cz3Branch> cz3_branches(const QubitState& input,
                                           const std::vector<std::pair<int, int>>& bonds,
                                           double fid_tol = 1e-9) {
    const QubitState full = cz3_prepare(input, bonds);
    const auto ps = pauli_ops_1q();

    // Candidate corrected outputs (P_i (x) P_j)(H (x) H) CZ |input>.
    QubitState base = apply_unitary(input, cz(), {0, 1});
    base = apply_unitary(base, hadamard(), {0});
    base = apply_unitary(base, hadamard(), {1});
    std::vector<QubitState> candidates;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            QubitState c = apply_unitary(base, ps[j], {1});
            c = apply_unitary(c, ps[i], {0});
            candidates.push_back(std::move(c));
        }

    std::vector<Cz3Branch> out;
    for (int a = 0; a < 8; ++a) {
        const QubitState after_a = project(full, ghz_ket(a / 2, a % 2), {0, 2, 4});
        // Remaining original wires 1,3,5,6,7 are renumbered 0..4.
        for (int b = 0; b < 8; ++b) {
            Cz3Branch br;
            br.a = a;
            br.b = b;
            QubitState res = project(after_a, ghz_ket(b / 2, b % 2), {0, 1, 2});
            br.probability = res.norm2();
            if (br.probability <= 1e-15) {  // dead branch: law holds vacuously
                br.output = res;
                br.law_holds = true;
                br.residual = PauliOp::identity(2);
                out.push_back(std::move(br));
                continue;
            }
            res = res.normalized();
            br.output = res;
            for (int c = 0; c < 16 && !br.law_holds; ++c) {
                if (fidelity_up_to_phase(res, candidates[c]) >= 1.0 - fid_tol) {
                    br.law_holds = true;
                    PauliOp r = PauliOp::identity(2);
                    const int pi = c / 4, pj = c % 4;
                    if (pi == 1 || pi == 3) r.xmask |= 1;
                    if (pi == 2 || pi == 3) r.zmask |= 1;
                    if (pj == 1 || pj == 3) r.xmask |= 2;
                    if (pj == 2 || pj == 3) r.zmask |= 2;
                    br.residual = r;
                }
            }
            out.push_back(std::move(br));
        }
    }
    return out;
}

// Brute-force search over the 15 pairings of wires {2..7} into three bonds;
// returns the first pairing (in deterministic enumeration order) for which
// every branch obeys the output law on all probe inputs.
inline std::optional<std::vector<std::pair<int, int>>> cz3_search_bonds() {
    std::vector<std::vector<std::pair<int, int>>> pairings;
    const std::vector<int> wires = {2, 3, 4, 5, 6, 7};
    // First bond pairs wires[0] with one of the rest; recurse on the remainder.
    auto enumerate = [&](auto&& self, std::vector<int> rest,
                         std::vector<std::pair<int, int>> acc) -> void {
        if (rest.empty()) {
            pairings.push_back(acc);
            return;
        }
        const int first = rest[0];
        for (std::size_t i = 1; i < rest.size(); ++i) {
            std::vector<int> next;
            for (std::size_t j = 1; j < rest.size(); ++j)
                if (j != i) next.push_back(rest[j]);
            auto acc2 = acc;
            acc2.emplace_back(first, rest[i]);
            self(self, std::move(next), std::move(acc2));
        }
    };
    enumerate(enumerate, wires, {});

    Rng rng(20240817);
    std::vector<QubitState> probes = {QubitState::basis("00"), rng.random_state(2),
                                      rng.random_state(2)};
    for (const auto& bonds : pairings) {
        bool all_ok = true;
        for (const auto& probe : probes) {
            for (const auto& br : cz3_branches(probe, bonds)) {
                if (!br.law_holds) {
                    all_ok = false;
                    break;
                }
            }
            if (!all_ok) break;
        }
        if (all_ok) return bonds;
    }
    return std::nullopt;
}

struct Cz3Result {
    std::pair<int, int> outcomes;
    QubitState output;
    PauliOp residual;
};

inline Cz3Result teleport_cz3(const QubitState& input, std::uint64_t seed,
                              const std::vector<std::pair<int, int>>& bonds =
                                  cz3_default_bonds()) {
    auto branches = cz3_branches(input.normalized(), bonds);
    std::vector<double> w;
    w.reserve(branches.size());
    for (const auto& b : branches) w.push_back(b.probability);
    Rng rng(seed);
    auto& picked = branches[rng.sample_discrete(w)];
    return {{picked.a, picked.b}, std::move(picked.output), picked.residual};
}

}  // namespace mbqc
