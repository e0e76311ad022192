// pauli.hpp
//
// Pauli group arithmetic, symbolic outcome-dependent byproduct frames, the
// gate/Pauli propagation table, and numeric Clifford verification.
//
// Canonical form: i^phase_pow * prod_q X_q^{x_q} Z_q^{z_q} (X left of Z on
// each qubit). Mask bit q corresponds to qubit q. The sign convention is
// fixed by Z X = i Y, i.e. Y = i X Z.

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gates.hpp"
#include "linalg.hpp"
#include "state.hpp"

namespace mbqc {

using OutcomeId = int;

// Measurement outcome bits, each id assignable exactly once.
struct OutcomeRecord {
    std::map<OutcomeId, int> bits;

    void set(OutcomeId id, int b) {
        if (bits.count(id)) throw std::logic_error("OutcomeRecord: id assigned twice");
        bits[id] = b & 1;
    }
    bool has(OutcomeId id) const { return bits.count(id) != 0; }
    int get(OutcomeId id) const {
        auto it = bits.find(id);
        if (it == bits.end()) throw std::out_of_range("OutcomeRecord: unresolved outcome id");
        return it->second;
    }
};

// XOR-set of outcome ids: resolves to the parity of the referenced bits.
struct ParitySet {
    std::vector<OutcomeId> ids;  // sorted, unique

    static ParitySet of(std::vector<OutcomeId> v) {
        ParitySet s;
        for (OutcomeId id : v) s.toggle(id);
        return s;
    }

    void toggle(OutcomeId id) {
        auto it = std::lower_bound(ids.begin(), ids.end(), id);
        if (it != ids.end() && *it == id)
            ids.erase(it);
        else
            ids.insert(it, id);
    }

    void merge(const ParitySet& o) {
        for (OutcomeId id : o.ids) toggle(id);
    }

    bool empty() const { return ids.empty(); }
    bool contains(OutcomeId id) const {
        return std::binary_search(ids.begin(), ids.end(), id);
    }

    int resolve(const OutcomeRecord& r) const {
        int p = 0;
        for (OutcomeId id : ids) p ^= r.get(id);
        return p;
    }

    bool operator==(const ParitySet& o) const { return ids == o.ids; }
};

struct PauliOp {
    int n = 0;
    int phase_pow = 0;  // i^phase_pow, mod 4
    std::uint64_t xmask = 0;
    std::uint64_t zmask = 0;

    static PauliOp identity(int n_qubits) { return {n_qubits, 0, 0, 0}; }
    static PauliOp single(int n_qubits, int qubit, bool x, bool z, int phase = 0) {
        PauliOp p{n_qubits, phase & 3, 0, 0};
        if (x) p.xmask |= (std::uint64_t{1} << qubit);
        if (z) p.zmask |= (std::uint64_t{1} << qubit);
        return p;
    }

    bool is_identity() const { return xmask == 0 && zmask == 0 && phase_pow == 0; }
    bool is_identity_up_to_phase() const { return xmask == 0 && zmask == 0; }

    bool operator==(const PauliOp& o) const {
        return n == o.n && phase_pow == o.phase_pow && xmask == o.xmask && zmask == o.zmask;
    }
};

// Group product. Phase bookkeeping: moving q's X block left across p's Z
// block contributes (-1) per overlapping qubit.
inline PauliOp pauli_mul(const PauliOp& p, const PauliOp& q) {
    if (p.n != q.n) throw std::invalid_argument("pauli_mul: size mismatch");
    PauliOp r;
    r.n = p.n;
    r.phase_pow = (p.phase_pow + q.phase_pow +
                   2 * std::popcount(p.zmask & q.xmask)) & 3;
    r.xmask = p.xmask ^ q.xmask;
    r.zmask = p.zmask ^ q.zmask;
    return r;
}

inline cplx phase_value(int phase_pow) {
    switch (phase_pow & 3) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

namespace detail {

// Qubit-indexed mask -> state-bit mask (qubit 0 = most significant bit).
inline std::uint64_t to_state_mask(std::uint64_t qmask, int n) {
    std::uint64_t m = 0;
    for (int q = 0; q < n; ++q)
        if ((qmask >> q) & 1) m |= (std::uint64_t{1} << (n - 1 - q));
    return m;
}

}  // namespace detail

inline ComplexMatrix pauli_matrix(const PauliOp& p) {
    const std::size_t dim = std::size_t{1} << p.n;
    const std::uint64_t xs = detail::to_state_mask(p.xmask, p.n);
    const std::uint64_t zs = detail::to_state_mask(p.zmask, p.n);
    const cplx ph = phase_value(p.phase_pow);
    ComplexMatrix m(dim, dim);
    for (std::uint64_t c = 0; c < dim; ++c)
        m(c ^ xs, c) = ph * ((std::popcount(zs & c) & 1) ? -1.0 : 1.0);
    return m;
}

inline QubitState pauli_apply(const PauliOp& p, const QubitState& s) {
    if (p.n != s.n) throw std::invalid_argument("pauli_apply: size mismatch");
    const std::uint64_t xs = detail::to_state_mask(p.xmask, p.n);
    const std::uint64_t zs = detail::to_state_mask(p.zmask, p.n);
    const cplx ph = phase_value(p.phase_pow);
    QubitState r = s;
    for (std::uint64_t c = 0; c < s.dim(); ++c)
        r.amps[c ^ xs] = ph * ((std::popcount(zs & c) & 1) ? -1.0 : 1.0) * s.amps[c];
    return r;
}

// Recognize m = phase * X^x Z^z; returns the mask pair and the complex phase.
// Any unit-magnitude phase is accepted; callers needing i^k check separately.
inline std::optional<std::pair<PauliOp, cplx>> recognize_pauli(const ComplexMatrix& m,
                                                               double tol = 1e-9) {
    if (m.rows() != m.cols() || m.rows() == 0) return std::nullopt;
    int n = 0;
    while ((std::size_t{1} << n) < m.rows()) ++n;
    if ((std::size_t{1} << n) != m.rows()) return std::nullopt;
    const std::size_t dim = m.rows();

    // Column 0 determines the X part and the phase.
    std::size_t xs = dim;  // sentinel
    for (std::size_t r = 0; r < dim; ++r) {
        if (std::abs(m(r, 0)) > 0.5) {
            if (xs != dim) return std::nullopt;
            xs = r;
        }
    }
    if (xs == dim) return std::nullopt;
    const cplx phase = m(xs, 0);
    if (std::abs(std::abs(phase) - 1.0) > tol) return std::nullopt;

    // Z bits from the sign pattern on single-bit columns.
    std::uint64_t zs = 0;
    for (int b = 0; b < n; ++b) {
        const std::size_t c = std::size_t{1} << b;
        const cplx v = m(c ^ xs, c) / phase;
        if (std::abs(v - 1.0) <= tol) continue;
        if (std::abs(v + 1.0) <= tol) {
            zs |= c;
            continue;
        }
        return std::nullopt;
    }

    // Full verification of every entry.
    for (std::size_t c = 0; c < dim; ++c)
        for (std::size_t r = 0; r < dim; ++r) {
            const cplx want = (r == (c ^ xs))
                                  ? phase * ((std::popcount(zs & c) & 1) ? -1.0 : 1.0)
                                  : cplx{0.0, 0.0};
            if (std::abs(m(r, c) - want) > tol) return std::nullopt;
        }

    PauliOp p;
    p.n = n;
    p.phase_pow = 0;
    // State-bit masks back to qubit-indexed masks.
    for (int q = 0; q < n; ++q) {
        const std::uint64_t bit = std::uint64_t{1} << (n - 1 - q);
        if (xs & bit) p.xmask |= (std::uint64_t{1} << q);
        if (zs & bit) p.zmask |= (std::uint64_t{1} << q);
    }
    return std::make_pair(p, phase);
}

// --- propagation table -----------------------------------------------------
//
// propagate(g, p) returns (p', g') with matrix_of(g) * p = p' * matrix_of(g').
// Clifford kinds (X, Y, Z, H, S, CZ, CX) return g' = g and an exact identity
// including phase. Parametrized kinds (Phase, RotX, RotZ, W) may flip the
// angle sign and hold only up to a global phase.

inline std::pair<PauliOp, Gate> propagate(const Gate& g, const PauliOp& p) {
    const int arity = gate_arity(g.kind);
    if (p.n != arity)
        throw std::invalid_argument("propagate: Pauli support must match gate arity");

    PauliOp out = PauliOp::identity(arity);
    out.phase_pow = p.phase_pow;
    Gate g2 = g;

    const bool x0 = (p.xmask >> 0) & 1, z0 = (p.zmask >> 0) & 1;
    const bool x1 = arity == 2 && ((p.xmask >> 1) & 1);
    const bool z1 = arity == 2 && ((p.zmask >> 1) & 1);

    auto emit = [&](const PauliOp& f) { out = pauli_mul(out, f); };
    auto X = [&](int q) { return PauliOp::single(arity, q, true, false); };
    auto Z = [&](int q) { return PauliOp::single(arity, q, false, true); };
    auto phase = [&](int k) { out.phase_pow = (out.phase_pow + k) & 3; };

    switch (g.kind) {
        case GateKind::X:
            if (x0) emit(X(0));
            if (z0) { emit(Z(0)); phase(2); }
            break;
        case GateKind::Z:
            if (x0) { emit(X(0)); phase(2); }
            if (z0) emit(Z(0));
            break;
        case GateKind::Y:
            if (x0) { emit(X(0)); phase(2); }
            if (z0) { emit(Z(0)); phase(2); }
            break;
        case GateKind::H:
            if (x0) emit(Z(0));
            if (z0) emit(X(0));
            break;
        case GateKind::S:
            if (x0) { emit(pauli_mul(X(0), Z(0))); phase(1); }  // S X = (i X Z) S
            if (z0) emit(Z(0));
            break;
        case GateKind::Phase:
            if (x0) { emit(X(0)); g2.theta = -g2.theta; }
            if (z0) emit(Z(0));
            break;
        case GateKind::RotZ:
            if (x0) { emit(X(0)); g2.theta = -g2.theta; }
            if (z0) emit(Z(0));
            break;
        case GateKind::RotX:
            if (x0) emit(X(0));
            if (z0) { emit(Z(0)); g2.theta = -g2.theta; }
            break;
        case GateKind::W:
            if (x0) { emit(Z(0)); g2.theta = -g2.theta; }  // W(t) X ~ Z W(-t)
            if (z0) emit(X(0));                            // W(t) Z = X W(t)
            break;
        case GateKind::CZ:
            if (x0) { emit(X(0)); emit(Z(1)); }
            if (z0) emit(Z(0));
            if (x1) { emit(X(1)); emit(Z(0)); }
            if (z1) emit(Z(1));
            break;
        case GateKind::CX:  // qubit 0 = control
            if (x0) { emit(X(0)); emit(X(1)); }
            if (z0) emit(Z(0));
            if (x1) emit(X(1));
            if (z1) { emit(Z(0)); emit(Z(1)); }
            break;
        default:
            throw std::invalid_argument("propagate: unsupported gate kind");
    }
    return {out, g2};
}

// --- Clifford verification ---------------------------------------------------

struct CliffordWitness {
    bool clifford = false;
    // (generator, image) pairs for every X_j, Z_j; empty when not Clifford.
    std::vector<std::pair<PauliOp, PauliOp>> table;
};

// True iff u P u^dag is a (phase i^k) Pauli for every generator X_j, Z_j.
inline CliffordWitness is_clifford(const ComplexMatrix& u, int n, double tol = 1e-9) {
    if (n < 1 || n > 4) throw std::invalid_argument("is_clifford: supported for 1..4 qubits");
    if (u.rows() != (std::size_t{1} << n) || !u.is_unitary(kUnitaryTol))
        throw std::invalid_argument("is_clifford: input must be unitary on n qubits");

    CliffordWitness w;
    const ComplexMatrix udag = u.adjoint();
    for (int q = 0; q < n; ++q)
        for (bool is_x : {true, false}) {
            const PauliOp gen = PauliOp::single(n, q, is_x, !is_x);
            const ComplexMatrix img = u * pauli_matrix(gen) * udag;
            auto rec = recognize_pauli(img, tol);
            if (!rec) return CliffordWitness{};
            // The phase of a conjugated Hermitian generator is i^k; snap it.
            int k = -1;
            for (int t = 0; t < 4; ++t)
                if (std::abs(rec->second - phase_value(t)) <= tol) k = t;
            if (k < 0) return CliffordWitness{};
            PauliOp image = rec->first;
            image.phase_pow = k;
            w.table.emplace_back(gen, image);
        }
    w.clifford = true;
    return w;
}

// --- symbolic byproduct frames ----------------------------------------------

struct FrameEntry {
    ParitySet x_deps;
    ParitySet z_deps;

    bool empty() const { return x_deps.empty() && z_deps.empty(); }
    bool operator==(const FrameEntry& o) const {
        return x_deps == o.x_deps && z_deps == o.z_deps;
    }
};

// Site id -> symbolic X/Z exponents.
using PauliFrame = std::map<int, FrameEntry>;

inline PauliFrame frame_mul(const PauliFrame& a, const PauliFrame& b) {
    PauliFrame r = a;
    for (const auto& [site, e] : b) {
        r[site].x_deps.merge(e.x_deps);
        r[site].z_deps.merge(e.z_deps);
    }
    return r;
}

// Resolve to a phase-free Pauli over `site_order` (qubit i = site_order[i]).
inline PauliOp frame_resolve(const PauliFrame& f, const OutcomeRecord& r,
                             const std::vector<int>& site_order) {
    PauliOp p = PauliOp::identity(static_cast<int>(site_order.size()));
    for (std::size_t i = 0; i < site_order.size(); ++i) {
        auto it = f.find(site_order[i]);
        if (it == f.end()) continue;
        if (it->second.x_deps.resolve(r)) p.xmask |= (std::uint64_t{1} << i);
        if (it->second.z_deps.resolve(r)) p.zmask |= (std::uint64_t{1} << i);
    }
    return p;
}

// --- classical parity depth ---------------------------------------------------

// Layers of a binary XOR tree over k bits (pairwise halving).
inline int parity_depth(int k) {
    if (k <= 0) throw std::invalid_argument("parity_depth: need at least one bit");
    int d = 0;
    int span = 1;
    while (span < k) {
        span <<= 1;
        ++d;
    }
    return d;
}

}  // namespace mbqc
