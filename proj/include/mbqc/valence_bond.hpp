// valence_bond.hpp
//
// Valence-bond (projected entangled pair) construction of cluster states:
// grids of |H> = CZ|++> bonds between sites, the per-site projection onto
// the all-equal subspace (relabeled |0~>, |1~>), and the rotated Bell bases
// that make single-qubit measurements on the projected state look like
// teleportation through a bond.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "gates.hpp"
#include "pattern.hpp"
#include "state.hpp"

namespace mbqc {

struct BondEnd {
    int site = 0;
    int slot = 0;  // local qubit index at the site
};

struct Bond {
    BondEnd a, b;
};

// Sites holding 1-4 physical qubits, every local slot attached to exactly
// one |H> bond.
struct BondGrid {
    std::map<int, int> site_arity;  // site id -> physical qubits at the site
    std::vector<Bond> bonds;

    void validate() const {
        int slots = 0;
        for (const auto& [site, arity] : site_arity) {
            if (arity < 1 || arity > 4)
                throw std::invalid_argument("BondGrid: site arity must be 1..4");
            slots += arity;
        }
        std::set<std::pair<int, int>> used;
        for (const auto& bond : bonds) {
            for (const BondEnd& e : {bond.a, bond.b}) {
                const auto it = site_arity.find(e.site);
                if (it == site_arity.end())
                    throw std::invalid_argument("BondGrid: bond references unknown site");
                if (e.slot < 0 || e.slot >= it->second)
                    throw std::invalid_argument("BondGrid: slot outside site arity");
                if (!used.insert({e.site, e.slot}).second)
                    throw std::invalid_argument("BondGrid: slot used by two bonds");
            }
            if (bond.a.site == bond.b.site)
                throw std::invalid_argument("BondGrid: bond must join distinct sites");
        }
        if (static_cast<int>(used.size()) != slots)
            throw std::invalid_argument("BondGrid: dangling slot without a bond");
    }

    int total_qubits() const {
        int total = 0;
        for (const auto& [site, arity] : site_arity) total += arity;
        return total;
    }

    // Global qubit index of (site, slot); qubits are ordered by (site, slot).
    int qubit_index(int site, int slot) const {
        int idx = 0;
        for (const auto& [s, arity] : site_arity) {
            if (s == site) return idx + slot;
            idx += arity;
        }
        throw std::invalid_argument("BondGrid: unknown site");
    }

    // Per-site qubit lists in site order, for pi_project.
    std::vector<std::vector<int>> partition() const {
        std::vector<std::vector<int>> parts;
        int idx = 0;
        for (const auto& [site, arity] : site_arity) {
            std::vector<int> qs(arity);
            for (int s = 0; s < arity; ++s) qs[s] = idx + s;
            idx += arity;
            parts.push_back(std::move(qs));
        }
        return parts;
    }
};

// Product of one |H> per bond, in the grid's (site, slot) qubit order.
inline QubitState build_grid_state(const BondGrid& g) {
    g.validate();
    const int n = g.total_qubits();
    if (n == 0) throw std::invalid_argument("build_grid_state: empty grid");
    if (n > 20) throw std::invalid_argument("build_grid_state: grid too large");
    const std::vector<cplx> hb = hbond().amps;
    std::vector<std::pair<int, int>> ends;  // (qubit of end a, qubit of end b)
    for (const auto& bond : g.bonds)
        ends.emplace_back(g.qubit_index(bond.a.site, bond.a.slot),
                          g.qubit_index(bond.b.site, bond.b.slot));
    QubitState s(n);
    for (std::uint64_t x = 0; x < s.dim(); ++x) {
        cplx amp{1.0, 0.0};
        for (const auto& [qa, qb] : ends) {
            const std::uint64_t ba = (x >> (n - 1 - qa)) & 1;
            const std::uint64_t bb = (x >> (n - 1 - qb)) & 1;
            amp *= hb[(ba << 1) | bb];
        }
        s.amps[x] = amp;
    }
    return s;
}

// The site projection |0~><0...0| + |1~><1...1| as an explicit 2 x 2^k
// isometry (row 0 keeps the all-zeros component, row 1 the all-ones one).
struct PiProjector {
    int arity = 1;
    ComplexMatrix matrix;  // 2 x 2^arity
};

inline PiProjector pi_projector(int arity) {
    if (arity < 1) throw std::invalid_argument("pi_projector: arity must be positive");
    PiProjector p;
    p.arity = arity;
    p.matrix = ComplexMatrix(2, std::size_t{1} << arity);
    p.matrix(0, 0) = cplx{1.0, 0.0};
    p.matrix(1, (std::size_t{1} << arity) - 1) = cplx{1.0, 0.0};
    return p;
}

// Apply the site projection to every block of the partition; the result has
// one logical qubit per site, in partition order, and keeps its subnorm.
inline QubitState pi_project(const QubitState& state,
                             const std::vector<std::vector<int>>& sites) {
    std::vector<int> seen(state.n, 0);
    for (const auto& qs : sites) {
        if (qs.empty()) throw std::invalid_argument("pi_project: empty site");
        for (int q : qs) {
            if (q < 0 || q >= state.n) throw std::invalid_argument("pi_project: qubit out of range");
            if (seen[q]++) throw std::invalid_argument("pi_project: qubit in two sites");
        }
    }
    for (int q = 0; q < state.n; ++q)
        if (!seen[q]) throw std::invalid_argument("pi_project: partition misses a qubit");

    // Bring the register into site-major order, then contract sites right to
    // left so the remaining target positions stay valid.
    std::vector<int> perm;
    for (const auto& qs : sites)
        for (int q : qs) perm.push_back(q);
    QubitState cur = permute_qubits(state, perm);
    std::vector<int> offsets(sites.size());
    int off = 0;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        offsets[i] = off;
        off += static_cast<int>(sites[i].size());
    }
    for (std::size_t i = sites.size(); i-- > 0;) {
        const int k = static_cast<int>(sites[i].size());
        std::vector<int> targets(k);
        for (int t = 0; t < k; ++t) targets[t] = offsets[i] + t;
        cur = apply_linear_map(cur, pi_projector(k).matrix, targets);
    }
    return cur;
}

// 1D grid: a line of `length` sites joined by |H> bonds; end sites hold one
// qubit, interior sites two (slot 0 = bond to the left, last slot = to the
// right).
inline BondGrid line_grid(int length) {
    if (length < 2) throw std::invalid_argument("line_grid: need at least two sites");
    BondGrid g;
    for (int i = 0; i < length; ++i)
        g.site_arity[i] = (i == 0 || i == length - 1) ? 1 : 2;
    for (int i = 0; i + 1 < length; ++i)
        g.bonds.push_back({{i, i == 0 ? 0 : 1}, {i + 1, 0}});
    return g;
}

// 2D grid: rows x cols sites with bonds between lattice neighbours. A site's
// slots are numbered by its neighbours in reading order (up, left, right,
// down), giving arity 2 at corners, 3 on edges and 4 in the interior.
inline BondGrid rect_grid(int rows, int cols) {
    if (rows < 1 || cols < 1 || rows * cols < 2)
        throw std::invalid_argument("rect_grid: need at least two sites");
    const auto site_of = [cols](int r, int c) { return r * cols + c; };
    const auto slot_of = [&](int r, int c, int dr, int dc) {
        int slot = 0;
        const int deltas[4][2] = {{-1, 0}, {0, -1}, {0, 1}, {1, 0}};
        for (const auto& d : deltas) {
            const int nr = r + d[0];
            const int nc = c + d[1];
            if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
            if (d[0] == dr && d[1] == dc) return slot;
            ++slot;
        }
        throw std::logic_error("rect_grid: neighbour off the lattice");
    };
    BondGrid g;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            int arity = 0;
            if (r > 0) ++arity;
            if (c > 0) ++arity;
            if (c + 1 < cols) ++arity;
            if (r + 1 < rows) ++arity;
            g.site_arity[site_of(r, c)] = arity;
        }
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols)
                g.bonds.push_back({{site_of(r, c), slot_of(r, c, 0, 1)},
                                   {site_of(r, c + 1), slot_of(r, c + 1, 0, -1)}});
            if (r + 1 < rows)
                g.bonds.push_back({{site_of(r, c), slot_of(r, c, 1, 0)},
                                   {site_of(r + 1, c), slot_of(r + 1, c, -1, 0)}});
        }
    return g;
}

namespace detail {

inline double lemma3_fidelity(const BondGrid& g, const ClusterGraph& target) {
    if (g.site_arity.size() > 10)
        throw std::invalid_argument("verify_lemma3: more than 10 logical sites");
    const QubitState projected = pi_project(build_grid_state(g), g.partition());
    return fidelity_up_to_phase(projected.normalized(), build_cluster(target));
}

}  // namespace detail

// Fidelity between the projected 1D grid and the cluster state on a line.
inline double verify_lemma3(int length) {
    ClusterGraph chain;
    for (int i = 0; i < length; ++i) chain.sites.push_back(i);
    for (int i = 0; i + 1 < length; ++i) chain.add_edge(i, i + 1);
    return detail::lemma3_fidelity(line_grid(length), chain);
}

// Fidelity between the projected 2D grid and the cluster state on a lattice.
inline double verify_lemma3(int rows, int cols) {
    ClusterGraph lattice;
    for (int s = 0; s < rows * cols; ++s) lattice.sites.push_back(s);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols) lattice.add_edge(r * cols + c, r * cols + c + 1);
            if (r + 1 < rows) lattice.add_edge(r * cols + c, (r + 1) * cols + c);
        }
    return detail::lemma3_fidelity(rect_grid(rows, cols), lattice);
}

// The |H>-based Bell basis {(sigma_a (x) I)|H>} for sigma in {I, X, Z, XZ}.
// CZ maps it (up to phase) to |++>, |+->, |-+>, |--> in that order.
inline std::array<QubitState, 4> hbell_basis() {
    const QubitState h = hbond();
    const std::array<ComplexMatrix, 4> sigma = {identity2(), pauli_x(), pauli_z(),
                                                pauli_x() * pauli_z()};
    std::array<QubitState, 4> basis;
    for (int a = 0; a < 4; ++a) basis[a] = apply_unitary(h, sigma[a], {0});
    return basis;
}

// One element of the rotated Bell basis (W(-theta)^dag sigma_a (x) I)|H>,
// classified by whether it lies in span{|00>, |11>} and, if so, by the sign
// of its e^{i theta}|11> component.
struct RotatedBell {
    QubitState state;
    bool diagonal = false;  // true for a = 0, 1
    int sign = 0;           // +1 / -1 for a = 0 / 1, else 0
};

inline std::array<RotatedBell, 4> rotated_bell_w(double theta) {
    const ComplexMatrix w_dag = w_gate(-theta).adjoint();
    const auto bell = hbell_basis();
    std::array<RotatedBell, 4> out;
    for (int a = 0; a < 4; ++a) {
        out[a].state = apply_unitary(bell[a], w_dag, {0});
        out[a].diagonal = a < 2;
        out[a].sign = a == 0 ? 1 : (a == 1 ? -1 : 0);
    }
    return out;
}

}  // namespace mbqc
