// state.hpp
//
// Pure states and density matrices on labelled qubit registers.
//
// Index convention: qubit 0 is the most significant bit of the basis label,
// so for an n-qubit register, qubit q selects bit (n-1-q) of the amplitude
// index. tensor(a, b) places a's qubits before b's.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "linalg.hpp"

namespace mbqc {

struct QubitState {
    int n = 0;                      // number of qubits
    std::vector<cplx> amps;         // 2^n amplitudes
    bool subnormalized = false;     // true after a projective branch

    QubitState() = default;
    explicit QubitState(int n_qubits)
        : n(n_qubits), amps(std::size_t{1} << n_qubits, cplx{0.0, 0.0}) {
        amps[0] = 1.0;
    }
    QubitState(int n_qubits, std::vector<cplx> a, bool subnorm = false)
        : n(n_qubits), amps(std::move(a)), subnormalized(subnorm) {
        if (amps.size() != (std::size_t{1} << n))
            throw std::invalid_argument("QubitState: amplitude count != 2^n");
    }

    std::size_t dim() const { return amps.size(); }

    double norm2() const {
        double s = 0.0;
        for (const auto& a : amps) s += std::norm(a);
        return s;
    }

    double norm() const { return std::sqrt(norm2()); }

    QubitState normalized() const {
        const double nn = norm();
        if (nn < 1e-300) throw std::runtime_error("QubitState: cannot normalize zero vector");
        QubitState r = *this;
        for (auto& a : r.amps) a /= nn;
        r.subnormalized = false;
        return r;
    }

    // Basis state from bit string, qubit 0 first, e.g. "01" = |0>|1>.
    static QubitState basis(const std::string& bits) {
        QubitState s(static_cast<int>(bits.size()));
        std::size_t idx = 0;
        for (char c : bits) {
            idx <<= 1;
            if (c == '1') idx |= 1;
            else if (c != '0') throw std::invalid_argument("QubitState::basis: bad bit char");
        }
        s.amps.assign(s.amps.size(), cplx{0.0, 0.0});
        s.amps[idx] = 1.0;
        return s;
    }
};

inline QubitState tensor(const QubitState& a, const QubitState& b) {
    QubitState r;
    r.n = a.n + b.n;
    r.subnormalized = a.subnormalized || b.subnormalized;
    r.amps.resize(a.dim() * b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < b.dim(); ++j)
            r.amps[i * b.dim() + j] = a.amps[i] * b.amps[j];
    return r;
}

inline cplx inner(const QubitState& a, const QubitState& b) {
    if (a.n != b.n) throw std::invalid_argument("inner: qubit count mismatch");
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a.amps[i]) * b.amps[i];
    return s;
}

// |<a|b>| after normalizing both sides: 1.0 means equal up to global phase.
inline double fidelity_up_to_phase(const QubitState& a, const QubitState& b) {
    const double na = a.norm(), nb = b.norm();
    if (na < 1e-300 || nb < 1e-300)
        throw std::runtime_error("fidelity_up_to_phase: zero vector");
    return std::abs(inner(a, b)) / (na * nb);
}

// Apply a 2^k x 2^k unitary to qubits `targets` (distinct, order significant:
// targets[0] is the most significant bit of the operator's index).
inline void apply_unitary_inplace(QubitState& s, const ComplexMatrix& u,
                                  const std::vector<int>& targets) {
    const int k = static_cast<int>(targets.size());
    const std::size_t d = std::size_t{1} << k;
    if (u.rows() != d || u.cols() != d)
        throw std::invalid_argument("apply_unitary: operator size != 2^targets");
    for (int t : targets)
        if (t < 0 || t >= s.n) throw std::out_of_range("apply_unitary: target out of range");

    std::vector<int> shifts(k);
    for (int i = 0; i < k; ++i) shifts[i] = s.n - 1 - targets[i];

    // Enumerate all assignments of the non-target bits.
    std::uint64_t target_mask = 0;
    for (int sh : shifts) target_mask |= (std::uint64_t{1} << sh);

    std::vector<cplx> in(d), out(d);
    const std::uint64_t dim = s.dim();
    for (std::uint64_t base = 0; base < dim; ++base) {
        if (base & target_mask) continue;  // only iterate target-bits-zero patterns
        std::vector<std::uint64_t> idx(d);
        for (std::uint64_t v = 0; v < d; ++v) {
            std::uint64_t x = base;
            for (int i = 0; i < k; ++i)
                if ((v >> (k - 1 - i)) & 1) x |= (std::uint64_t{1} << shifts[i]);
            idx[v] = x;
            in[v] = s.amps[x];
        }
        for (std::uint64_t r = 0; r < d; ++r) {
            cplx acc = 0.0;
            for (std::uint64_t c = 0; c < d; ++c) acc += u(r, c) * in[c];
            out[r] = acc;
        }
        for (std::uint64_t v = 0; v < d; ++v) s.amps[idx[v]] = out[v];
    }
}

inline QubitState apply_unitary(const QubitState& s, const ComplexMatrix& u,
                                const std::vector<int>& targets) {
    QubitState r = s;
    apply_unitary_inplace(r, u, targets);
    return r;
}

// Contract <bra| against qubits `targets` and remove them from the register.
// bra has 2^k entries (amplitudes of the state being projected on, conjugated
// internally). Result is subnormalized; its squared norm is the branch
// probability when the input was normalized.
inline QubitState project(const QubitState& s, const std::vector<cplx>& bra_state,
                          const std::vector<int>& targets) {
    const int k = static_cast<int>(targets.size());
    const std::size_t d = std::size_t{1} << k;
    if (bra_state.size() != d)
        throw std::invalid_argument("project: bra size != 2^targets");
    for (int t : targets)
        if (t < 0 || t >= s.n) throw std::out_of_range("project: target out of range");

    std::vector<int> shifts(k);
    for (int i = 0; i < k; ++i) shifts[i] = s.n - 1 - targets[i];
    std::uint64_t target_mask = 0;
    for (int sh : shifts) target_mask |= (std::uint64_t{1} << sh);

    QubitState r;
    r.n = s.n - k;
    r.subnormalized = true;
    r.amps.assign(std::size_t{1} << r.n, cplx{0.0, 0.0});

    const std::uint64_t dim = s.dim();
    for (std::uint64_t base = 0; base < dim; ++base) {
        if (base & target_mask) continue;
        // Compress the remaining bits of `base` into the output index,
        // preserving qubit order.
        std::uint64_t out_idx = 0;
        for (int q = 0; q < s.n; ++q) {
            const int sh = s.n - 1 - q;
            if ((std::uint64_t{1} << sh) & target_mask) continue;
            out_idx = (out_idx << 1) | ((base >> sh) & 1);
        }
        cplx acc = 0.0;
        for (std::uint64_t v = 0; v < d; ++v) {
            std::uint64_t x = base;
            for (int i = 0; i < k; ++i)
                if ((v >> (k - 1 - i)) & 1) x |= (std::uint64_t{1} << shifts[i]);
            acc += std::conj(bra_state[v]) * s.amps[x];
        }
        r.amps[out_idx] = acc;
    }
    return r;
}

// Apply an arbitrary linear map (2^j x 2^k matrix) to k qubits; the j output
// qubits replace them at the position of targets[0]. Used for isometries such
// as symmetric-subspace projectors with unequal in/out arity.
inline QubitState apply_linear_map(const QubitState& s, const ComplexMatrix& m,
                                   const std::vector<int>& targets) {
    const int k = static_cast<int>(targets.size());
    const std::size_t dk = std::size_t{1} << k;
    if (m.cols() != dk) throw std::invalid_argument("apply_linear_map: cols != 2^targets");
    std::size_t dj = m.rows();
    int j = 0;
    while ((std::size_t{1} << j) < dj) ++j;
    if ((std::size_t{1} << j) != dj) throw std::invalid_argument("apply_linear_map: rows not a power of 2");

    // Move targets to the front, in order, via index remap.
    std::vector<int> perm;  // new order of old qubit labels
    perm.reserve(s.n);
    for (int t : targets) perm.push_back(t);
    std::vector<bool> is_target(s.n, false);
    for (int t : targets) {
        if (t < 0 || t >= s.n) throw std::out_of_range("apply_linear_map: target out of range");
        if (is_target[t]) throw std::invalid_argument("apply_linear_map: duplicate target");
        is_target[t] = true;
    }
    int insert_pos = targets[0];
    std::vector<int> rest;
    for (int q = 0; q < s.n; ++q)
        if (!is_target[q]) rest.push_back(q);

    // front = targets, back = rest
    std::vector<cplx> reordered(s.dim());
    for (std::uint64_t x = 0; x < s.dim(); ++x) {
        std::uint64_t y = 0;
        for (int t : targets) y = (y << 1) | ((x >> (s.n - 1 - t)) & 1);
        for (int q : rest) y = (y << 1) | ((x >> (s.n - 1 - q)) & 1);
        reordered[y] = s.amps[x];
    }

    const std::size_t rest_dim = std::size_t{1} << (s.n - k);
    std::vector<cplx> mapped(dj * rest_dim, cplx{0.0, 0.0});
    for (std::size_t r = 0; r < dj; ++r)
        for (std::size_t c = 0; c < dk; ++c) {
            const cplx v = m(r, c);
            if (v == cplx{0.0, 0.0}) continue;
            for (std::size_t b = 0; b < rest_dim; ++b)
                mapped[r * rest_dim + b] += v * reordered[c * rest_dim + b];
        }

    // New register: rest qubits keep their relative order; the j fresh qubits
    // sit where targets[0] was (counting positions among non-target qubits).
    int pos_among_rest = 0;
    for (int q : rest)
        if (q < insert_pos) ++pos_among_rest;

    QubitState out;
    out.n = s.n - k + j;
    out.subnormalized = true;
    out.amps.assign(std::size_t{1} << out.n, cplx{0.0, 0.0});
    for (std::size_t r = 0; r < dj; ++r)
        for (std::size_t b = 0; b < rest_dim; ++b) {
            // interleave: rest bits before pos_among_rest, then j new bits, then the rest
            std::uint64_t idx = 0;
            int rest_bits = s.n - k;
            for (int p = 0; p < pos_among_rest; ++p)
                idx = (idx << 1) | ((b >> (rest_bits - 1 - p)) & 1);
            for (int p = 0; p < j; ++p)
                idx = (idx << 1) | ((r >> (j - 1 - p)) & 1);
            for (int p = pos_among_rest; p < rest_bits; ++p)
                idx = (idx << 1) | ((b >> (rest_bits - 1 - p)) & 1);
            out.amps[idx] = mapped[r * rest_dim + b];
        }
    return out;
}

// Reorder register so new qubit q is old qubit perm[q].
inline QubitState permute_qubits(const QubitState& s, const std::vector<int>& perm) {
    if (static_cast<int>(perm.size()) != s.n)
        throw std::invalid_argument("permute_qubits: perm size != n");
    QubitState r;
    r.n = s.n;
    r.subnormalized = s.subnormalized;
    r.amps.resize(s.dim());
    for (std::uint64_t x = 0; x < s.dim(); ++x) {
        std::uint64_t y = 0;
        for (int q = 0; q < s.n; ++q) y = (y << 1) | ((x >> (s.n - 1 - perm[q])) & 1);
        r.amps[y] = s.amps[x];
    }
    return r;
}

struct DensityMatrix {
    int n = 0;
    ComplexMatrix rho;

    DensityMatrix() = default;
    explicit DensityMatrix(const QubitState& s) : n(s.n), rho(s.dim(), s.dim()) {
        for (std::size_t i = 0; i < s.dim(); ++i)
            for (std::size_t j = 0; j < s.dim(); ++j)
                rho(i, j) = s.amps[i] * std::conj(s.amps[j]);
    }
    DensityMatrix(int n_qubits, ComplexMatrix m) : n(n_qubits), rho(std::move(m)) {
        if (rho.rows() != (std::size_t{1} << n) || rho.cols() != rho.rows())
            throw std::invalid_argument("DensityMatrix: bad shape");
    }

    double trace_real() const { return rho.trace().real(); }

    bool is_positive_semidefinite(double floor = kPsdFloor) const {
        auto ev = hermitian_eigenvalues(rho);
        return std::all_of(ev.begin(), ev.end(), [&](double e) { return e >= -floor; });
    }
};

// Trace out all qubits except `keep` (result qubit order = keep order).
inline DensityMatrix partial_trace(const DensityMatrix& dm, const std::vector<int>& keep) {
    const int nk = static_cast<int>(keep.size());
    for (int q : keep)
        if (q < 0 || q >= dm.n) throw std::out_of_range("partial_trace: keep out of range");
    std::vector<bool> kept(dm.n, false);
    for (int q : keep) kept[q] = true;
    std::vector<int> traced;
    for (int q = 0; q < dm.n; ++q)
        if (!kept[q]) traced.push_back(q);

    const std::size_t dk = std::size_t{1} << nk;
    const std::size_t dt = std::size_t{1} << traced.size();
    DensityMatrix out(nk, ComplexMatrix(dk, dk));

    auto compose_index = [&](std::uint64_t kbits, std::uint64_t tbits) {
        std::uint64_t idx = 0;
        for (int i = 0; i < nk; ++i) {
            const int q = keep[i];
            if ((kbits >> (nk - 1 - i)) & 1) idx |= (std::uint64_t{1} << (dm.n - 1 - q));
        }
        for (std::size_t i = 0; i < traced.size(); ++i) {
            const int q = traced[i];
            if ((tbits >> (traced.size() - 1 - i)) & 1) idx |= (std::uint64_t{1} << (dm.n - 1 - q));
        }
        return idx;
    };

    for (std::size_t i = 0; i < dk; ++i)
        for (std::size_t j = 0; j < dk; ++j) {
            cplx acc = 0.0;
            for (std::size_t t = 0; t < dt; ++t)
                acc += dm.rho(compose_index(i, t), compose_index(j, t));
            out.rho(i, j) = acc;
        }
    return out;
}

inline DensityMatrix partial_trace(const QubitState& s, const std::vector<int>& keep) {
    return partial_trace(DensityMatrix(s), keep);
}

}  // namespace mbqc
