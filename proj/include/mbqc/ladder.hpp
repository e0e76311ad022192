// ladder.hpp
//
// Efficient classical simulation of adaptive 1-qubit measurements on
// generalized 1D ladder states: n lines start in |0> and two-qubit unitaries
// U_{i,i+1} couple consecutive lines in ladder order. Joint outcome
// probabilities for fixed-outcome queries are computed by a two-line
// density-matrix sweep (project at measured lines, trace at unmeasured
// ones), and adaptive sampling reduces to ratios of joint probabilities.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "gates.hpp"
#include "pattern.hpp"
#include "random.hpp"
#include "state.hpp"

namespace mbqc {

struct LadderSpec {
    int n = 0;                             // line count
    std::vector<ComplexMatrix> unitaries;  // U_{i,i+1}, i = 0..n-2

    void validate() const {
        if (n < 1) throw std::invalid_argument("LadderSpec: need at least one line");
        if (unitaries.size() + 1 != static_cast<std::size_t>(n))
            throw std::invalid_argument("LadderSpec: expected n-1 coupling unitaries");
        for (const auto& u : unitaries) {
            if (u.rows() != 4 || u.cols() != 4)
                throw std::invalid_argument("LadderSpec: couplings must act on two lines");
            if (!u.is_unitary(1e-10))
                throw std::invalid_argument("LadderSpec: coupling is not unitary");
        }
    }
};

// One fixed-outcome line measurement: Mz reads the computational basis; M
// projects onto (|0> + (-1)^outcome e^{i angle} |1>)/sqrt2, outcome 0 <-> "+".
struct LineMeasurement {
    int line = 0;
    MeasBasis basis = MeasBasis::M;
    double angle = 0.0;
    int outcome = 0;
};

struct MeasurementQuery {
    std::vector<LineMeasurement> items;

    // Lines must be distinct and on the ladder; order is irrelevant because
    // fixed-outcome projectors on distinct lines commute.
    void validate(int n) const {
        std::set<int> seen;
        for (const auto& it : items) {
            if (it.line < 0 || it.line >= n)
                throw std::invalid_argument("MeasurementQuery: line off the ladder");
            if (!seen.insert(it.line).second)
                throw std::invalid_argument("MeasurementQuery: line queried twice");
            if ((it.outcome & ~1) != 0)
                throw std::invalid_argument("MeasurementQuery: outcome must be 0 or 1");
        }
    }

    MeasurementQuery canonical() const {
        MeasurementQuery q = *this;
        std::sort(q.items.begin(), q.items.end(),
                  [](const LineMeasurement& a, const LineMeasurement& b) { return a.line < b.line; });
        return q;
    }
};

// The sweep's working state: the reduced density matrix around line `line`,
// never wider than two lines — the structural fact that makes the
// simulation polynomial.
struct LadderSimState {
    int line = 0;
    DensityMatrix dm;
    double subnorm = 1.0;

    void check() const {
        if (dm.n < 1 || dm.n > 2)
            throw std::logic_error("LadderSimState: state widened beyond two lines");
    }
};

// Full statevector of the ladder; oracle-scale geometries only.
inline QubitState ladder_state(const LadderSpec& spec) {
    spec.validate();
    if (spec.n > 20) throw std::invalid_argument("ladder_state: too many lines");
    QubitState s(spec.n);
    for (int m = 0; m + 1 < spec.n; ++m)
        apply_unitary_inplace(s, spec.unitaries[m], {m, m + 1});
    return s;
}

namespace detail {

inline void ladder_project(LadderSimState& st, const LineMeasurement& lm, int qubit) {
    const auto ket = lm.basis == MeasBasis::M ? meas_ket(lm.outcome, lm.angle) : z_ket(lm.outcome);
    ComplexMatrix proj(2, 2);
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c) proj(r, c) = ket[r] * std::conj(ket[c]);
    const ComplexMatrix e = expand_to_register(proj, {qubit}, st.dm.n);
    st.dm = DensityMatrix(st.dm.n, e * st.dm.rho * e.adjoint());
    st.subnorm = st.dm.trace_real();
    st.check();
}

}  // namespace detail

// Joint probability of a fixed-outcome query, computed with the two-line
// sweep: sigma_{m,m+1} = U_{m,m+1} (rho_m (x) |0><0|) U^dag, project if line
// m is queried, trace line m out, continue; the final trace is the
// probability. Measurements sit between U_{m,m+1} and U_{m+1,m+2}.
inline double joint_probability(const LadderSpec& spec, const MeasurementQuery& q) {
    spec.validate();
    q.validate(spec.n);
    std::map<int, LineMeasurement> by_line;
    for (const auto& it : q.items) by_line[it.line] = it;

    LadderSimState st;
    st.line = 0;
    st.dm = DensityMatrix(QubitState(1));  // first line in |0>
    st.check();

    ComplexMatrix ground(2, 2);
    ground(0, 0) = cplx{1.0, 0.0};

    for (int m = 0; m + 1 < spec.n; ++m) {
        const ComplexMatrix& u = spec.unitaries[m];
        st.dm = DensityMatrix(2, u * kron(st.dm.rho, ground) * u.adjoint());
        st.line = m;
        st.check();
        const auto it = by_line.find(m);
        if (it != by_line.end()) detail::ladder_project(st, it->second, 0);
        st.dm = partial_trace(st.dm, {1});
        st.line = m + 1;
        st.check();
    }
    const auto last = by_line.find(spec.n - 1);
    if (last != by_line.end()) detail::ladder_project(st, last->second, 0);
    return st.dm.trace_real();
}

// P(next | history) as a ratio of two joint probabilities. A vanishing
// conditioning probability signals an impossible history.
inline double conditional_probability(const LadderSpec& spec,
                                      const std::vector<LineMeasurement>& history,
                                      const LineMeasurement& next) {
    double denom = 1.0;
    if (!history.empty()) denom = joint_probability(spec, MeasurementQuery{history});
    if (denom <= 1e-300)
        throw std::runtime_error("conditional_probability: conditioning probability vanishes");
    MeasurementQuery full{history};
    full.items.push_back(next);
    return joint_probability(spec, full) / denom;
}

// Adaptive measurement chooser: given the history (lines, bases and sampled
// outcomes so far), name the next line and basis, or std::nullopt to stop.
struct LineRequest {
    int line = 0;
    MeasBasis basis = MeasBasis::M;
    double angle = 0.0;
};
using LadderStrategy =
    std::function<std::optional<LineRequest>(const std::vector<LineMeasurement>&)>;

struct LadderSample {
    std::vector<LineMeasurement> record;  // sampled outcomes, in request order
    double probability = 1.0;             // joint probability of the record
};

// Sample outcomes one line at a time from the exact conditionals; the whole
// ladder is re-swept per step. Deterministic for a fixed seed.
inline LadderSample conditional_sample(const LadderSpec& spec, const LadderStrategy& strategy,
                                       std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    LadderSample out;
    std::set<int> used;
    while (auto req = strategy(out.record)) {
        if (req->line < 0 || req->line >= spec.n)
            throw std::invalid_argument("conditional_sample: line off the ladder");
        if (!used.insert(req->line).second)
            throw std::invalid_argument("conditional_sample: line requested twice");
        LineMeasurement lm{req->line, req->basis, req->angle, 0};
        const double c0 = conditional_probability(spec, out.record, lm);
        lm.outcome = rng.uniform() < c0 ? 0 : 1;
        out.record.push_back(lm);
    }
    if (!out.record.empty())
        out.probability = joint_probability(spec, MeasurementQuery{out.record});
    return out;
}

// Ladder whose state is the standard 1D cluster of n sites. Each line must
// pass through H exactly once before its CZs, so the first rung rotates both
// of its fresh lines and every later rung only the incoming one.
inline LadderSpec cluster_ladder(int n) {
    if (n < 2) throw std::invalid_argument("cluster_ladder: need at least two lines");
    LadderSpec s;
    s.n = n;
    s.unitaries.push_back(cz() * kron(hadamard(), hadamard()));
    const ComplexMatrix later = cz() * kron(identity2(), hadamard());
    for (int i = 1; i + 1 < n; ++i) s.unitaries.push_back(later);
    return s;
}

}  // namespace mbqc
