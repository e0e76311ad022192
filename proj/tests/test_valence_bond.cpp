// Tests for the valence-bond construction: grid validation, |H>-bond
// product states, the all-equal site projection, cluster-state recovery on
// 1D and 2D geometries, and the rotated Bell bases behind the
// measurement-as-teleportation picture.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "mbqc/random.hpp"
#include "mbqc/valence_bond.hpp"

using namespace mbqc;

namespace {

QubitState two_qubit(std::initializer_list<double> signs) {
    std::vector<cplx> amps;
    for (double s : signs) amps.push_back(cplx{0.5 * s, 0.0});
    return QubitState(2, amps);
}

double max_amp_diff(const QubitState& a, const QubitState& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.amps.size(); ++i)
        m = std::max(m, std::abs(a.amps[i] - b.amps[i]));
    return m;
}

// Project the given qubits of `s` onto the bra vector (conjugated internally).
QubitState project_bra(const QubitState& s, const std::vector<cplx>& ket,
                       const std::vector<int>& targets) {
    ComplexMatrix bra(1, ket.size());
    for (std::size_t i = 0; i < ket.size(); ++i) bra(0, i) = std::conj(ket[i]);
    return apply_linear_map(s, bra, targets);
}

}  // namespace

TEST_CASE("bond grids are validated") {
    BondGrid reuse;
    reuse.site_arity = {{0, 1}, {1, 1}, {2, 2}};
    reuse.bonds = {{{0, 0}, {2, 0}}, {{1, 0}, {2, 0}}};  // slot (2,0) twice
    REQUIRE_THROWS_AS(reuse.validate(), std::invalid_argument);

    BondGrid dangling;
    dangling.site_arity = {{0, 1}, {1, 2}};
    dangling.bonds = {{{0, 0}, {1, 0}}};  // slot (1,1) unused
    REQUIRE_THROWS_AS(dangling.validate(), std::invalid_argument);

    BondGrid fat;
    fat.site_arity = {{0, 5}};
    REQUIRE_THROWS_AS(fat.validate(), std::invalid_argument);

    BondGrid self;
    self.site_arity = {{0, 2}};
    self.bonds = {{{0, 0}, {0, 1}}};
    REQUIRE_THROWS_AS(self.validate(), std::invalid_argument);

    BondGrid stray;
    stray.site_arity = {{0, 1}, {1, 1}};
    stray.bonds = {{{0, 0}, {7, 0}}};
    REQUIRE_THROWS_AS(stray.validate(), std::invalid_argument);

    REQUIRE_THROWS_AS(line_grid(1), std::invalid_argument);
    REQUIRE_THROWS_AS(rect_grid(1, 1), std::invalid_argument);
}

TEST_CASE("grid states are products of bonds in site-slot order") {
    BondGrid single;
    single.site_arity = {{0, 1}, {1, 1}};
    single.bonds = {{{0, 0}, {1, 0}}};
    REQUIRE(max_amp_diff(build_grid_state(single), hbond()) <= 1e-15);

    // A line of three bonds happens to enumerate bond ends in (site, slot)
    // order already, so the state is literally |H>|H>|H>.
    const QubitState line = build_grid_state(line_grid(4));
    const QubitState triple = tensor(tensor(hbond(), hbond()), hbond());
    REQUIRE(line.n == 6);
    REQUIRE(max_amp_diff(line, triple) <= 1e-15);

    const QubitState square = build_grid_state(rect_grid(2, 2));
    REQUIRE(square.n == 8);
    REQUIRE(square.norm2() == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("the site projection is a rank-2 isometry") {
    for (int arity = 1; arity <= 4; ++arity) {
        const PiProjector p = pi_projector(arity);
        REQUIRE(p.matrix.rows() == 2);
        REQUIRE(p.matrix.cols() == std::size_t{1} << arity);
        const ComplexMatrix gram = p.matrix * p.matrix.adjoint();
        REQUIRE(gram.max_abs_diff(ComplexMatrix::identity(2)) <= 1e-15);
    }
    REQUIRE(pi_projector(1).matrix.max_abs_diff(identity2()) <= 1e-15);
    REQUIRE_THROWS_AS(pi_projector(0), std::invalid_argument);
}

TEST_CASE("projecting bonded pairs applies CZ") {
    Rng rng(42);

    // Single-qubit sites leave any state untouched.
    const QubitState any = rng.random_state(2);
    REQUIRE(max_amp_diff(pi_project(any, {{0}, {1}}), any) <= 1e-15);

    // |psi1> (x) |H> (x) |psi2> with two 2-qubit sites collapses to
    // CZ|psi1 psi2> up to the projection's subnorm.
    const QubitState psi1 = rng.random_state(1);
    const QubitState psi2 = rng.random_state(1);
    const QubitState joined = tensor(tensor(psi1, hbond()), psi2);
    const QubitState projected = pi_project(joined, {{0, 1}, {2, 3}});
    const QubitState expected = apply_unitary(tensor(psi1, psi2), cz(), {0, 1});
    REQUIRE(projected.n == 2);
    REQUIRE(fidelity_up_to_phase(projected.normalized(), expected) >= 1.0 - 1e-12);

    // Bad partitions are rejected.
    REQUIRE_THROWS_AS(pi_project(any, {{0}}), std::invalid_argument);
    REQUIRE_THROWS_AS(pi_project(any, {{0, 1}, {1}}), std::invalid_argument);
    REQUIRE_THROWS_AS(pi_project(any, {{0, 3}, {1}}), std::invalid_argument);
    REQUIRE_THROWS_AS(pi_project(any, {{0}, {}, {1}}), std::invalid_argument);
}

TEST_CASE("projected grids are cluster states") {
    for (int length = 2; length <= 6; ++length)
        REQUIRE(verify_lemma3(length) >= 1.0 - 1e-12);
    REQUIRE(verify_lemma3(2, 3) >= 1.0 - 1e-12);
    REQUIRE(verify_lemma3(2, 2) >= 1.0 - 1e-12);
    REQUIRE_THROWS_AS(verify_lemma3(11), std::invalid_argument);
}

TEST_CASE("site projections commute with site ordering") {
    const QubitState grid = build_grid_state(line_grid(4));
    const auto parts = line_grid(4).partition();

    const QubitState forward = pi_project(grid, parts);
    const std::vector<std::size_t> shuffled = {2, 0, 3, 1};
    std::vector<std::vector<int>> reordered;
    for (std::size_t i : shuffled) reordered.push_back(parts[i]);
    const QubitState mixed = pi_project(grid, reordered);

    // Output qubit i of the shuffled run holds site shuffled[i]; permuting
    // the forward result the same way must reproduce it exactly.
    std::vector<int> perm(shuffled.begin(), shuffled.end());
    REQUIRE(max_amp_diff(mixed, permute_qubits(forward, perm)) <= 1e-12);
}

TEST_CASE("the bond Bell basis is orthonormal and CZ maps it to sign states") {
    const auto basis = hbell_basis();
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            const cplx g = inner(basis[a], basis[b]);
            REQUIRE(std::abs(g - (a == b ? cplx{1.0, 0.0} : cplx{0.0, 0.0})) <= 1e-12);
        }

    const QubitState pp = two_qubit({1, 1, 1, 1});
    const QubitState pm = two_qubit({1, -1, 1, -1});
    const QubitState mp = two_qubit({1, 1, -1, -1});
    const QubitState mm = two_qubit({1, -1, -1, 1});

    REQUIRE(max_amp_diff(apply_unitary(basis[0], cz(), {0, 1}), pp) <= 1e-12);
    REQUIRE(max_amp_diff(apply_unitary(basis[1], cz(), {0, 1}), pm) <= 1e-12);
    REQUIRE(max_amp_diff(apply_unitary(basis[2], cz(), {0, 1}), mp) <= 1e-12);
    // The fourth image is |--> only up to a global sign.
    REQUIRE(fidelity_up_to_phase(apply_unitary(basis[3], cz(), {0, 1}), mm) >= 1.0 - 1e-12);
}

TEST_CASE("rotated Bell bases split into diagonal and off-diagonal pairs") {
    for (double theta : {0.0, 0.7, 2.9, -1.3}) {
        const auto basis = rotated_bell_w(theta);

        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                const cplx g = inner(basis[a].state, basis[b].state);
                REQUIRE(std::abs(g - (a == b ? cplx{1.0, 0.0} : cplx{0.0, 0.0})) <= 1e-12);
            }

        const cplx phase = std::exp(cplx{0.0, theta});
        const double r = 1.0 / std::sqrt(2.0);
        for (int a = 0; a < 2; ++a) {
            REQUIRE(basis[a].diagonal);
            REQUIRE(basis[a].sign == (a == 0 ? 1 : -1));
            const auto& amps = basis[a].state.amps;
            REQUIRE(std::abs(amps[0] - cplx{r, 0.0}) <= 1e-12);
            REQUIRE(std::abs(amps[1]) <= 1e-12);
            REQUIRE(std::abs(amps[2]) <= 1e-12);
            REQUIRE(std::abs(amps[3] - phase * r * static_cast<double>(basis[a].sign)) <= 1e-12);
        }
        for (int a = 2; a < 4; ++a) {
            REQUIRE_FALSE(basis[a].diagonal);
            REQUIRE(basis[a].sign == 0);
            REQUIRE(std::abs(basis[a].state.amps[0]) <= 1e-12);
            REQUIRE(std::abs(basis[a].state.amps[3]) <= 1e-12);
        }
    }
}

TEST_CASE("cluster measurements match teleportation through a bond") {
    Rng rng(7);
    ClusterGraph pair;
    pair.sites = {0, 1};
    pair.add_edge(0, 1);

    for (double theta : {0.0, 0.9, 2.3, -1.2}) {
        const auto bell = rotated_bell_w(theta);
        for (int trial = 0; trial < 3; ++trial) {
            const QubitState psi = trial == 0 ? QubitState(1, {cplx{1, 0}, cplx{1, 0}}, true).normalized()
                                              : rng.random_state(1);

            // Measuring site 0 of CZ(|psi>|+>) in the angled basis...
            const QubitState cluster = build_cluster(pair, {{0, psi}});
            // ...versus measuring (input, bond half) in the rotated Bell basis.
            const QubitState wired = tensor(psi, hbond());

            for (int s = 0; s < 2; ++s) {
                const QubitState post =
                    project_bra(cluster, meas_ket(s, theta), {0}).normalized();
                const QubitState branch =
                    project_bra(wired, bell[s].state.amps, {0, 1}).normalized();
                REQUIRE(fidelity_up_to_phase(post, branch) >= 1.0 - 1e-10);
            }
        }
    }
}
