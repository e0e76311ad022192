#include <catch2/catch_amalgamated.hpp>

#include <mbqc/gates.hpp>
#include <mbqc/pauli.hpp>
#include <mbqc/random.hpp>

using namespace mbqc;

namespace {

double matrix_fidelity(const ComplexMatrix& a, const ComplexMatrix& b) {
    const double na = std::sqrt(std::abs((a.adjoint() * a).trace()));
    const double nb = std::sqrt(std::abs((b.adjoint() * b).trace()));
    return std::abs((a.adjoint() * b).trace()) / (na * nb);
}

PauliOp make_pauli(int n, int phase, std::uint64_t x, std::uint64_t z) {
    PauliOp p;
    p.n = n;
    p.phase_pow = phase;
    p.xmask = x;
    p.zmask = z;
    return p;
}

}  // namespace

TEST_CASE("pauli product phases") {
    const PauliOp X = PauliOp::single(1, 0, true, false);
    const PauliOp Z = PauliOp::single(1, 0, false, true);

    REQUIRE(pauli_mul(X, X).is_identity());

    // Z X = i Y with Y = i X Z: product has phase i^2 and masks X,Z.
    const PauliOp zx = pauli_mul(Z, X);
    REQUIRE(zx.phase_pow == 2);
    REQUIRE(zx.xmask == 1);
    REQUIRE(zx.zmask == 1);
    REQUIRE(pauli_matrix(zx).approx_equal(pauli_z() * pauli_x(), 1e-15));
    REQUIRE(pauli_matrix(zx).approx_equal(pauli_y() * cplx(0, 1), 1e-15));

    // Y in canonical form is i X Z.
    REQUIRE(pauli_matrix(make_pauli(1, 1, 1, 1)).approx_equal(pauli_y(), 1e-15));

    // (X (x) Z) * (Z (x) Z) = (XZ) (x) I up to phase bookkeeping.
    const PauliOp a = make_pauli(2, 0, 0b01, 0b10);
    const PauliOp b = make_pauli(2, 0, 0b00, 0b11);
    const PauliOp ab = pauli_mul(a, b);
    REQUIRE(ab.xmask == 0b01);
    REQUIRE(ab.zmask == 0b01);
    REQUIRE(pauli_matrix(ab).approx_equal(pauli_matrix(a) * pauli_matrix(b), 1e-15));

    REQUIRE_THROWS_AS(pauli_mul(X, PauliOp::identity(2)), std::invalid_argument);
}

TEST_CASE("pauli_matrix is a group homomorphism") {
    Rng rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform() * 3);
        auto rand_pauli = [&] {
            return make_pauli(n, static_cast<int>(rng.uniform() * 4),
                              static_cast<std::uint64_t>(rng.uniform() * (1 << n)),
                              static_cast<std::uint64_t>(rng.uniform() * (1 << n)));
        };
        const PauliOp p = rand_pauli(), q = rand_pauli();
        REQUIRE(pauli_matrix(pauli_mul(p, q))
                    .approx_equal(pauli_matrix(p) * pauli_matrix(q), 1e-12));
        // Associativity at the mask/phase level.
        const PauliOp r = rand_pauli();
        REQUIRE(pauli_mul(pauli_mul(p, q), r) == pauli_mul(p, pauli_mul(q, r)));
    }
}

TEST_CASE("pauli_apply matches dense action") {
    Rng rng(4);
    const PauliOp p = make_pauli(3, 3, 0b101, 0b011);
    QubitState s = rng.random_state(3);
    QubitState fast = pauli_apply(p, s);
    QubitState dense = apply_unitary(s, pauli_matrix(p), {0, 1, 2});
    for (std::size_t i = 0; i < s.dim(); ++i)
        REQUIRE(std::abs(fast.amps[i] - dense.amps[i]) < 1e-12);
}

TEST_CASE("recognize_pauli") {
    auto rec = recognize_pauli(pauli_y());
    REQUIRE(rec);
    REQUIRE(rec->first.xmask == 1);
    REQUIRE(rec->first.zmask == 1);
    REQUIRE(std::abs(rec->second - cplx(0, 1)) < 1e-12);  // Y = i XZ

    // Scaled Pauli with arbitrary phase.
    auto rec2 = recognize_pauli(kron(pauli_x(), pauli_z()) * std::exp(cplx(0, 0.7)));
    REQUIRE(rec2);
    REQUIRE(rec2->first.xmask == 0b01);  // X on qubit 0
    REQUIRE(rec2->first.zmask == 0b10);  // Z on qubit 1
    REQUIRE(std::abs(rec2->second - std::exp(cplx(0, 0.7))) < 1e-12);

    REQUIRE_FALSE(recognize_pauli(hadamard()));
    REQUIRE_FALSE(recognize_pauli(rx(0.4)));
    REQUIRE_FALSE(recognize_pauli(pauli_x() * cplx(0.5)));
}

TEST_CASE("propagation table against dense matrices") {
    // All supported kinds, all nonidentity local Paulis, arbitrary start phase.
    std::vector<Gate> gates_1q = {
        Gate::make(GateKind::X, {0}),          Gate::make(GateKind::Y, {0}),
        Gate::make(GateKind::Z, {0}),          Gate::make(GateKind::H, {0}),
        Gate::make(GateKind::S, {0}),          Gate::make(GateKind::Phase, {0}, 0.7),
        Gate::make(GateKind::RotX, {0}, 1.1),  Gate::make(GateKind::RotZ, {0}, -0.4),
        Gate::make(GateKind::W, {0}, 0.9)};
    std::vector<Gate> gates_2q = {Gate::make(GateKind::CZ, {0, 1}),
                                  Gate::make(GateKind::CX, {0, 1})};

    auto is_clifford_kind = [](GateKind k) {
        return k == GateKind::X || k == GateKind::Y || k == GateKind::Z ||
               k == GateKind::H || k == GateKind::S || k == GateKind::CZ ||
               k == GateKind::CX;
    };

    auto check = [&](const Gate& g, const PauliOp& p) {
        auto [p2, g2] = propagate(g, p);
        const ComplexMatrix lhs = matrix_of(g) * pauli_matrix(p);
        const ComplexMatrix rhs = pauli_matrix(p2) * matrix_of(g2);
        REQUIRE(matrix_fidelity(lhs, rhs) > 1.0 - 1e-10);
        if (is_clifford_kind(g.kind)) {
            REQUIRE(lhs.approx_equal(rhs, 1e-10));  // exact, including phase
            REQUIRE(g2.kind == g.kind);
            REQUIRE(g2.theta == g.theta);
        } else {
            REQUIRE(g2.kind == g.kind);
        }
    };

    for (const auto& g : gates_1q)
        for (int mask = 1; mask < 4; ++mask)
            for (int ph = 0; ph < 4; ++ph)
                check(g, make_pauli(1, ph, mask & 1, (mask >> 1) & 1));

    for (const auto& g : gates_2q)
        for (int mask = 1; mask < 16; ++mask)
            check(g, make_pauli(2, 0, mask & 3, (mask >> 2) & 3));
}

TEST_CASE("propagation named relations") {
    // rz(t) X = X rz(-t)
    {
        auto [p, g] = propagate(Gate::make(GateKind::RotZ, {0}, 0.3),
                                PauliOp::single(1, 0, true, false));
        REQUIRE(p == PauliOp::single(1, 0, true, false));
        REQUIRE(g.theta == -0.3);
    }
    // cz (X (x) I) = (X (x) Z) cz
    {
        auto [p, g] = propagate(Gate::make(GateKind::CZ, {0, 1}),
                                PauliOp::single(2, 0, true, false));
        REQUIRE(p.xmask == 0b01);
        REQUIRE(p.zmask == 0b10);
        REQUIRE(g.kind == GateKind::CZ);
    }
    // w(t) X ~ Z w(-t)
    {
        auto [p, g] = propagate(Gate::make(GateKind::W, {0}, 0.9),
                                PauliOp::single(1, 0, true, false));
        REQUIRE(p == PauliOp::single(1, 0, false, true));
        REQUIRE(g.theta == -0.9);
    }
    // H X = Z H
    {
        auto [p, g] = propagate(Gate::make(GateKind::H, {0}),
                                PauliOp::single(1, 0, true, false));
        REQUIRE(p == PauliOp::single(1, 0, false, true));
        REQUIRE(g.kind == GateKind::H);
    }
}

TEST_CASE("clifford verification") {
    REQUIRE(is_clifford(hadamard(), 1).clifford);
    REQUIRE(is_clifford(s_gate(), 1).clifford);
    REQUIRE(is_clifford(pauli_z(), 1).clifford);
    REQUIRE(is_clifford(cz(), 2).clifford);
    REQUIRE(is_clifford(cx(), 2).clifford);
    REQUIRE_FALSE(is_clifford(rx(0.3), 1).clifford);
    REQUIRE_FALSE(is_clifford(w_gate(0.3), 1).clifford);
    REQUIRE(is_clifford(w_gate(kPi / 2.0), 1).clifford);  // H * s_gate

    // Witness table entries really conjugate: u gen u^dag = image.
    auto w = is_clifford(s_gate(), 1);
    for (const auto& [gen, img] : w.table) {
        ComplexMatrix lhs = s_gate() * pauli_matrix(gen) * s_gate().adjoint();
        REQUIRE(lhs.approx_equal(pauli_matrix(img), 1e-9));
    }

    // Closure under composition: random words in the generator set.
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        Circuit c;
        c.n = 2;
        const int len = 1 + static_cast<int>(rng.uniform() * 6);
        for (int i = 0; i < len; ++i) {
            const double pick = rng.uniform();
            const int q = rng.uniform() < 0.5 ? 0 : 1;
            if (pick < 0.25)
                c.gates.push_back(Gate::make(GateKind::Z, {q}));
            else if (pick < 0.5)
                c.gates.push_back(Gate::make(GateKind::H, {q}));
            else if (pick < 0.75)
                c.gates.push_back(Gate::make(GateKind::S, {q}));
            else
                c.gates.push_back(Gate::make(GateKind::CX, {q, 1 - q}));
        }
        REQUIRE(is_clifford(circuit_unitary(c), 2).clifford);
    }

    REQUIRE_THROWS_AS(is_clifford(ComplexMatrix::from_rows({{1, 1}, {0, 1}}), 1),
                      std::invalid_argument);
}

TEST_CASE("outcome records and parity sets") {
    OutcomeRecord r;
    r.set(3, 1);
    r.set(5, 0);
    REQUIRE(r.get(3) == 1);
    REQUIRE_THROWS_AS(r.set(3, 0), std::logic_error);
    REQUIRE_THROWS_AS(r.get(7), std::out_of_range);

    ParitySet s = ParitySet::of({3, 5, 3});  // duplicate toggles out
    REQUIRE(s.ids == std::vector<int>{5});
    s.toggle(3);
    REQUIRE(s.resolve(r) == 1);  // s3 xor s5 = 1
    ParitySet t = ParitySet::of({3});
    s.merge(t);  // removes 3 again
    REQUIRE(s.ids == std::vector<int>{5});
    REQUIRE(s.resolve(r) == 0);
}

TEST_CASE("frame resolution") {
    // Frame X^{s2+s4} Z^{s1+s3} on a single output site.
    PauliFrame f;
    f[10].x_deps = ParitySet::of({2, 4});
    f[10].z_deps = ParitySet::of({1, 3});

    OutcomeRecord r;
    r.set(1, 1);
    r.set(2, 0);
    r.set(3, 1);
    r.set(4, 1);

    const PauliOp p = frame_resolve(f, r, {10});
    REQUIRE(p.xmask == 1);  // s2 xor s4 = 1
    REQUIRE(p.zmask == 0);  // s1 xor s3 = 0
    REQUIRE(p.phase_pow == 0);

    // XOR-set {s1, s3} with both bits 1 resolves to exponent 0.
    PauliFrame g;
    g[0].x_deps = ParitySet::of({1, 3});
    REQUIRE(frame_resolve(g, r, {0}).is_identity());

    // Empty frame -> identity.
    REQUIRE(frame_resolve(PauliFrame{}, r, {0, 1}).is_identity());

    // Unresolved id -> error.
    PauliFrame h;
    h[0].z_deps = ParitySet::of({99});
    REQUIRE_THROWS_AS(frame_resolve(h, r, {0}), std::out_of_range);

    // Homomorphism: resolve(f1 * f2) = resolve(f1) * resolve(f2) up to phase.
    PauliFrame f2;
    f2[10].x_deps = ParitySet::of({1});
    f2[10].z_deps = ParitySet::of({3, 4});
    const PauliOp lhs = frame_resolve(frame_mul(f, f2), r, {10});
    const PauliOp rhs = pauli_mul(frame_resolve(f, r, {10}), frame_resolve(f2, r, {10}));
    REQUIRE(lhs.xmask == rhs.xmask);
    REQUIRE(lhs.zmask == rhs.zmask);
}

TEST_CASE("parity tree depth") {
    REQUIRE(parity_depth(1) == 0);
    REQUIRE(parity_depth(2) == 1);
    REQUIRE(parity_depth(3) == 2);
    REQUIRE(parity_depth(5) == 3);
    REQUIRE(parity_depth(8) == 3);
    REQUIRE(parity_depth(9) == 4);
    REQUIRE_THROWS_AS(parity_depth(0), std::invalid_argument);
}
