// gates.hpp
//
// Standard gate matrices and the rotation/decomposition conventions used
// throughout:
//   rx(t) = exp(-i t X) = cos t I - i sin t X        (full angle)
//   rz(t) = diag(e^{-it}, e^{it})                    (full angle)
//   phase_gate(t) = diag(1, e^{it})
//   w_gate(t) = (1/sqrt2) [[1, e^{it}], [1, -e^{it}]] = hadamard * phase_gate(t)
//   s_gate = diag(1, i) = phase_gate(pi/2)
// Two-qubit matrices index the first target as the most significant bit;
// cx maps |i>|j> to |i>|i xor j>.

#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "state.hpp"

namespace mbqc {

inline const double kPi = std::numbers::pi;

inline ComplexMatrix identity2() { return ComplexMatrix::identity(2); }

inline ComplexMatrix pauli_x() {
    return ComplexMatrix::from_rows({{0, 1}, {1, 0}});
}

inline ComplexMatrix pauli_y() {
    return ComplexMatrix::from_rows({{0, cplx(0, -1)}, {cplx(0, 1), 0}});
}

inline ComplexMatrix pauli_z() {
    return ComplexMatrix::from_rows({{1, 0}, {0, -1}});
}

inline ComplexMatrix hadamard() {
    const double s = 1.0 / std::sqrt(2.0);
    return ComplexMatrix::from_rows({{s, s}, {s, -s}});
}

inline ComplexMatrix phase_gate(double t) {
    return ComplexMatrix::from_rows({{1, 0}, {0, std::exp(cplx(0, t))}});
}

inline ComplexMatrix s_gate() { return phase_gate(kPi / 2.0); }

inline ComplexMatrix rx(double t) {
    const cplx c = std::cos(t), ms = cplx(0, -std::sin(t));
    return ComplexMatrix::from_rows({{c, ms}, {ms, c}});
}

inline ComplexMatrix rz(double t) {
    return ComplexMatrix::from_rows({{std::exp(cplx(0, -t)), 0}, {0, std::exp(cplx(0, t))}});
}

inline ComplexMatrix w_gate(double t) {
    const double s = 1.0 / std::sqrt(2.0);
    const cplx e = std::exp(cplx(0, t));
    return ComplexMatrix::from_rows({{s, s * e}, {s, -s * e}});
}

inline ComplexMatrix cz() {
    ComplexMatrix m = ComplexMatrix::identity(4);
    m(3, 3) = -1.0;
    return m;
}

inline ComplexMatrix cx() {
    ComplexMatrix m(4, 4);
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
    return m;
}

// --- common states ------------------------------------------------------

inline QubitState plus_state() {
    const double s = 1.0 / std::sqrt(2.0);
    return QubitState(1, {s, s});
}

// Maximally entangled pair (|00> + |11>)/sqrt2 with local Pauli labels:
// bell(c, d) = (Z^c X^d on the first qubit) applied to bell(0, 0).
inline QubitState bell(int c, int d) {
    QubitState b(2, {1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0)});
    if (d) b = apply_unitary(b, pauli_x(), {0});
    if (c) b = apply_unitary(b, pauli_z(), {0});
    return b;
}

// Bond state cz |+>|+> = (|00> + |01> + |10> - |11>)/2.
inline QubitState hbond() {
    return QubitState(2, {0.5, 0.5, 0.5, -0.5});
}

// Measurement-basis kets for the equatorial family:
//   meas_ket(s, t) = (|0> + (-1)^s e^{it} |1>)/sqrt2, outcome 0 = "+" branch.
inline std::vector<cplx> meas_ket(int s, double t) {
    const double r = 1.0 / std::sqrt(2.0);
    const cplx e = std::exp(cplx(0, t)) * ((s & 1) ? -1.0 : 1.0);
    return {r, r * e};
}

inline std::vector<cplx> z_ket(int s) {
    return (s & 1) ? std::vector<cplx>{0.0, 1.0} : std::vector<cplx>{1.0, 0.0};
}

// Expand a k-qubit operator to the full register (identity elsewhere).
inline ComplexMatrix expand_to_register(const ComplexMatrix& u,
                                        const std::vector<int>& targets, int n) {
    const std::size_t dim = std::size_t{1} << n;
    const int k = static_cast<int>(targets.size());
    if (u.rows() != (std::size_t{1} << k) || u.cols() != u.rows())
        throw std::invalid_argument("expand_to_register: operator size != 2^targets");
    ComplexMatrix full(dim, dim);
    for (std::size_t col = 0; col < dim; ++col) {
        std::size_t sub = 0;
        for (int i = 0; i < k; ++i)
            sub = (sub << 1) | ((col >> (n - 1 - targets[i])) & 1);
        for (std::size_t r = 0; r < u.rows(); ++r) {
            const cplx v = u(r, sub);
            if (v == cplx{0.0, 0.0}) continue;
            std::size_t row = col;
            for (int i = 0; i < k; ++i) {
                const std::size_t bit = std::size_t{1} << (n - 1 - targets[i]);
                row = (row & ~bit) | (((r >> (k - 1 - i)) & 1) ? bit : 0);
            }
            full(row, col) += v;
        }
    }
    return full;
}

// --- Euler-style decompositions ------------------------------------------

namespace detail {

// Split u into su2 * global phase: u = phase * su, det(su) = 1.
inline ComplexMatrix to_su2(const ComplexMatrix& u) {
    if (u.rows() != 2 || u.cols() != 2)
        throw std::invalid_argument("to_su2: expected 2x2");
    const cplx det = u(0, 0) * u(1, 1) - u(0, 1) * u(1, 0);
    const cplx root = std::sqrt(det);
    if (std::abs(root) < 1e-12) throw std::invalid_argument("to_su2: singular matrix");
    return u * (1.0 / root);
}

inline double wrap_2pi(double t) {
    t = std::fmod(t, 2.0 * kPi);
    if (t < 0) t += 2.0 * kPi;
    if (t >= 2.0 * kPi) t -= 2.0 * kPi;
    return t;
}

}  // namespace detail

// Angles (a, b, c) with u proportional to rz(a) * rx(b) * rz(c),
// b in [0, pi/2], a and c in [0, 2pi).
inline std::array<double, 3> zxz_decompose(const ComplexMatrix& u) {
    if (!u.is_unitary(kUnitaryTol))
        throw std::invalid_argument("zxz_decompose: input is not unitary");
    const ComplexMatrix su = detail::to_su2(u);
    const cplx alpha = su(0, 0);   // cos b * e^{-i(a+c)}
    const cplx beta = su(0, 1);    // -i sin b * e^{-i(a-c)}
    const double b = std::atan2(std::abs(beta), std::abs(alpha));
    double a, c;
    if (std::abs(beta) < 1e-12) {          // diagonal
        c = 0.0;
        a = -std::arg(alpha);
    } else if (std::abs(alpha) < 1e-12) {  // antidiagonal
        c = 0.0;
        a = -std::arg(beta) - kPi / 2.0;
    } else {
        const double sum = -std::arg(alpha);
        const double diff = -std::arg(beta) - kPi / 2.0;
        a = 0.5 * (sum + diff);
        c = 0.5 * (sum - diff);
    }
    return {detail::wrap_2pi(a), b, detail::wrap_2pi(c)};
}

struct EulerAngles {
    double xi, eta, zeta;  // u ~ rx(zeta) * rz(eta) * rx(xi), rx(xi) acts first
};

struct WAngles {
    double theta1, theta2, theta3;  // u ~ w(0) w(theta1) w(theta2) w(theta3)
};

// Euler angles with eta in [0, pi/2], xi and zeta in [0, 2pi).
inline EulerAngles euler_xzx(const ComplexMatrix& u) {
    const ComplexMatrix h = hadamard();
    const auto [a, b, c] = zxz_decompose(h * u * h);
    return {c, b, a};  // xi = c, eta = b, zeta = a
}

// Triple with u ~ w(0) w(t1) w(t2) w(t3); w(t3) acts first.
// Uses w(0) w(a) w(b) w(c) = phase(a) H phase(b) H phase(c)
//                          ~ rz(a/2) rx(b/2) rz(c/2).
inline WAngles w_decompose(const ComplexMatrix& u) {
    const auto [alpha, beta, gamma] = zxz_decompose(u);
    return {detail::wrap_2pi(2.0 * alpha), detail::wrap_2pi(2.0 * beta),
            detail::wrap_2pi(2.0 * gamma)};
}

// --- gate catalog over named kinds ----------------------------------------

enum class GateKind { X, Y, Z, H, S, Phase, RotX, RotZ, W, CZ, CX };

inline int gate_arity(GateKind k) {
    return (k == GateKind::CZ || k == GateKind::CX) ? 2 : 1;
}

inline bool gate_uses_theta(GateKind k) {
    return k == GateKind::Phase || k == GateKind::RotX || k == GateKind::RotZ ||
           k == GateKind::W;
}

inline const char* gate_kind_name(GateKind k) {
    switch (k) {
        case GateKind::X: return "X";
        case GateKind::Y: return "Y";
        case GateKind::Z: return "Z";
        case GateKind::H: return "H";
        case GateKind::S: return "P_pi4";
        case GateKind::Phase: return "Phase";
        case GateKind::RotX: return "Rx";
        case GateKind::RotZ: return "Rz";
        case GateKind::W: return "W";
        case GateKind::CZ: return "CZ";
        case GateKind::CX: return "CX";
    }
    throw std::logic_error("gate_kind_name: bad kind");
}

inline GateKind gate_kind_from_name(const std::string& s) {
    if (s == "X") return GateKind::X;
    if (s == "Y") return GateKind::Y;
    if (s == "Z") return GateKind::Z;
    if (s == "H") return GateKind::H;
    if (s == "P_pi4" || s == "S") return GateKind::S;
    if (s == "Phase") return GateKind::Phase;
    if (s == "Rx") return GateKind::RotX;
    if (s == "Rz") return GateKind::RotZ;
    if (s == "W") return GateKind::W;
    if (s == "CZ") return GateKind::CZ;
    if (s == "CX") return GateKind::CX;
    throw std::invalid_argument("unknown gate kind: " + s);
}

// One gate application; targets[0] is the control for CX.
struct Gate {
    GateKind kind;
    std::vector<int> targets;
    double theta = 0.0;

    static Gate make(GateKind k, std::vector<int> t, double th = 0.0) {
        Gate g{k, std::move(t), th};
        if (static_cast<int>(g.targets.size()) != gate_arity(k))
            throw std::invalid_argument("Gate: arity mismatch for kind");
        return g;
    }
};

inline ComplexMatrix matrix_of(const Gate& g) {
    switch (g.kind) {
        case GateKind::X: return pauli_x();
        case GateKind::Y: return pauli_y();
        case GateKind::Z: return pauli_z();
        case GateKind::H: return hadamard();
        case GateKind::S: return s_gate();
        case GateKind::Phase: return phase_gate(g.theta);
        case GateKind::RotX: return rx(g.theta);
        case GateKind::RotZ: return rz(g.theta);
        case GateKind::W: return w_gate(g.theta);
        case GateKind::CZ: return cz();
        case GateKind::CX: return cx();
    }
    throw std::logic_error("matrix_of: bad kind");
}

// Ordered gate list acting on a fixed-width register (earliest first).
struct Circuit {
    int n = 0;
    std::vector<Gate> gates;

    void validate() const {
        if (n < 0) throw std::invalid_argument("Circuit: negative qubit count");
        for (const auto& g : gates) {
            if (static_cast<int>(g.targets.size()) != gate_arity(g.kind))
                throw std::invalid_argument("Circuit: gate arity mismatch");
            for (int t : g.targets)
                if (t < 0 || t >= n)
                    throw std::invalid_argument("Circuit: target out of range");
            if (g.targets.size() == 2 && g.targets[0] == g.targets[1])
                throw std::invalid_argument("Circuit: duplicate targets");
        }
    }
};

inline QubitState apply_circuit(const Circuit& c, const QubitState& in) {
    if (in.n != c.n) throw std::invalid_argument("apply_circuit: width mismatch");
    QubitState s = in;
    for (const auto& g : c.gates) apply_unitary_inplace(s, matrix_of(g), g.targets);
    return s;
}

inline ComplexMatrix circuit_unitary(const Circuit& c) {
    ComplexMatrix u = ComplexMatrix::identity(std::size_t{1} << c.n);
    for (const auto& g : c.gates)
        u = expand_to_register(matrix_of(g), g.targets, c.n) * u;
    return u;
}

}  // namespace mbqc
