#pragma once

// Dense statevector simulator.  Basis index bit q holds the state of qubit q
// (qubit 0 = least significant bit), consistent with the Pauli text convention
// where the leftmost letter acts on qubit 0.

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "sse/circuit.hpp"
#include "sse/errors.hpp"
#include "sse/pauli.hpp"
#include "sse/rng.hpp"

namespace sse {

inline constexpr int kMaxSimQubits = 14;

inline void check_sim_qubits(int n, int max_qubits) {
    if (n < 1) throw std::invalid_argument("need at least one qubit");
    if (n > max_qubits)
        throw NumericalError("dimension too large: n=" + std::to_string(n) + " exceeds " +
                             std::to_string(max_qubits) + "-qubit simulator limit");
}

struct StateVector {
    int n = 0;
    Eigen::VectorXcd amps;

    StateVector() = default;

    // |0...0>
    explicit StateVector(int n_qubits) : n(n_qubits) {
        check_sim_qubits(n_qubits, kMaxSimQubits);
        amps = Eigen::VectorXcd::Zero(1L << n);
        amps[0] = 1.0;
    }

    StateVector(int n_qubits, Eigen::VectorXcd a) : n(n_qubits), amps(std::move(a)) {
        check_sim_qubits(n_qubits, kMaxSimQubits);
        if (amps.size() != (1L << n)) throw std::invalid_argument("amplitude size mismatch");
    }

    long dim() const { return amps.size(); }
    double norm() const { return amps.norm(); }
};

namespace detail {

inline void apply_1q(Eigen::VectorXcd& a, int q, cplx u00, cplx u01, cplx u10, cplx u11) {
    const long dim = a.size(), bit = 1L << q;
    for (long base = 0; base < dim; ++base) {
        if (base & bit) continue;
        const cplx lo = a[base], hi = a[base | bit];
        a[base] = u00 * lo + u01 * hi;
        a[base | bit] = u10 * lo + u11 * hi;
    }
}

inline void apply_cnot(Eigen::VectorXcd& a, int ctrl, int tgt) {
    const long dim = a.size(), cb = 1L << ctrl, tb = 1L << tgt;
    for (long i = 0; i < dim; ++i)
        if ((i & cb) && !(i & tb)) std::swap(a[i], a[i | tb]);
}

inline void apply_cz(Eigen::VectorXcd& a, int q0, int q1) {
    const long dim = a.size(), b0 = 1L << q0, b1 = 1L << q1;
    for (long i = 0; i < dim; ++i)
        if ((i & b0) && (i & b1)) a[i] = -a[i];
}

struct GateMatrix {
    cplx u00, u01, u10, u11;
};

inline GateMatrix gate_matrix(GateKind kind, double angle) {
    const double c = std::cos(angle / 2), s = std::sin(angle / 2);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    switch (kind) {
        case GateKind::RX: return {{c, 0}, {0, -s}, {0, -s}, {c, 0}};
        case GateKind::RY: return {{c, 0}, {-s, 0}, {s, 0}, {c, 0}};
        case GateKind::RZ: return {{c, -s}, {0, 0}, {0, 0}, {c, s}};
        case GateKind::H: return {{inv_sqrt2, 0}, {inv_sqrt2, 0}, {inv_sqrt2, 0}, {-inv_sqrt2, 0}};
        case GateKind::X: return {{0, 0}, {1, 0}, {1, 0}, {0, 0}};
        default: throw std::invalid_argument("not a single-qubit gate");
    }
}

}  // namespace detail

inline void apply_gate(StateVector& psi, const Gate& g) {
    if (g.q0 < 0 || g.q0 >= psi.n || (is_two_qubit(g.kind) && (g.q1 < 0 || g.q1 >= psi.n)))
        throw std::invalid_argument("gate qubit out of range");
    switch (g.kind) {
        case GateKind::CNOT: detail::apply_cnot(psi.amps, g.q0, g.q1); break;
        case GateKind::CZ: detail::apply_cz(psi.amps, g.q0, g.q1); break;
        default: {
            auto u = detail::gate_matrix(g.kind, g.angle);
            detail::apply_1q(psi.amps, g.q0, u.u00, u.u01, u.u10, u.u11);
        }
    }
}

inline void apply_circuit(StateVector& psi, const Circuit& c) {
    if (c.n != psi.n) throw std::invalid_argument("circuit/state qubit count mismatch");
    for (const auto& g : c.gates) apply_gate(psi, g);
    if (std::abs(psi.norm() - 1.0) > 1e-9)
        throw NumericalError("statevector norm drifted after circuit");
}

// |phi> = phase * word |psi>.  P|b> = i^{|x&z|} (-1)^{|z&b|} |b ^ x>.
inline StateVector apply_pauli(const StateVector& psi, const PhasedPauli& p) {
    if (p.word.n != psi.n) throw std::invalid_argument("pauli/state qubit count mismatch");
    StateVector out(psi.n, Eigen::VectorXcd::Zero(psi.dim()));
    const cplx base = p.phase() * i_pow(std::popcount(p.word.x & p.word.z));
    for (long b = 0; b < psi.dim(); ++b) {
        const double sign = (std::popcount(p.word.z & static_cast<std::uint64_t>(b)) & 1) ? -1 : 1;
        out.amps[b ^ static_cast<long>(p.word.x)] = base * sign * psi.amps[b];
    }
    return out;
}

// <psi| word |psi>, exactly real for Hermitian words; the O(eps) imaginary
// rounding residue is checked and discarded.
inline double expectation(const StateVector& psi, const PauliString& word) {
    if (word.n != psi.n) throw std::invalid_argument("pauli/state qubit count mismatch");
    const cplx y_phase = i_pow(std::popcount(word.x & word.z));
    cplx acc = 0;
    for (long b = 0; b < psi.dim(); ++b) {
        const double sign = (std::popcount(word.z & static_cast<std::uint64_t>(b)) & 1) ? -1 : 1;
        acc += std::conj(psi.amps[b ^ static_cast<long>(word.x)]) * sign * psi.amps[b];
    }
    acc *= y_phase;
    if (std::abs(acc.imag()) > 1e-10)
        throw NumericalError("non-real expectation of a Hermitian Pauli word");
    return acc.real();
}

inline double expectation(const StateVector& psi, const ObservableSum& h) {
    double e = 0;
    for (const auto& t : h.terms) e += t.coeff * expectation(psi, t.word);
    return e;
}

inline cplx inner(const StateVector& a, const StateVector& b) {
    if (a.n != b.n) throw std::invalid_argument("qubit count mismatch");
    return a.amps.dot(b.amps);  // Eigen's dot conjugates the left argument
}

// Haar-like random state: iid complex Gaussian amplitudes, normalised.
inline StateVector random_state(int n, std::uint64_t seed) {
    check_sim_qubits(n, kMaxSimQubits);
    auto rng = make_engine(seed, 0x5245414e444f4dULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXcd a(1L << n);
    for (long i = 0; i < a.size(); ++i) a[i] = cplx(gauss(rng), gauss(rng));
    a.normalize();
    return StateVector(n, std::move(a));
}

}  // namespace sse
