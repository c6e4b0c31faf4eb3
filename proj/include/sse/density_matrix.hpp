#pragma once

// Dense density-matrix simulator with a depolarizing noise model.  Noise is
// applied after every gate: with probability p the gate's target qubit(s) are
// replaced by the maximally mixed state,
//
//     rho -> (1 - p) rho + p * (I/2^t (x) Tr_targets rho),  t = 1 or 2.

#include <Eigen/Dense>
#include <cmath>

#include "sse/circuit.hpp"
#include "sse/errors.hpp"
#include "sse/pauli.hpp"
#include "sse/statevector.hpp"

namespace sse {

inline constexpr int kMaxDensityQubits = 8;

struct DensityMatrix {
    int n = 0;
    Eigen::MatrixXcd rho;

    DensityMatrix() = default;

    // |0...0><0...0|
    explicit DensityMatrix(int n_qubits) : n(n_qubits) {
        check_sim_qubits(n_qubits, kMaxDensityQubits);
        const long dim = 1L << n;
        rho = Eigen::MatrixXcd::Zero(dim, dim);
        rho(0, 0) = 1.0;
    }

    static DensityMatrix from_pure(const StateVector& psi) {
        check_sim_qubits(psi.n, kMaxDensityQubits);
        DensityMatrix dm(psi.n);
        dm.rho = psi.amps * psi.amps.adjoint();
        return dm;
    }

    long dim() const { return rho.rows(); }
    double trace_real() const { return rho.trace().real(); }
    double purity() const { return (rho * rho).trace().real(); }

    double hermiticity_error() const {
        return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    }
};

struct NoiseModel {
    double p1 = 0.0;  // depolarizing probability after each single-qubit gate
    double p2 = 0.0;  // after each two-qubit gate (convention: p2 = 5 * p1)

    static NoiseModel from_p1(double p1) { return {p1, 5.0 * p1}; }
};

namespace detail {

// rho -> (U (x) 1) rho: apply a 1q gate to every column.
inline void left_1q(Eigen::MatrixXcd& rho, int q, const GateMatrix& u) {
    const long dim = rho.rows(), bit = 1L << q;
    for (long c = 0; c < dim; ++c)
        for (long base = 0; base < dim; ++base) {
            if (base & bit) continue;
            const cplx lo = rho(base, c), hi = rho(base | bit, c);
            rho(base, c) = u.u00 * lo + u.u01 * hi;
            rho(base | bit, c) = u.u10 * lo + u.u11 * hi;
        }
}

// rho -> rho U^dagger: apply conj(U) along every row.
inline void right_1q(Eigen::MatrixXcd& rho, int q, const GateMatrix& u) {
    const long dim = rho.rows(), bit = 1L << q;
    for (long r = 0; r < dim; ++r)
        for (long base = 0; base < dim; ++base) {
            if (base & bit) continue;
            const cplx lo = rho(r, base), hi = rho(r, base | bit);
            rho(r, base) = std::conj(u.u00) * lo + std::conj(u.u01) * hi;
            rho(r, base | bit) = std::conj(u.u10) * lo + std::conj(u.u11) * hi;
        }
}

inline long cnot_image(long i, long cb, long tb) { return (i & cb) ? (i ^ tb) : i; }

inline void conj_cnot(Eigen::MatrixXcd& rho, int ctrl, int tgt) {
    const long dim = rho.rows(), cb = 1L << ctrl, tb = 1L << tgt;
    Eigen::MatrixXcd out(dim, dim);
    for (long r = 0; r < dim; ++r)
        for (long c = 0; c < dim; ++c)
            out(cnot_image(r, cb, tb), cnot_image(c, cb, tb)) = rho(r, c);
    rho.swap(out);
}

inline void conj_cz(Eigen::MatrixXcd& rho, int q0, int q1) {
    const long dim = rho.rows(), b0 = 1L << q0, b1 = 1L << q1;
    auto sign = [&](long i) { return ((i & b0) && (i & b1)) ? -1.0 : 1.0; };
    for (long r = 0; r < dim; ++r)
        for (long c = 0; c < dim; ++c) rho(r, c) *= sign(r) * sign(c);
}

inline void depolarize_1q(Eigen::MatrixXcd& rho, int q, double p) {
    if (p == 0.0) return;
    const long dim = rho.rows(), bit = 1L << q;
    for (long r = 0; r < dim; ++r) {
        if (r & bit) continue;
        for (long c = 0; c < dim; ++c) {
            if (c & bit) continue;
            const cplx diag_sum = rho(r, c) + rho(r | bit, c | bit);
            rho(r, c) = (1 - p) * rho(r, c) + p * 0.5 * diag_sum;
            rho(r | bit, c | bit) = (1 - p) * rho(r | bit, c | bit) + p * 0.5 * diag_sum;
            rho(r, c | bit) *= (1 - p);
            rho(r | bit, c) *= (1 - p);
        }
    }
}

inline void depolarize_2q(Eigen::MatrixXcd& rho, int qa, int qb, double p) {
    if (p == 0.0) return;
    const long dim = rho.rows(), ba = 1L << qa, bb = 1L << qb;
    const long sub[4] = {0, ba, bb, ba | bb};
    for (long r = 0; r < dim; ++r) {
        if (r & (ba | bb)) continue;
        for (long c = 0; c < dim; ++c) {
            if (c & (ba | bb)) continue;
            cplx diag_sum = 0;
            for (long s : sub) diag_sum += rho(r | s, c | s);
            for (long sr : sub)
                for (long sc : sub) {
                    cplx& e = rho(r | sr, c | sc);
                    e *= (1 - p);
                    if (sr == sc) e += p * 0.25 * diag_sum;
                }
        }
    }
}

}  // namespace detail

inline void apply_gate(DensityMatrix& dm, const Gate& g) {
    if (g.q0 < 0 || g.q0 >= dm.n || (is_two_qubit(g.kind) && (g.q1 < 0 || g.q1 >= dm.n)))
        throw std::invalid_argument("gate qubit out of range");
    switch (g.kind) {
        case GateKind::CNOT: detail::conj_cnot(dm.rho, g.q0, g.q1); break;
        case GateKind::CZ: detail::conj_cz(dm.rho, g.q0, g.q1); break;
        default: {
            auto u = detail::gate_matrix(g.kind, g.angle);
            detail::left_1q(dm.rho, g.q0, u);
            detail::right_1q(dm.rho, g.q0, u);
        }
    }
}

inline void apply_circuit(DensityMatrix& dm, const Circuit& c) {
    if (c.n != dm.n) throw std::invalid_argument("circuit/state qubit count mismatch");
    for (const auto& g : c.gates) apply_gate(dm, g);
}

// Noisy evolution: each gate is followed by depolarization on its targets.
inline void apply_noisy_circuit(DensityMatrix& dm, const Circuit& c, const NoiseModel& noise) {
    if (c.n != dm.n) throw std::invalid_argument("circuit/state qubit count mismatch");
    if (noise.p1 < 0 || noise.p1 > 1 || noise.p2 < 0 || noise.p2 > 1)
        throw std::invalid_argument("depolarizing probabilities must lie in [0, 1]");
    for (const auto& g : c.gates) {
        apply_gate(dm, g);
        if (is_two_qubit(g.kind)) detail::depolarize_2q(dm.rho, g.q0, g.q1, noise.p2);
        else detail::depolarize_1q(dm.rho, g.q0, noise.p1);
    }
    if (std::abs(dm.trace_real() - 1.0) > 1e-9)
        throw NumericalError("density matrix trace drifted after circuit");
}

// Expected number of faults: lambda = n1 p1 + n2 p2.
inline double circuit_fault_rate(const Circuit& c, const NoiseModel& noise) {
    return c.count_single_qubit() * noise.p1 + c.count_two_qubit() * noise.p2;
}

// Tr(word * rho) = sum_c ph(c) rho(c, c ^ x).
inline double expectation(const DensityMatrix& dm, const PauliString& word) {
    if (word.n != dm.n) throw std::invalid_argument("pauli/state qubit count mismatch");
    const cplx y_phase = i_pow(std::popcount(word.x & word.z));
    cplx acc = 0;
    for (long c = 0; c < dm.dim(); ++c) {
        const double sign = (std::popcount(word.z & static_cast<std::uint64_t>(c)) & 1) ? -1 : 1;
        acc += sign * dm.rho(c, c ^ static_cast<long>(word.x));
    }
    acc *= y_phase;
    if (std::abs(acc.imag()) > 1e-9)
        throw NumericalError("non-real expectation of a Hermitian Pauli word");
    return acc.real();
}

inline double expectation(const DensityMatrix& dm, const ObservableSum& h) {
    double e = 0;
    for (const auto& t : h.terms) e += t.coeff * expectation(dm, t.word);
    return e;
}

}  // namespace sse
