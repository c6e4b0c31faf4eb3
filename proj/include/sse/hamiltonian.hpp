#pragma once

// Problem Hamiltonians: the Heisenberg spin ring used throughout, plus a plain
// text file format
//
//     # comment
//     0.25  XXI
//     -1.0  ZZI
//
// one `<coefficient> <pauli word>` pair per line, leftmost letter = qubit 0.
// Duplicate words merge by coefficient addition.

#include <Eigen/Dense>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "sse/errors.hpp"
#include "sse/pauli.hpp"
#include "sse/rng.hpp"
#include "sse/statevector.hpp"

namespace sse {

// H = J sum_i (X_i X_{i+1} + Y_i Y_{i+1} + Z_i Z_{i+1}) + sum_i c_i Z_i.
// Periodic closure adds the (n-1, 0) bond; coupling terms come first, then the
// on-site fields, so a periodic ring always has 4n terms (zeros kept).
inline ObservableSum build_spin_ring(int n, double coupling, const std::vector<double>& onsite,
                                     bool periodic = true) {
    if (n < 3) throw std::invalid_argument("spin ring needs n >= 3, got " + std::to_string(n));
    if (static_cast<int>(onsite.size()) != n)
        throw std::invalid_argument("onsite field vector must have length n");
    ObservableSum h(n);
    const int bonds = periodic ? n : n - 1;
    for (int i = 0; i < bonds; ++i) {
        const int j = (i + 1) % n;
        for (PauliOp op : {PauliOp::X, PauliOp::Y, PauliOp::Z}) {
            PauliString p(n);
            p.set_op(i, op);
            p.set_op(j, op);
            h.add(coupling, p);
        }
    }
    for (int i = 0; i < n; ++i) {
        PauliString p(n);
        p.set_op(i, PauliOp::Z);
        h.add(onsite[i], p);
    }
    return h;
}

// On-site fields c_i ~ Uniform[-1, 1], deterministic in the seed.
inline ObservableSum build_spin_ring(int n, double coupling, std::uint64_t onsite_seed,
                                     bool periodic = true) {
    auto rng = make_engine(onsite_seed, 0x52494e47ULL);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> onsite(static_cast<std::size_t>(n));
    for (auto& c : onsite) c = u(rng);
    return build_spin_ring(n, coupling, onsite, periodic);
}

inline ObservableSum parse_hamiltonian(std::istream& in, const std::string& name) {
    std::string line;
    int lineno = 0;
    ObservableSum h;
    bool have_n = false;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double coeff;
        std::string word;
        if (!(ls >> coeff)) {
            std::string tok;
            std::istringstream probe(line);
            if (probe >> tok)
                throw ConfigError(name + " line " + std::to_string(lineno) +
                                  ": expected '<coefficient> <pauli word>', got '" + tok + "'");
            continue;  // blank / comment-only line
        }
        if (!(ls >> word))
            throw ConfigError(name + " line " + std::to_string(lineno) + ": missing Pauli word");
        std::string extra;
        if (ls >> extra)
            throw ConfigError(name + " line " + std::to_string(lineno) + ": trailing token '" +
                              extra + "'");
        PauliString p(0);
        try {
            p = PauliString(word);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(name + " line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!have_n) {
            h = ObservableSum(p.n);
            have_n = true;
        } else if (p.n != h.n) {
            throw ConfigError(name + " line " + std::to_string(lineno) + ": word length " +
                              std::to_string(p.n) + " does not match earlier length " +
                              std::to_string(h.n));
        }
        h.add(coeff, p);
    }
    if (!have_n) throw ConfigError(name + ": no terms");
    return h;
}

inline ObservableSum load_hamiltonian(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open Hamiltonian file '" + path + "'");
    return parse_hamiltonian(in, path);
}

inline void write_hamiltonian(std::ostream& out, const ObservableSum& h) {
    char buf[40];
    for (const auto& t : h.terms) {
        std::snprintf(buf, sizeof buf, "%.17g", t.coeff);
        out << buf << ' ' << t.word.str() << '\n';
    }
}

inline constexpr int kMaxDenseQubits = 12;

// Dense matrix of an observable; each word is a signed permutation with one
// entry per column, so the build costs O(terms * 2^n).
inline Eigen::MatrixXcd dense_matrix(const ObservableSum& h) {
    check_sim_qubits(h.n, kMaxDenseQubits);
    const long dim = 1L << h.n;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& t : h.terms) {
        const cplx y_phase = i_pow(std::popcount(t.word.x & t.word.z));
        for (long b = 0; b < dim; ++b) {
            const double sign =
                (std::popcount(t.word.z & static_cast<std::uint64_t>(b)) & 1) ? -1 : 1;
            m(b ^ static_cast<long>(t.word.x), b) += t.coeff * y_phase * sign;
        }
    }
    return m;
}

// Ascending eigenvalues; `count` <= 0 returns the full spectrum.
inline std::vector<double> exact_spectrum(const ObservableSum& h, int count = -1) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense_matrix(h),
                                                       Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed on dense H");
    const auto& ev = es.eigenvalues();
    long take = (count <= 0) ? ev.size() : std::min<long>(count, ev.size());
    return std::vector<double>(ev.data(), ev.data() + take);
}

struct GroundState {
    double energy = 0;
    StateVector state;
};

inline GroundState exact_ground(const ObservableSum& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense_matrix(h));
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed on dense H");
    return {es.eigenvalues()[0], StateVector(h.n, es.eigenvectors().col(0))};
}

}  // namespace sse
