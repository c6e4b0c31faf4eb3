#pragma once

// Local-Clifford (Pauli basis) classical shadows.  Each snapshot stores one
// uniformly drawn X/Y/Z basis letter per qubit and the measured bits.  The
// single-observable estimator for a weight-w word is
//
//     R = 3^w * prod_{q in supp} outcome_q   if every support letter matches,
//     R = 0                                  otherwise,
//
// which is unbiased with per-snapshot variance 3^w - <P>^2.
//
// Dump format: header "n=<int> N_s=<int> seed=<u64>", then one
// "<bases> <outcome bits>" line per snapshot, e.g. "XZY 010" (leftmost =
// qubit 0, outcome bit 0 means +1).

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sse/density_matrix.hpp"
#include "sse/errors.hpp"
#include "sse/pauli.hpp"
#include "sse/rng.hpp"
#include "sse/statevector.hpp"

namespace sse {

struct Snapshot {
    std::uint64_t bases = 0;     // 2 bits per qubit: 0 = X, 1 = Y, 2 = Z
    std::uint64_t outcomes = 0;  // bit q set means outcome -1

    static constexpr PauliOp letter_table[3] = {PauliOp::X, PauliOp::Y, PauliOp::Z};

    PauliOp basis_at(int q) const { return letter_table[(bases >> (2 * q)) & 3]; }
    void set_basis(int q, int code) { bases |= static_cast<std::uint64_t>(code) << (2 * q); }
    int outcome_at(int q) const { return ((outcomes >> q) & 1) ? -1 : 1; }
};

struct ShadowSet {
    int n = 0;
    std::uint64_t seed = 0;
    std::vector<Snapshot> snaps;

    long size() const { return static_cast<long>(snaps.size()); }
};

namespace detail {

// Rotate so the chosen measurement basis becomes the computational one:
// X -> H, Y -> H S^dagger, Z -> identity.
inline void basis_rotation(Eigen::VectorXcd& amps, int q, int code) {
    const double r = 1.0 / std::sqrt(2.0);
    switch (code) {
        case 0: apply_1q(amps, q, {r, 0}, {r, 0}, {r, 0}, {-r, 0}); break;
        case 1: apply_1q(amps, q, {r, 0}, {0, -r}, {r, 0}, {0, r}); break;
        default: break;
    }
}

template <typename ProbFn, typename RotFn>
ShadowSet sample_shadows_impl(int n, long n_snapshots, std::uint64_t seed, RotFn&& rotate,
                              ProbFn&& prob_of) {
    if (n_snapshots < 1) throw std::invalid_argument("need at least one snapshot");
    ShadowSet set;
    set.n = n;
    set.seed = seed;
    set.snaps.resize(static_cast<std::size_t>(n_snapshots));
    const long dim = 1L << n;
    for (long s = 0; s < n_snapshots; ++s) {
        auto rng = make_engine(seed, static_cast<std::uint64_t>(s) * 2 + 1);
        std::uniform_int_distribution<int> basis(0, 2);
        Snapshot& snap = set.snaps[static_cast<std::size_t>(s)];
        for (int q = 0; q < n; ++q) snap.set_basis(q, basis(rng));
        rotate(snap);

        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double u = unit(rng);
        double acc = 0;
        long outcome = dim - 1;
        for (long b = 0; b < dim; ++b) {
            acc += prob_of(b);
            if (u < acc) {
                outcome = b;
                break;
            }
        }
        snap.outcomes = static_cast<std::uint64_t>(outcome);
    }
    return set;
}

}  // namespace detail

inline ShadowSet sample_shadows(const StateVector& psi, long n_snapshots, std::uint64_t seed) {
    Eigen::VectorXcd rotated;
    return detail::sample_shadows_impl(
        psi.n, n_snapshots, seed,
        [&](const Snapshot& snap) {
            rotated = psi.amps;
            for (int q = 0; q < psi.n; ++q)
                detail::basis_rotation(rotated, q, static_cast<int>((snap.bases >> (2 * q)) & 3));
        },
        [&](long b) { return std::norm(rotated[b]); });
}

inline ShadowSet sample_shadows(const DensityMatrix& dm, long n_snapshots, std::uint64_t seed) {
    Eigen::MatrixXcd rotated;
    return detail::sample_shadows_impl(
        dm.n, n_snapshots, seed,
        [&](const Snapshot& snap) {
            rotated = dm.rho;
            for (int q = 0; q < dm.n; ++q) {
                const int code = static_cast<int>((snap.bases >> (2 * q)) & 3);
                // conjugate each column, then each row (U rho U^dagger)
                for (long c = 0; c < rotated.cols(); ++c) {
                    Eigen::VectorXcd col = rotated.col(c);
                    detail::basis_rotation(col, q, code);
                    rotated.col(c) = col;
                }
                for (long r = 0; r < rotated.rows(); ++r) {
                    Eigen::VectorXcd row = rotated.row(r).conjugate();
                    detail::basis_rotation(row, q, code);
                    rotated.row(r) = row.conjugate();
                }
            }
        },
        [&](long b) { return std::max(0.0, rotated(b, b).real()); });
}

// Mean of the single-snapshot estimator over the whole set, times the (real)
// phase of p.  Exactly p.phase * 1 for the identity word.
inline double estimate_pauli(const ShadowSet& set, const PhasedPauli& p) {
    if (!p.is_hermitian())
        throw std::invalid_argument("estimate_pauli requires a Hermitian phase (+1 or -1)");
    if (p.word.n != set.n) throw std::invalid_argument("pauli/shadow qubit count mismatch");
    if (set.snaps.empty()) throw std::invalid_argument("empty shadow set");

    std::vector<int> support;
    std::vector<PauliOp> letters;
    for (int q = 0; q < set.n; ++q)
        if (p.word.op(q) != PauliOp::I) {
            support.push_back(q);
            letters.push_back(p.word.op(q));
        }
    const double scale = std::pow(3.0, static_cast<double>(support.size()));

    double sum = 0;
    for (const auto& snap : set.snaps) {
        double v = scale;
        for (std::size_t i = 0; i < support.size(); ++i) {
            const int q = support[i];
            if (snap.basis_at(q) != letters[i]) {
                v = 0;
                break;
            }
            v *= snap.outcome_at(q);
        }
        sum += v;
    }
    const double sign = p.phase().real();
    return sign * sum / static_cast<double>(set.snaps.size());
}

// Per-snapshot variance of the estimator: 3^w - exact^2.
inline double theoretical_variance(int weight, double exact_value) {
    if (weight < 0) throw std::invalid_argument("weight must be >= 0");
    if (std::abs(exact_value) > 1.0 + 1e-12)
        throw std::invalid_argument("|exact_value| must be <= 1 for a Pauli word");
    return std::pow(3.0, static_cast<double>(weight)) - exact_value * exact_value;
}

inline void save_shadows(std::ostream& out, const ShadowSet& set) {
    out << "n=" << set.n << " N_s=" << set.size() << " seed=" << set.seed << '\n';
    std::string bases(static_cast<std::size_t>(set.n), '?');
    std::string bits(static_cast<std::size_t>(set.n), '?');
    for (const auto& snap : set.snaps) {
        for (int q = 0; q < set.n; ++q) {
            bases[static_cast<std::size_t>(q)] = pauli_char(snap.basis_at(q));
            bits[static_cast<std::size_t>(q)] = ((snap.outcomes >> q) & 1) ? '1' : '0';
        }
        out << bases << ' ' << bits << '\n';
    }
}

inline ShadowSet load_shadows(std::istream& in, const std::string& name = "shadow dump") {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(name + ": missing header");
    int n = 0;
    long ns = 0;
    unsigned long long seed = 0;
    if (std::sscanf(line.c_str(), "n=%d N_s=%ld seed=%llu", &n, &ns, &seed) != 3)
        throw ConfigError(name + ": malformed header '" + line + "'");
    if (n < 1 || n > 32 || ns < 1) throw ConfigError(name + ": header values out of range");

    ShadowSet set;
    set.n = n;
    set.seed = seed;
    set.snaps.reserve(static_cast<std::size_t>(ns));
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string bases, bits;
        if (!(ls >> bases >> bits) || static_cast<int>(bases.size()) != n ||
            static_cast<int>(bits.size()) != n)
            throw ConfigError(name + " line " + std::to_string(lineno) + ": malformed snapshot");
        Snapshot snap;
        for (int q = 0; q < n; ++q) {
            int code;
            switch (bases[static_cast<std::size_t>(q)]) {
                case 'X': code = 0; break;
                case 'Y': code = 1; break;
                case 'Z': code = 2; break;
                default:
                    throw ConfigError(name + " line " + std::to_string(lineno) +
                                      ": bad basis letter");
            }
            snap.set_basis(q, code);
            const char bc = bits[static_cast<std::size_t>(q)];
            if (bc != '0' && bc != '1')
                throw ConfigError(name + " line " + std::to_string(lineno) + ": bad outcome bit");
            if (bc == '1') snap.outcomes |= std::uint64_t{1} << q;
        }
        set.snaps.push_back(snap);
    }
    if (set.size() != ns)
        throw ConfigError(name + ": header promised " + std::to_string(ns) + " snapshots, found " +
                          std::to_string(set.size()));
    return set;
}

}  // namespace sse
