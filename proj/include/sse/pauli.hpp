#pragma once

// Pauli-string algebra on bitmask pairs.  A string over n qubits is stored as
// two masks (x, z): bit q of x set means an X component on qubit q, bit q of z
// a Z component, both set means Y.  The operator represented is the Hermitian
// word
//
//     P = i^{popcount(x & z)} * prod_q X_q^{x_q} Z_q^{z_q}
//
// (each Y contributes one factor of i, since Y = i X Z).  Products then reduce
// to XOR on the masks plus an exactly tracked power of i.

#include <algorithm>
#include <bit>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sse {

using cplx = std::complex<double>;

enum class PauliOp : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline char pauli_char(PauliOp p) { return "IXYZ"[static_cast<int>(p)]; }

struct PauliString {
    int n = 0;
    std::uint64_t x = 0;
    std::uint64_t z = 0;

    PauliString() = default;

    explicit PauliString(int n_qubits) : n(n_qubits) { check_qubit_count(n_qubits); }

    PauliString(int n_qubits, std::uint64_t x_mask, std::uint64_t z_mask)
        : n(n_qubits), x(x_mask), z(z_mask) {
        check_qubit_count(n_qubits);
    }

    // Text form: leftmost character acts on qubit 0.
    explicit PauliString(const std::string& text) : n(static_cast<int>(text.size())) {
        check_qubit_count(n);
        for (int q = 0; q < n; ++q) {
            switch (text[static_cast<std::size_t>(q)]) {
                case 'I': break;
                case 'X': x |= bit(q); break;
                case 'Y': x |= bit(q); z |= bit(q); break;
                case 'Z': z |= bit(q); break;
                default:
                    throw std::invalid_argument("invalid Pauli letter '" +
                                                std::string(1, text[static_cast<std::size_t>(q)]) +
                                                "' in \"" + text + "\"");
            }
        }
    }

    static std::uint64_t bit(int q) { return std::uint64_t{1} << q; }

    static void check_qubit_count(int n_qubits) {
        if (n_qubits < 0 || n_qubits > 32)
            throw std::invalid_argument("qubit count must be in [0, 32], got " +
                                        std::to_string(n_qubits));
    }

    PauliOp op(int q) const {
        bool has_x = (x >> q) & 1, has_z = (z >> q) & 1;
        if (has_x && has_z) return PauliOp::Y;
        if (has_x) return PauliOp::X;
        if (has_z) return PauliOp::Z;
        return PauliOp::I;
    }

    void set_op(int q, PauliOp p) {
        x &= ~bit(q);
        z &= ~bit(q);
        if (p == PauliOp::X || p == PauliOp::Y) x |= bit(q);
        if (p == PauliOp::Z || p == PauliOp::Y) z |= bit(q);
    }

    int weight() const { return std::popcount(x | z); }

    bool is_identity() const { return (x | z) == 0; }

    std::string str() const {
        std::string s(static_cast<std::size_t>(n), 'I');
        for (int q = 0; q < n; ++q) s[static_cast<std::size_t>(q)] = pauli_char(op(q));
        return s;
    }

    // Injective for n <= 32; used for hashing and per-word RNG stream keys.
    std::uint64_t key() const { return (x << 32) | z; }

    friend bool operator==(const PauliString& a, const PauliString& b) {
        return a.n == b.n && a.x == b.x && a.z == b.z;
    }
};

struct PauliStringHash {
    std::size_t operator()(const PauliString& p) const {
        std::uint64_t h = p.key() * 0x9e3779b97f4a7c15ULL;
        return static_cast<std::size_t>(h ^ (h >> 32) ^ static_cast<std::uint64_t>(p.n));
    }
};

// i^k for k taken mod 4, exact.
inline cplx i_pow(int k) {
    static constexpr cplx table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return table[((k % 4) + 4) & 3];
}

// A Pauli word together with a global phase i^k, k in {0,1,2,3}.
struct PhasedPauli {
    std::uint8_t phase_exp = 0;
    PauliString word;

    cplx phase() const { return i_pow(phase_exp); }

    // i^k is real exactly when k is even; only then is phase*word Hermitian.
    bool is_hermitian() const { return (phase_exp & 1) == 0; }
};

inline void check_same_qubits(const PauliString& a, const PauliString& b) {
    if (a.n != b.n)
        throw std::invalid_argument("qubit count mismatch: " + std::to_string(a.n) + " vs " +
                                    std::to_string(b.n));
}

// Exact product a*b.  Phase bookkeeping: with P = i^{|x&z|} X^x Z^z,
// commuting the X-part of b through the Z-part of a picks up (-1)^{|z_a & x_b|},
// and re-normalising the result word to its own i^{|x&z|} convention absorbs
// the remaining factors.
inline PhasedPauli multiply(const PauliString& a, const PauliString& b) {
    check_same_qubits(a, b);
    PauliString c(a.n, a.x ^ b.x, a.z ^ b.z);
    int exp = std::popcount(a.x & a.z) + std::popcount(b.x & b.z) +
              2 * std::popcount(a.z & b.x) - std::popcount(c.x & c.z);
    PhasedPauli out;
    out.phase_exp = static_cast<std::uint8_t>(((exp % 4) + 4) % 4);
    out.word = c;
    return out;
}

inline PhasedPauli multiply(const PhasedPauli& a, const PhasedPauli& b) {
    PhasedPauli out = multiply(a.word, b.word);
    out.phase_exp = static_cast<std::uint8_t>((out.phase_exp + a.phase_exp + b.phase_exp) & 3);
    return out;
}

inline bool commutes(const PauliString& a, const PauliString& b) {
    check_same_qubits(a, b);
    return ((std::popcount(a.x & b.z) + std::popcount(a.z & b.x)) & 1) == 0;
}

// g_left * h * g_right, e.g. sandwich(g, h, g) for conjugation by g.
inline PhasedPauli sandwich(const PauliString& g_left, const PauliString& h,
                            const PauliString& g_right) {
    PhasedPauli gh = multiply(g_left, h);
    PhasedPauli out = multiply(gh.word, g_right);
    out.phase_exp = static_cast<std::uint8_t>((out.phase_exp + gh.phase_exp) & 3);
    return out;
}

// All Pauli strings of weight <= max_weight, identity first, then ascending
// weight; within a weight class, support site tuples in lexicographic order
// and letters ordered X < Y < Z with the first (lowest) site most significant.
inline std::vector<PauliString> enumerate_up_to_weight(int n, int max_weight) {
    PauliString::check_qubit_count(n);
    if (max_weight < 0 || max_weight > n)
        throw std::invalid_argument("max_weight must be in [0, n]");
    std::vector<PauliString> out;
    out.emplace_back(n);

    std::vector<int> sites;
    std::function<void(int, int)> rec = [&](int next_site, int remaining) {
        if (remaining == 0) {
            int k = static_cast<int>(sites.size());
            // letters as a base-3 counter, most significant digit = sites[0]
            std::vector<int> letter(static_cast<std::size_t>(k), 0);
            for (;;) {
                PauliString p(n);
                for (int j = 0; j < k; ++j) {
                    static constexpr PauliOp order[3] = {PauliOp::X, PauliOp::Y, PauliOp::Z};
                    p.set_op(sites[static_cast<std::size_t>(j)],
                             order[letter[static_cast<std::size_t>(j)]]);
                }
                out.push_back(p);
                int j = k - 1;
                while (j >= 0 && letter[static_cast<std::size_t>(j)] == 2)
                    letter[static_cast<std::size_t>(j--)] = 0;
                if (j < 0) break;
                ++letter[static_cast<std::size_t>(j)];
            }
            return;
        }
        for (int s = next_site; s <= n - remaining; ++s) {
            sites.push_back(s);
            rec(s + 1, remaining - 1);
            sites.pop_back();
        }
    };
    for (int w = 1; w <= max_weight; ++w) rec(0, w);
    return out;
}

// Weighted sum of Hermitian Pauli words with real coefficients.  Adding a term
// whose word is already present merges by coefficient addition; explicit zero
// coefficients are kept as terms.
struct ObservableSum {
    struct Term {
        double coeff = 0.0;
        PauliString word;
    };

    int n = 0;
    std::vector<Term> terms;

    ObservableSum() = default;
    explicit ObservableSum(int n_qubits) : n(n_qubits) {
        PauliString::check_qubit_count(n_qubits);
    }

    void add(double coeff, const PauliString& word) {
        if (word.n != n)
            throw std::invalid_argument("term qubit count " + std::to_string(word.n) +
                                        " does not match observable's " + std::to_string(n));
        for (auto& t : terms) {
            if (t.word == word) {
                t.coeff += coeff;
                return;
            }
        }
        terms.push_back({coeff, word});
    }

    void add(double coeff, const std::string& word_text) { add(coeff, PauliString(word_text)); }

    std::size_t size() const { return terms.size(); }

    int max_weight() const {
        int w = 0;
        for (const auto& t : terms) w = std::max(w, t.word.weight());
        return w;
    }

    // sum_k |beta_k|; upper-bounds the spectral norm by the triangle inequality.
    double coeff_l1() const {
        double s = 0.0;
        for (const auto& t : terms) s += std::abs(t.coeff);
        return s;
    }
};

}  // namespace sse
