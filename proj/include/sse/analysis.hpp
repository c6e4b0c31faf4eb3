#pragma once

// Diagnostics around the subspace pipeline: the shot-noise propagation bound
// for the assembled matrices, Hamiltonian norm bounds feeding it, overlap
// spectrum reports, and an empirical counterpart of the bound measured over
// repeated noisy runs.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "sse/errors.hpp"
#include "sse/hamiltonian.hpp"
#include "sse/pauli.hpp"
#include "sse/sse.hpp"

namespace sse {

struct NoiseBoundInput {
    long n_snapshots = 1;        // N_s
    int w = 0;                   // largest Hamiltonian-term weight
    int w_prime = 0;             // largest expansion-operator weight
    int k = 1;                   // subspace dimension
    double s_inv_frobenius = 1;  // ||S~^{-1}||_F over the regularized overlap
    double h_inf_upper = 1;      // any upper bound on ||H_tot||_inf

    void validate() const {
        if (n_snapshots < 1) throw std::invalid_argument("n_snapshots must be >= 1");
        if (w < 0 || w_prime < 0) throw std::invalid_argument("weights must be >= 0");
        if (k < 1) throw std::invalid_argument("subspace dimension must be >= 1");
        if (!(s_inv_frobenius > 0)) throw std::invalid_argument("s_inv_frobenius must be > 0");
        if (!(h_inf_upper >= 0)) throw std::invalid_argument("h_inf_upper must be >= 0");
    }
};

// Upper bound on the summed entrywise variance eps_M^2 of M = S~^{-1} H~
// under shadow estimation with N_s snapshots:
//   eps_M^2 <= N_s^{-1} * 3^{2w'} * K * (h_inf * s^4 + 3^w * s^2),
// with s = ||S~^{-1}||_F.  Pessimistic by construction; the empirical
// counterpart below typically sits far beneath it.
inline double shot_noise_bound(const NoiseBoundInput& in) {
    in.validate();
    const double s2 = in.s_inv_frobenius * in.s_inv_frobenius;
    const double bracket = in.h_inf_upper * s2 * s2 + std::pow(3.0, in.w) * s2;
    return std::pow(3.0, 2 * in.w_prime) * static_cast<double>(in.k) * bracket /
           static_cast<double>(in.n_snapshots);
}

struct HNorm {
    double value = 0;
    bool is_exact = false;
};

// Triangle-inequality bound sum_k |beta_k| >= ||H||_inf; always available.
inline HNorm h_norm_upper(const ObservableSum& h) { return {h.coeff_l1(), false}; }

// Exact operator norm from dense diagonalization; small n only.
inline HNorm h_norm_exact(const ObservableSum& h) {
    std::vector<double> eigs = exact_spectrum(h);
    double m = 0;
    for (double e : eigs) m = std::max(m, std::abs(e));
    return {m, true};
}

// ||S~^{-1}||_F = sqrt(sum 1/lambda^2) over eigenvalues above the floor.
inline double s_inv_frobenius(const std::vector<double>& s_eigenvalues, double floor = 1e-12) {
    double acc = 0;
    int kept = 0;
    for (double l : s_eigenvalues)
        if (l > floor) {
            acc += 1.0 / (l * l);
            ++kept;
        }
    if (kept == 0) throw NumericalError("overlap matrix fully degenerate");
    return std::sqrt(acc);
}

struct SpectrumReport {
    std::vector<double> eigenvalues;  // descending; negatives retained
    int above_floor = 0;
    bool has_negative = false;
    double floor = 0;
    double trace = 0;
};

// Full eigenvalue list of the overlap matrix.  Negative values are kept in
// the report (they are what the regularization floor discards) so the
// truncation step stays auditable.
inline SpectrumReport spectrum_report(const SseMatrices& m, double floor = 1e-12) {
    const Eigen::MatrixXcd s = detail::hermitize(m.S);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed on S");
    SpectrumReport rep;
    rep.floor = floor;
    rep.trace = s.trace().real();
    rep.eigenvalues.assign(es.eigenvalues().data(),
                           es.eigenvalues().data() + es.eigenvalues().size());
    std::reverse(rep.eigenvalues.begin(), rep.eigenvalues.end());
    for (double l : rep.eigenvalues) {
        if (l > floor) ++rep.above_floor;
        if (l < 0) rep.has_negative = true;
    }
    return rep;
}

// Empirical counterpart of shot_noise_bound: eps_M^2 = sum_kl Var[M_kl] with
// M = S~_ref^{-1} H~_run formed in the reference's regularized frame, so the
// statistic measures estimation noise rather than frame jitter.
inline double empirical_matrix_noise(const std::vector<SseMatrices>& runs,
                                     const SseMatrices& reference, double floor = 1e-12) {
    if (runs.size() < 2) throw std::invalid_argument("need at least two runs");
    const Eigen::MatrixXcd s_ref = detail::hermitize(reference.S);
    const int k = static_cast<int>(s_ref.rows());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s_ref);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed on S");
    std::vector<int> order;
    for (int i = k - 1; i >= 0; --i)
        if (es.eigenvalues()[i] > floor) order.push_back(i);
    if (order.empty()) throw NumericalError("singular reference overlap matrix");

    const int l = static_cast<int>(order.size());
    Eigen::MatrixXcd q(k, l);
    Eigen::VectorXd inv(l);
    for (int c = 0; c < l; ++c) {
        q.col(c) = es.eigenvectors().col(order[static_cast<std::size_t>(c)]);
        inv[c] = 1.0 / es.eigenvalues()[order[static_cast<std::size_t>(c)]];
    }

    std::vector<Eigen::MatrixXcd> ms;
    ms.reserve(runs.size());
    for (const auto& run : runs) {
        if (run.H.rows() != k || run.H.cols() != k)
            throw std::invalid_argument("run dimension does not match the reference");
        Eigen::MatrixXcd h_tilde = q.adjoint() * run.H * q;
        for (int r = 0; r < l; ++r) h_tilde.row(r) *= inv[r];
        ms.push_back(std::move(h_tilde));
    }

    Eigen::MatrixXcd mean = Eigen::MatrixXcd::Zero(l, l);
    for (const auto& m : ms) mean += m;
    mean /= static_cast<double>(ms.size());

    double acc = 0;
    for (const auto& m : ms) acc += (m - mean).squaredNorm();
    return acc / static_cast<double>(ms.size() - 1);
}

}  // namespace sse
