#pragma once

// Shadow subspace expansion.  Given a state rho, a Hamiltonian H_tot and a set
// of Pauli expansion operators {G_i}, the expanded eigenproblem works with
//
//     S_ij = <G_i G_j>,   H_ij = sum_k beta_k <G_i H_k G_j>,
//
// both assembled from (possibly noisy) estimates of Hermitian Pauli words.
// Solving H w = E S w in a regularized subspace of S and truncating by the
// moving-variance rule yields an energy estimate E_sse <= E_direct that is
// robust to the estimator's shot noise.
//
// Pipeline stages, each usable on its own:
//   local_filter        rank operators by 2x2 single-operator expansions
//   assemble_matrices   build S / H (/ symmetry A) with deduplicated estimates
//   regularized_gevp    eigenvalue floor + truncation scan
//   symmetry ops        commuting filter or sector projection (optional)
//   clamp_to_direct     never report worse than the direct estimate

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "sse/errors.hpp"
#include "sse/estimator.hpp"
#include "sse/pauli.hpp"

namespace sse {

struct FilterResult {
    // identity first, then all other candidates sorted by descending dE
    // (ties keep enumeration order); the identity is always retained
    // regardless of its rank.
    std::vector<std::pair<PauliString, double>> ranked;
    int k_kept = 0;

    std::vector<PauliString> kept() const {
        std::vector<PauliString> out;
        out.reserve(static_cast<std::size_t>(k_kept));
        for (int i = 0; i < k_kept; ++i) out.push_back(ranked[static_cast<std::size_t>(i)].first);
        return out;
    }
};

namespace detail {

// Smallest generalized eigenvalue of the Hermitian 2x2 pencil
// ([a, b; b*, d], [1, g; g*, 1]).  Closed form via the quadratic
// alpha E^2 - beta E + gamma = 0 with the numerically stable root split.
inline double min_pencil_eig_2x2(double a, double d, cplx b, cplx g) {
    const double alpha = 1.0 - std::norm(g);
    const double beta = a + d - 2.0 * (b * std::conj(g)).real();
    const double gamma = a * d - std::norm(b);
    const double disc = std::max(0.0, beta * beta - 4.0 * alpha * gamma);
    const double root = std::sqrt(disc);
    if (beta >= 0) {
        const double den = beta + root;
        return den == 0 ? 0.0 : 2.0 * gamma / den;
    }
    return (beta - root) / (2.0 * alpha);
}

inline Eigen::MatrixXcd hermitize(const Eigen::MatrixXcd& m) {
    return 0.5 * (m + m.adjoint());
}

}  // namespace detail

// Rank expansion candidates by the energy improvement dE_i of the dimension-2
// expansion {I, G_i}: S2 = [[1, <G_i>], [<G_i>*, 1]],
// H2 = [[<H>, <H G_i>], [<G_i H>, <G_i H G_i>]], dE_i = <H> - min eig.
// Operators with |<G_i>| >= 1 - floor span a degenerate S2 and are skipped
// with dE = 0.  Keeps the identity plus the keep_k - 1 best others.
inline FilterResult local_filter(const std::vector<PauliString>& basis, const ObservableSum& h,
                                 Estimator& est, int keep_k, double floor = 1e-12) {
    if (keep_k < 1) throw std::invalid_argument("keep_k must be >= 1");
    if (basis.empty() || !basis[0].is_identity())
        throw std::invalid_argument("expansion basis must start with the identity");

    const double e_direct = est.estimate(h).real();

    std::vector<std::pair<PauliString, double>> others;
    others.reserve(basis.size());
    for (std::size_t i = 1; i < basis.size(); ++i) {
        const PauliString& g = basis[i];
        if (g.is_identity()) {
            others.emplace_back(g, 0.0);  // duplicate anchors add nothing
            continue;
        }
        const cplx gv = est.word_value(g);
        if (std::abs(gv) >= 1.0 - floor) {
            others.emplace_back(g, 0.0);  // G|psi> ~ |psi>: degenerate S2
            continue;
        }
        cplx b = 0;
        double d = 0;
        for (const auto& t : h.terms) {
            b += t.coeff * est.estimate(multiply(t.word, g));
            d += t.coeff * est.estimate(sandwich(g, t.word, g)).real();
        }
        const double e_min = detail::min_pencil_eig_2x2(e_direct, d, b, gv);
        others.emplace_back(g, e_direct - e_min);
    }
    std::stable_sort(others.begin(), others.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });

    FilterResult out;
    out.ranked.reserve(basis.size());
    out.ranked.emplace_back(basis[0], 0.0);
    out.ranked.insert(out.ranked.end(), others.begin(), others.end());
    out.k_kept = std::min<int>(keep_k, static_cast<int>(out.ranked.size()));
    return out;
}

struct SseMatrices {
    std::vector<PauliString> basis;  // empty for frame-transformed matrices
    Eigen::MatrixXcd S, H;
    std::optional<Eigen::MatrixXcd> A;  // symmetry observable, same frame
};

// S_ij = <G_i G_j>, H_ij = sum_k beta_k <G_i H_k G_j>, optionally
// A_ij = sum_k alpha_k <G_i A_k G_j>.  Every Pauli word is estimated once via
// the estimator's cache; the results are Hermitized, which under noisy modes
// is where the conjugate-pair averaging happens.
inline SseMatrices assemble_matrices(const std::vector<PauliString>& basis,
                                     const ObservableSum& h, Estimator& est,
                                     const ObservableSum* symmetry = nullptr) {
    const int k = static_cast<int>(basis.size());
    if (k < 1) throw std::invalid_argument("empty expansion basis");
    SseMatrices m;
    m.basis = basis;
    m.S.resize(k, k);
    m.H.resize(k, k);
    if (symmetry) m.A.emplace(k, k);
    for (int i = 0; i < k; ++i) {
        const auto& gi = basis[static_cast<std::size_t>(i)];
        for (int j = 0; j < k; ++j) {
            const auto& gj = basis[static_cast<std::size_t>(j)];
            m.S(i, j) = est.estimate(multiply(gi, gj));
            cplx hij = 0;
            for (const auto& t : h.terms) hij += t.coeff * est.estimate(sandwich(gi, t.word, gj));
            m.H(i, j) = hij;
            if (symmetry) {
                cplx aij = 0;
                for (const auto& t : symmetry->terms)
                    aij += t.coeff * est.estimate(sandwich(gi, t.word, gj));
                (*m.A)(i, j) = aij;
            }
        }
    }
    m.S = detail::hermitize(m.S);
    m.H = detail::hermitize(m.H);
    if (m.A) *m.A = detail::hermitize(*m.A);
    return m;
}

struct RegularizationConfig {
    double eigenvalue_floor = 1e-12;
    int window = 5;      // moving-variance window
    int k_tilde_max = 0; // clamp on the truncation scan; <= 0 means unclamped
    int scan_step = 1;
    // The variance rule exists to stop noise amplification; with exact
    // estimates the floor alone regularizes and the full subspace is kept.
    bool use_variance_rule = true;

    void validate() const {
        if (eigenvalue_floor < 0) throw std::invalid_argument("eigenvalue_floor must be >= 0");
        if (window < 1) throw std::invalid_argument("window must be >= 1");
        if (scan_step < 1) throw std::invalid_argument("scan_step must be >= 1");
    }
};

struct TruncationChoice {
    std::size_t index = 0;
    bool warning = false;  // fewer energies than the window length
};

// Moving variance v_j over the window of `window` energies ending at j.
// Chosen index: the first strict local minimum of v followed by `window`
// consecutive non-decreasing steps; fallback is the global minimum of v with
// ties resolved towards the end (a constant sequence keeps everything).
inline TruncationChoice choose_truncation(const std::vector<double>& energies, int window) {
    if (energies.empty()) throw std::invalid_argument("empty energy sequence");
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    const std::size_t n = energies.size();
    if (n < static_cast<std::size_t>(window)) return {n - 1, true};

    const std::size_t w = static_cast<std::size_t>(window);
    const std::size_t first = w - 1;
    std::vector<double> var(n, 0.0);
    for (std::size_t j = first; j < n; ++j) {
        double mean = 0;
        for (std::size_t i = j + 1 - w; i <= j; ++i) mean += energies[i];
        mean /= static_cast<double>(w);
        double v = 0;
        for (std::size_t i = j + 1 - w; i <= j; ++i)
            v += (energies[i] - mean) * (energies[i] - mean);
        var[j] = v / static_cast<double>(w);
    }

    for (std::size_t j = first + 1; j + w < n; ++j) {
        if (!(var[j] < var[j - 1])) continue;  // strict drop into j
        bool rising = true;
        for (std::size_t m = 0; m < w; ++m)
            if (var[j + m + 1] < var[j + m]) {
                rising = false;
                break;
            }
        if (rising) return {j, false};
    }

    std::size_t best = first;
    for (std::size_t j = first; j < n; ++j)
        if (var[j] <= var[best]) best = j;
    return {best, false};
}

struct SseResult {
    double E_direct = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::pair<int, double>> energies_per_level;  // (l, E_0^l)
    int K_tilde = 0;
    double E_sse = std::numeric_limits<double>::quiet_NaN();
    double E_reported = std::numeric_limits<double>::quiet_NaN();
    Eigen::VectorXcd weights;               // frame of the input matrices
    std::vector<double> subspace_spectrum;  // all eigenvalues at K_tilde
    bool truncation_warning = false;
};

// Regularize S by discarding eigenvalues <= floor, scan truncation levels l,
// solve the equivalent standard problem S~^{-1/2} H~ S~^{-1/2} at each l, and
// pick K~ by the moving-variance rule (or keep everything when the rule is
// disabled).  Weights come back in the original K-dimensional frame with
// w^dag S w = 1.
inline SseResult regularized_gevp(const SseMatrices& m, const RegularizationConfig& cfg) {
    cfg.validate();
    const Eigen::MatrixXcd S = detail::hermitize(m.S);
    const Eigen::MatrixXcd H = detail::hermitize(m.H);
    const int k = static_cast<int>(S.rows());
    if (S.cols() != k || H.rows() != k || H.cols() != k)
        throw std::invalid_argument("S/H dimension mismatch");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(S);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed on S");

    // eigenpairs above the floor, descending
    std::vector<int> order;
    for (int i = k - 1; i >= 0; --i)
        if (es.eigenvalues()[i] > cfg.eigenvalue_floor) order.push_back(i);
    if (order.empty()) throw NumericalError("overlap matrix fully degenerate");

    int levels_max = static_cast<int>(order.size());
    if (cfg.k_tilde_max > 0) levels_max = std::min(levels_max, cfg.k_tilde_max);

    Eigen::MatrixXcd q(k, levels_max);
    Eigen::VectorXd inv_sqrt(levels_max);
    for (int c = 0; c < levels_max; ++c) {
        q.col(c) = es.eigenvectors().col(order[static_cast<std::size_t>(c)]);
        inv_sqrt[c] = 1.0 / std::sqrt(es.eigenvalues()[order[static_cast<std::size_t>(c)]]);
    }
    // B = S~^{-1/2} (Q^dag H Q) S~^{-1/2} built once at full size
    Eigen::MatrixXcd b = q.adjoint() * H * q;
    for (int r = 0; r < levels_max; ++r)
        for (int c = 0; c < levels_max; ++c) b(r, c) *= inv_sqrt[r] * inv_sqrt[c];
    b = detail::hermitize(b);

    std::vector<int> levels;
    for (int l = 1; l <= levels_max; l += cfg.scan_step) levels.push_back(l);
    if (levels.back() != levels_max) levels.push_back(levels_max);

    SseResult out;
    std::vector<double> energies;
    energies.reserve(levels.size());
    for (int l : levels) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> sub(b.topLeftCorner(l, l),
                                                            Eigen::EigenvaluesOnly);
        if (sub.info() != Eigen::Success) throw NumericalError("eigensolver failed in scan");
        energies.push_back(sub.eigenvalues()[0]);
        out.energies_per_level.emplace_back(l, sub.eigenvalues()[0]);
    }

    std::size_t chosen = energies.size() - 1;
    if (cfg.use_variance_rule) {
        const TruncationChoice tc = choose_truncation(energies, cfg.window);
        chosen = tc.index;
        out.truncation_warning = tc.warning;
    }
    const int k_tilde = levels[chosen];

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> fin(b.topLeftCorner(k_tilde, k_tilde));
    if (fin.info() != Eigen::Success) throw NumericalError("eigensolver failed at K~");
    out.K_tilde = k_tilde;
    out.E_sse = fin.eigenvalues()[0];
    out.E_reported = out.E_sse;
    out.subspace_spectrum.assign(fin.eigenvalues().data(),
                                 fin.eigenvalues().data() + k_tilde);

    Eigen::VectorXcd v_tilde = fin.eigenvectors().col(0);
    for (int r = 0; r < k_tilde; ++r) v_tilde[r] *= inv_sqrt[r];
    out.weights = q.leftCols(k_tilde) * v_tilde;
    const double norm = (out.weights.adjoint() * S * out.weights)(0, 0).real();
    if (norm > 0) out.weights /= std::sqrt(norm);

    if (!m.basis.empty() && m.basis[0].is_identity()) out.E_direct = H(0, 0).real();
    return out;
}

// Reported energy never exceeds the direct estimate, which is always known.
inline double clamp_to_direct(double e_sse, double e_direct) {
    if (std::isnan(e_sse)) return e_direct;
    return std::min(e_sse, e_direct);
}

// <O>_w = (w^dag O w) / (w^dag S w) with O assembled like H on m's basis.
inline double reconstruct_observable(const ObservableSum& o, const SseResult& r,
                                     const SseMatrices& m, Estimator& est,
                                     double floor = 1e-12) {
    if (m.basis.empty())
        throw std::invalid_argument("reconstruction needs a Pauli-basis frame");
    if (r.weights.size() != static_cast<long>(m.basis.size()))
        throw std::invalid_argument("weight vector does not match basis size");
    SseMatrices om = assemble_matrices(m.basis, o, est);
    const double num = (r.weights.adjoint() * om.H * r.weights)(0, 0).real();
    const double den = (r.weights.adjoint() * detail::hermitize(m.S) * r.weights)(0, 0).real();
    if (std::abs(den) <= floor) throw NumericalError("zero normalization in reconstruction");
    return num / den;
}

// Keep only operators commuting with every term of the symmetry observable.
// The identity always survives.
inline std::vector<PauliString> symmetry_commuting_filter(const std::vector<PauliString>& basis,
                                                          const ObservableSum& a) {
    std::vector<PauliString> out;
    out.reserve(basis.size());
    for (const auto& g : basis) {
        bool ok = true;
        for (const auto& t : a.terms)
            if (!commutes(g, t.word)) {
                ok = false;
                break;
            }
        if (ok) out.push_back(g);
    }
    return out;
}

struct ProjectionResult {
    SseMatrices matrices;       // S' = I, H' in the projected sector frame
    Eigen::MatrixXcd frame;     // maps sector-frame vectors to the basis frame
    std::vector<double> sector_eigenvalues;  // accepted generalized eigenvalues
};

// Solve A w = a S w in the regularized subspace of S and keep the eigenvectors
// with |a - target| <= tol; transform H (and S, which becomes the identity)
// into that sector.
inline ProjectionResult symmetry_project(const SseMatrices& m, double target, double tol,
                                         double floor = 1e-12) {
    if (!m.A) throw std::invalid_argument("matrices carry no symmetry observable");
    const Eigen::MatrixXcd S = detail::hermitize(m.S);
    const Eigen::MatrixXcd A = detail::hermitize(*m.A);
    const Eigen::MatrixXcd H = detail::hermitize(m.H);
    const int k = static_cast<int>(S.rows());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(S);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed on S");
    std::vector<int> order;
    for (int i = k - 1; i >= 0; --i)
        if (es.eigenvalues()[i] > floor) order.push_back(i);
    if (order.empty()) throw NumericalError("overlap matrix fully degenerate");

    const int l = static_cast<int>(order.size());
    Eigen::MatrixXcd q(k, l);
    for (int c = 0; c < l; ++c) {
        q.col(c) = es.eigenvectors().col(order[static_cast<std::size_t>(c)]) /
                   std::sqrt(es.eigenvalues()[order[static_cast<std::size_t>(c)]]);
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> sector(
        detail::hermitize(q.adjoint() * A * q));
    if (sector.info() != Eigen::Success) throw NumericalError("eigensolver failed on A");

    std::vector<int> keep;
    for (int i = 0; i < l; ++i)
        if (std::abs(sector.eigenvalues()[i] - target) <= tol) keep.push_back(i);
    if (keep.empty()) throw NumericalError("empty symmetry sector");

    ProjectionResult out;
    const int mm = static_cast<int>(keep.size());
    out.frame.resize(k, mm);
    for (int c = 0; c < mm; ++c) {
        out.frame.col(c) = q * sector.eigenvectors().col(keep[static_cast<std::size_t>(c)]);
        out.sector_eigenvalues.push_back(sector.eigenvalues()[keep[static_cast<std::size_t>(c)]]);
    }
    out.matrices.S = detail::hermitize(out.frame.adjoint() * S * out.frame);
    out.matrices.H = detail::hermitize(out.frame.adjoint() * H * out.frame);
    out.matrices.A = detail::hermitize(out.frame.adjoint() * A * out.frame);
    return out;
}

struct SymmetryOptions {
    enum class Mode { Filter, Project };
    Mode mode = Mode::Filter;
    ObservableSum observable;
    double target = 1.0;
    double tolerance = 1e-6;
};

struct PipelineOptions {
    ObservableSum hamiltonian;
    EstimatorMode mode;
    std::uint64_t noise_seed = 0;
    std::uint64_t shadow_seed = 0;
    // When set, the filter stage consumes an independent noise/shadow stream
    // instead of reusing the assembly estimates.
    bool fresh_filter_stream = false;
    int basis_weight = 2;
    long basis_cap = 0;  // keep at most this many enumerated operators; 0 = all
    int keep_k = 1;
    RegularizationConfig reg;
    std::optional<SymmetryOptions> symmetry;
};

struct PipelineRun {
    std::vector<PauliString> candidate_basis;  // post symmetry-filter enumeration
    FilterResult filter;
    SseMatrices matrices;                      // kept-basis frame, pre-projection
    std::vector<double> overlap_spectrum;      // eigenvalues of S, descending
    std::vector<double> sector_eigenvalues;    // symmetry projection only
    SseResult result;
};

inline PipelineRun run_pipeline(const PipelineOptions& opt, const QuantumState& state) {
    const int n = state_qubits(state);
    if (opt.hamiltonian.n != n)
        throw std::invalid_argument("Hamiltonian/state qubit count mismatch");
    if (opt.symmetry && opt.symmetry->observable.n != n)
        throw std::invalid_argument("symmetry/state qubit count mismatch");
    opt.reg.validate();

    PipelineRun run;
    run.candidate_basis = enumerate_up_to_weight(n, std::min(opt.basis_weight, n));
    if (opt.basis_cap > 0 && static_cast<long>(run.candidate_basis.size()) > opt.basis_cap)
        run.candidate_basis.resize(static_cast<std::size_t>(opt.basis_cap));
    if (opt.symmetry && opt.symmetry->mode == SymmetryOptions::Mode::Filter)
        run.candidate_basis = symmetry_commuting_filter(run.candidate_basis,
                                                        opt.symmetry->observable);

    Estimator est(state, opt.mode, opt.noise_seed, opt.shadow_seed);
    std::optional<Estimator> filter_est;
    if (opt.fresh_filter_stream)
        filter_est.emplace(state, opt.mode, derive_stream(opt.noise_seed, 0x66696c74ULL),
                           derive_stream(opt.shadow_seed, 0x66696c74ULL));

    run.filter = local_filter(run.candidate_basis, opt.hamiltonian,
                              filter_est ? *filter_est : est, opt.keep_k,
                              opt.reg.eigenvalue_floor);

    const bool project =
        opt.symmetry && opt.symmetry->mode == SymmetryOptions::Mode::Project;
    run.matrices = assemble_matrices(run.filter.kept(), opt.hamiltonian, est,
                                     project ? &opt.symmetry->observable : nullptr);

    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(detail::hermitize(run.matrices.S),
                                                           Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed on S");
        run.overlap_spectrum.assign(es.eigenvalues().data(),
                                    es.eigenvalues().data() + es.eigenvalues().size());
        std::reverse(run.overlap_spectrum.begin(), run.overlap_spectrum.end());
    }

    RegularizationConfig reg = opt.reg;
    if (opt.mode.is_exact()) reg.use_variance_rule = false;

    const double e_direct = detail::hermitize(run.matrices.H)(0, 0).real();
    if (project) {
        ProjectionResult proj = symmetry_project(run.matrices, opt.symmetry->target,
                                                 opt.symmetry->tolerance,
                                                 opt.reg.eigenvalue_floor);
        run.sector_eigenvalues = proj.sector_eigenvalues;
        run.result = regularized_gevp(proj.matrices, reg);
        run.result.weights = proj.frame * run.result.weights;
        run.result.E_direct = e_direct;
        // The direct estimate lives in the unprojected (sector-mixing) state,
        // so clamping against it would undo the projection; report E_sse.
        run.result.E_reported = run.result.E_sse;
    } else {
        run.result = regularized_gevp(run.matrices, reg);
        run.result.E_direct = e_direct;
        run.result.E_reported = clamp_to_direct(run.result.E_sse, run.result.E_direct);
    }
    return run;
}

}  // namespace sse
