#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <random>

#include "sse/estimator.hpp"
#include "sse/hamiltonian.hpp"
#include "sse/sse.hpp"
#include "test_util.hpp"

using namespace sse;
using Catch::Approx;

namespace {

StateVector zero_state(int n) { return StateVector(n); }

ObservableSum single_term(int n, const std::string& word, double coeff = 1.0) {
    ObservableSum h(n);
    h.add(coeff, PauliString(word));
    return h;
}

// Random Hermitian positive semi-definite matrix with unit diagonal scale.
Eigen::MatrixXcd random_psd(int k, std::mt19937_64& rng, double ridge) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXcd m(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) m(i, j) = cplx{g(rng), g(rng)};
    Eigen::MatrixXcd s = m * m.adjoint() / static_cast<double>(k);
    s += ridge * Eigen::MatrixXcd::Identity(k, k);
    return s;
}

Eigen::MatrixXcd random_hermitian(int k, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXcd m(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) m(i, j) = cplx{g(rng), g(rng)};
    return 0.5 * (m + m.adjoint());
}

double filter_gain(const FilterResult& fr, const std::string& word) {
    for (const auto& [w, de] : fr.ranked)
        if (w.str() == word) return de;
    FAIL("word not present in filter ranking: " << word);
    return 0;
}

}  // namespace

TEST_CASE("local filter reproduces closed-form two-level gains") {
    QuantumState state = zero_state(1);
    Estimator est(state, EstimatorMode::exact(), 0);
    std::vector<PauliString> basis = enumerate_up_to_weight(1, 1);  // I X Y Z

    // H = X on |0>: <H> = 0, the {I, X} block has eigenvalues -1/+1.
    FilterResult fx = local_filter(basis, single_term(1, "X"), est, 4);
    CHECK(filter_gain(fx, "X") == Approx(1.0).margin(1e-12));

    // H = Z on |0>: <H> = 1, expanding with X reaches the ground state at -1.
    FilterResult fz = local_filter(basis, single_term(1, "Z"), est, 4);
    CHECK(filter_gain(fz, "X") == Approx(2.0).margin(1e-12));
    CHECK(filter_gain(fz, "Y") == Approx(2.0).margin(1e-12));
    // Z stabilizes |0>: degenerate 2x2 overlap, skipped with zero gain.
    CHECK(filter_gain(fz, "Z") == 0.0);
}

TEST_CASE("local filter gains vanish on an eigenstate and are never negative") {
    ObservableSum h = build_spin_ring(4, 0.1, 77u);
    GroundState gs = exact_ground(h);
    QuantumState ground = gs.state;
    Estimator est(ground, EstimatorMode::exact(), 0);
    std::vector<PauliString> basis = enumerate_up_to_weight(4, 2);
    FilterResult fr = local_filter(basis, h, est, static_cast<int>(basis.size()));
    for (const auto& [w, de] : fr.ranked) {
        CHECK(de >= -1e-9);
        CHECK(de <= 1e-9);  // nothing improves on the exact ground state
    }

    QuantumState generic = random_state(4, 11u);
    Estimator est2(generic, EstimatorMode::exact(), 0);
    FilterResult fr2 = local_filter(basis, h, est2, 10);
    for (const auto& [w, de] : fr2.ranked) CHECK(de >= -1e-9);
}

TEST_CASE("local filter keeps the identity first and respects keep_k") {
    QuantumState state = random_state(3, 5u);
    ObservableSum h = build_spin_ring(3, 0.1, 3u);
    Estimator est(state, EstimatorMode::exact(), 0);
    std::vector<PauliString> basis = enumerate_up_to_weight(3, 2);

    FilterResult one = local_filter(basis, h, est, 1);
    REQUIRE(one.k_kept == 1);
    CHECK(one.kept()[0].is_identity());

    FilterResult five = local_filter(basis, h, est, 5);
    REQUIRE(five.k_kept == 5);
    CHECK(five.kept()[0].is_identity());
    const auto& r = five.ranked;
    for (std::size_t i = 2; i < r.size(); ++i) CHECK(r[i - 1].second >= r[i].second);

    // requesting more than available clamps to the basis size
    FilterResult all = local_filter(basis, h, est, 1000);
    CHECK(all.k_kept == static_cast<int>(basis.size()));

    CHECK_THROWS_AS(local_filter(basis, h, est, 0), std::invalid_argument);
    std::vector<PauliString> headless(basis.begin() + 1, basis.end());
    CHECK_THROWS_AS(local_filter(headless, h, est, 1), std::invalid_argument);
}

TEST_CASE("local filter breaks ties by enumeration order") {
    // On |0> with H = Z every single-qubit X_i and Y_i gains exactly 2.
    QuantumState state = zero_state(2);
    ObservableSum h(2);
    h.add(1.0, PauliString("ZI"));
    Estimator est(state, EstimatorMode::exact(), 0);
    std::vector<PauliString> basis = enumerate_up_to_weight(2, 1);  // II XI YI ZI IX IY IZ
    FilterResult fr = local_filter(basis, h, est, 3);
    auto kept = fr.kept();
    REQUIRE(kept.size() == 3);
    CHECK(kept[0].str() == "II");
    CHECK(kept[1].str() == "XI");
    CHECK(kept[2].str() == "YI");
}

TEST_CASE("assembled matrices match the dense oracle") {
    std::mt19937_64 rng(42);
    QuantumState state = random_state(3, 9001u);
    const Eigen::VectorXcd& psi = std::get<StateVector>(state).amps;
    ObservableSum h = build_spin_ring(3, 0.1, 17u);
    Estimator est(state, EstimatorMode::exact(), 0);

    std::vector<PauliString> basis{PauliString("III"), PauliString("XII"),
                                   PauliString("IYI"), PauliString("ZZI"),
                                   PauliString("XYZ")};
    SseMatrices m = assemble_matrices(basis, h, est);

    Eigen::MatrixXcd hd = oracle::observable_matrix(h);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            Eigen::MatrixXcd gi = oracle::word_matrix(basis[static_cast<std::size_t>(i)]);
            Eigen::MatrixXcd gj = oracle::word_matrix(basis[static_cast<std::size_t>(j)]);
            cplx s_ref = psi.adjoint() * gi * gj * psi;
            cplx h_ref = psi.adjoint() * gi * hd * gj * psi;
            CHECK(std::abs(m.S(i, j) - s_ref) < 1e-10);
            CHECK(std::abs(m.H(i, j) - h_ref) < 1e-10);
        }

    CHECK((m.S - m.S.adjoint()).norm() < 1e-14);
    CHECK((m.H - m.H.adjoint()).norm() < 1e-14);
    for (int i = 0; i < 5; ++i) CHECK(m.S(i, i).real() == Approx(1.0).margin(1e-12));
}

TEST_CASE("assembly on {I, X} against hand values") {
    QuantumState state = zero_state(1);
    Estimator est(state, EstimatorMode::exact(), 0);
    std::vector<PauliString> basis{PauliString("I"), PauliString("X")};
    SseMatrices m = assemble_matrices(basis, single_term(1, "Z"), est);
    CHECK(std::abs(m.S(0, 0) - cplx{1, 0}) < 1e-14);
    CHECK(std::abs(m.S(0, 1)) < 1e-14);  // <X> = 0 on |0>
    CHECK(std::abs(m.H(0, 0) - cplx{1, 0}) < 1e-14);
    CHECK(std::abs(m.H(1, 1) - cplx{-1, 0}) < 1e-14);  // XZX = -Z
    CHECK(std::abs(m.H(0, 1)) < 1e-14);                // ZX = iY, <Y> = 0
}

TEST_CASE("regularized solve matches a generalized eigensolver on clean input") {
    std::mt19937_64 rng(7);
    for (int k : {3, 8, 17}) {
        SseMatrices m;
        m.S = random_psd(k, rng, 0.5);
        m.H = random_hermitian(k, rng);
        RegularizationConfig cfg;
        cfg.use_variance_rule = false;
        SseResult r = regularized_gevp(m, cfg);

        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ref(m.H, m.S);
        CHECK(r.E_sse == Approx(ref.eigenvalues()[0]).margin(1e-9));
        CHECK(r.K_tilde == k);

        // weights solve the pencil: ||H w - E S w|| small, w^dag S w = 1
        double resid = (m.H * r.weights - r.E_sse * m.S * r.weights).norm();
        CHECK(resid < 1e-8);
        double norm = (r.weights.adjoint() * m.S * r.weights)(0, 0).real();
        CHECK(norm == Approx(1.0).margin(1e-10));

        CHECK(static_cast<int>(r.subspace_spectrum.size()) == k);
        for (std::size_t i = 1; i < r.subspace_spectrum.size(); ++i)
            CHECK(r.subspace_spectrum[i - 1] <= r.subspace_spectrum[i]);
    }
}

TEST_CASE("energy per level is non-increasing and the scan nests") {
    std::mt19937_64 rng(19);
    SseMatrices m;
    m.S = random_psd(12, rng, 0.3);
    m.H = random_hermitian(12, rng);
    RegularizationConfig cfg;
    cfg.use_variance_rule = false;
    SseResult r = regularized_gevp(m, cfg);
    REQUIRE(r.energies_per_level.size() == 12);
    for (std::size_t i = 1; i < r.energies_per_level.size(); ++i)
        CHECK(r.energies_per_level[i].second <= r.energies_per_level[i - 1].second + 1e-12);
}

TEST_CASE("eigenvalue floor discards exact null directions") {
    std::mt19937_64 rng(23);
    Eigen::MatrixXcd s = random_psd(6, rng, 0.4);
    Eigen::MatrixXcd h = random_hermitian(6, rng);
    // duplicate the last row/column: S gains an exact null direction
    SseMatrices m;
    m.S.resize(7, 7);
    m.H.resize(7, 7);
    m.S.topLeftCorner(6, 6) = s;
    m.H.topLeftCorner(6, 6) = h;
    for (int i = 0; i < 7; ++i) {
        int ii = std::min(i, 5);
        m.S(i, 6) = s(ii, 5);
        m.S(6, i) = s(5, ii);
        m.H(i, 6) = h(ii, 5);
        m.H(6, i) = h(5, ii);
    }
    RegularizationConfig cfg;
    cfg.use_variance_rule = false;
    SseResult dup = regularized_gevp(m, cfg);
    SseMatrices base{{}, s, h, std::nullopt};
    SseResult ref = regularized_gevp(base, cfg);
    CHECK(dup.K_tilde == 6);  // the null direction is gone
    CHECK(dup.E_sse == Approx(ref.E_sse).margin(1e-10));
}

TEST_CASE("fully degenerate overlap matrix raises a numerical error") {
    SseMatrices m;
    m.S = Eigen::MatrixXcd::Zero(4, 4);
    m.H = Eigen::MatrixXcd::Identity(4, 4);
    RegularizationConfig cfg;
    CHECK_THROWS_AS(regularized_gevp(m, cfg), NumericalError);
    CHECK_THROWS_WITH(regularized_gevp(m, cfg),
                      Catch::Matchers::ContainsSubstring("fully degenerate"));
}

TEST_CASE("truncation clamp caps the scan depth") {
    std::mt19937_64 rng(31);
    SseMatrices m;
    m.S = random_psd(20, rng, 0.25);
    m.H = random_hermitian(20, rng);
    RegularizationConfig cfg;
    cfg.k_tilde_max = 7;
    SseResult r = regularized_gevp(m, cfg);
    CHECK(r.K_tilde <= 7);
    CHECK(r.energies_per_level.size() == 7);
    CHECK(r.energies_per_level.back().first == 7);

    cfg.k_tilde_max = 0;
    cfg.use_variance_rule = false;
    SseResult full = regularized_gevp(m, cfg);
    CHECK(full.K_tilde == 20);
}

TEST_CASE("scan step still visits the final level") {
    std::mt19937_64 rng(37);
    SseMatrices m;
    m.S = random_psd(10, rng, 0.3);
    m.H = random_hermitian(10, rng);
    RegularizationConfig cfg;
    cfg.scan_step = 4;
    cfg.use_variance_rule = false;
    SseResult r = regularized_gevp(m, cfg);
    std::vector<int> levels;
    for (const auto& [l, e] : r.energies_per_level) levels.push_back(l);
    CHECK(levels == std::vector<int>{1, 5, 9, 10});
    CHECK(r.K_tilde == 10);
}

TEST_CASE("config validation rejects bad parameters") {
    SseMatrices m;
    m.S = Eigen::MatrixXcd::Identity(2, 2);
    m.H = Eigen::MatrixXcd::Identity(2, 2);
    RegularizationConfig cfg;
    cfg.window = 0;
    CHECK_THROWS_AS(regularized_gevp(m, cfg), std::invalid_argument);
    cfg = {};
    cfg.eigenvalue_floor = -1;
    CHECK_THROWS_AS(regularized_gevp(m, cfg), std::invalid_argument);
    cfg = {};
    cfg.scan_step = 0;
    CHECK_THROWS_AS(regularized_gevp(m, cfg), std::invalid_argument);
}

TEST_CASE("moving-variance rule on designed sequences") {
    SECTION("constant sequence keeps the last level") {
        std::vector<double> e(12, -3.5);
        TruncationChoice c = choose_truncation(e, 5);
        CHECK(c.index == 11);
        CHECK_FALSE(c.warning);
    }

    SECTION("flat run followed by exploding oscillation stops inside the flat run") {
        std::vector<double> e;
        for (int i = 0; i < 20; ++i) e.push_back(-2.0);
        for (int i = 0; i < 15; ++i) e.push_back((i % 2 ? 1.0 : -1.0) * (3.0 + i));
        TruncationChoice c = choose_truncation(e, 5);
        CHECK(c.index <= 19);
    }

    SECTION("settling then diverging stops at the first settled window") {
        std::vector<double> e{8.0, 4.0, 2.0, 1.0, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
        for (int i = 0; i < 10; ++i) e.push_back((i % 2 ? 1.0 : -1.0) * (3.0 + 2.0 * i));
        TruncationChoice c = choose_truncation(e, 5);
        CHECK(c.index == 8);  // first window fully inside the plateau
        CHECK_FALSE(c.warning);
        CHECK(e[c.index] == 0.5);
    }

    SECTION("smooth monotone decrease keeps the last level") {
        std::vector<double> e;
        for (int i = 0; i < 30; ++i) e.push_back(-1.0 + std::pow(0.7, i));
        TruncationChoice c = choose_truncation(e, 5);
        CHECK(c.index == 29);
    }

    SECTION("tied variances resolve towards the end") {
        std::vector<double> e;
        for (int i = 0; i < 14; ++i) e.push_back(i % 2 ? 2.0 : 1.0);
        TruncationChoice c = choose_truncation(e, 5);
        CHECK(c.index == 13);
    }

    SECTION("sequences shorter than the window keep the last level with a warning") {
        std::vector<double> e{3.0, 2.0, 1.0};
        TruncationChoice c = choose_truncation(e, 5);
        CHECK(c.index == 2);
        CHECK(c.warning);
    }

    SECTION("empty input is rejected") {
        CHECK_THROWS_AS(choose_truncation({}, 5), std::invalid_argument);
    }
}

TEST_CASE("clamp to the direct estimate") {
    CHECK(clamp_to_direct(-2.0, -1.0) == -2.0);
    CHECK(clamp_to_direct(-0.5, -1.0) == -1.0);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK(clamp_to_direct(nan, -1.0) == -1.0);
}

TEST_CASE("duplicate expansion operators do not move the energy") {
    QuantumState state = random_state(3, 21u);
    ObservableSum h = build_spin_ring(3, 0.1, 4u);
    Estimator est(state, EstimatorMode::exact(), 0);

    std::vector<PauliString> basis = enumerate_up_to_weight(3, 1);
    std::vector<PauliString> doubled = basis;
    doubled.push_back(basis[3]);
    doubled.push_back(basis[5]);

    RegularizationConfig cfg;
    cfg.use_variance_rule = false;
    SseResult a = regularized_gevp(assemble_matrices(basis, h, est), cfg);
    SseResult b = regularized_gevp(assemble_matrices(doubled, h, est), cfg);
    CHECK(b.E_sse == Approx(a.E_sse).margin(1e-10));
}

TEST_CASE("observable reconstruction in the expanded frame") {
    QuantumState state = random_state(3, 33u);
    ObservableSum h = build_spin_ring(3, 0.1, 6u);
    Estimator est(state, EstimatorMode::exact(), 0);
    std::vector<PauliString> basis = enumerate_up_to_weight(3, 2);
    SseMatrices m = assemble_matrices(basis, h, est);
    RegularizationConfig cfg;
    cfg.use_variance_rule = false;
    SseResult r = regularized_gevp(m, cfg);

    // reconstructing H itself returns the subspace energy
    CHECK(reconstruct_observable(h, r, m, est) == Approx(r.E_sse).margin(1e-9));

    // the identity observable always reconstructs to one
    ObservableSum id(3);
    id.add(1.0, PauliString(3));
    CHECK(reconstruct_observable(id, r, m, est) == Approx(1.0).margin(1e-9));

    // unit weight on the identity recovers the direct estimate
    SseResult unit = r;
    unit.weights = Eigen::VectorXcd::Zero(static_cast<long>(basis.size()));
    unit.weights[0] = 1.0;
    CHECK(reconstruct_observable(h, unit, m, est) ==
          Approx(exact_expectation(state, h)).margin(1e-9));

    SseMatrices frameless;
    frameless.S = m.S;
    frameless.H = m.H;
    CHECK_THROWS_AS(reconstruct_observable(h, r, frameless, est), std::invalid_argument);
}

TEST_CASE("commuting filter keeps exactly the symmetry-compatible words") {
    std::vector<PauliString> basis = enumerate_up_to_weight(2, 2);
    ObservableSum parity(2);
    parity.add(1.0, PauliString("ZZ"));
    std::vector<PauliString> kept = symmetry_commuting_filter(basis, parity);
    std::vector<std::string> names;
    for (const auto& w : kept) names.push_back(w.str());
    CHECK(names == std::vector<std::string>{"II", "ZI", "IZ", "XX", "XY", "YX", "YY", "ZZ"});

    ObservableSum id(2);
    id.add(1.0, PauliString(2));
    CHECK(symmetry_commuting_filter(basis, id).size() == basis.size());

    ObservableSum z(1);
    z.add(1.0, PauliString("Z"));
    std::vector<PauliString> small{PauliString("I"), PauliString("X")};
    std::vector<PauliString> onlyi = symmetry_commuting_filter(small, z);
    REQUIRE(onlyi.size() == 1);
    CHECK(onlyi[0].is_identity());
}

TEST_CASE("sector projection recovers the restricted ground energy") {
    // H commutes with the parity ZZ; the global ground state sits in the odd
    // sector while the even sector bottoms out higher.
    ObservableSum h(2);
    h.add(1.0, PauliString("XX"));
    h.add(1.0, PauliString("YY"));
    h.add(0.5, PauliString("ZI"));
    h.add(0.5, PauliString("IZ"));
    ObservableSum parity(2);
    parity.add(1.0, PauliString("ZZ"));

    Eigen::VectorXcd amps(4);
    amps << cplx{1.0, 0.1}, cplx{0.5, 0.0}, cplx{0.3, -0.2}, cplx{0.4, 0.3};
    amps /= amps.norm();
    QuantumState state = StateVector(2, amps);
    Estimator est(state, EstimatorMode::exact(), 0);

    std::vector<PauliString> basis = enumerate_up_to_weight(2, 2);
    SseMatrices m = assemble_matrices(basis, h, est, &parity);
    RegularizationConfig cfg;
    cfg.use_variance_rule = false;

    SseResult unprojected = regularized_gevp(m, cfg);
    CHECK(unprojected.E_sse == Approx(-2.0).margin(1e-8));  // odd-sector minimum

    ProjectionResult proj = symmetry_project(m, +1.0, 1e-6);
    for (double a : proj.sector_eigenvalues) CHECK(a == Approx(1.0).margin(1e-9));
    const long dim = proj.matrices.S.rows();
    CHECK((proj.matrices.S - Eigen::MatrixXcd::Identity(dim, dim)).norm() < 1e-9);

    SseResult projected = regularized_gevp(proj.matrices, cfg);
    CHECK(projected.E_sse == Approx(-1.0).margin(1e-8));  // even-sector minimum

    // weights mapped back to the word frame stay inside the target sector
    Eigen::VectorXcd w = proj.frame * projected.weights;
    SseResult carried = projected;
    carried.weights = w;
    CHECK(reconstruct_observable(parity, carried, m, est) == Approx(1.0).margin(1e-8));

    CHECK_THROWS_AS(symmetry_project(m, 5.0, 1e-6), NumericalError);
    CHECK_THROWS_WITH(symmetry_project(m, 5.0, 1e-6),
                      Catch::Matchers::ContainsSubstring("empty symmetry sector"));
    SseMatrices no_a = m;
    no_a.A.reset();
    CHECK_THROWS_AS(symmetry_project(no_a, 1.0, 1e-6), std::invalid_argument);
}

TEST_CASE("pipeline exactness on a full basis") {
    ObservableSum h = build_spin_ring(3, 0.1, 8u);
    PipelineOptions opt;
    opt.hamiltonian = h;
    opt.mode = EstimatorMode::exact();
    opt.basis_weight = 3;
    opt.keep_k = 64;

    QuantumState state = random_state(3, 1234u);
    PipelineRun run = run_pipeline(opt, state);
    GroundState gs = exact_ground(h);

    CHECK(run.result.E_sse == Approx(gs.energy).margin(1e-8));
    CHECK(run.result.E_reported == Approx(gs.energy).margin(1e-8));
    CHECK(run.result.E_direct == Approx(exact_expectation(state, h)).margin(1e-10));
    CHECK(run.result.E_sse <= run.result.E_direct + 1e-12);
    CHECK(run.result.E_sse >= gs.energy - 1e-8);
}

TEST_CASE("pipeline energies improve monotonically with the budget") {
    ObservableSum h = build_spin_ring(4, 0.1, 12u);
    QuantumState state = random_state(4, 55u);
    double prev = std::numeric_limits<double>::infinity();
    for (int k : {1, 4, 16, 48}) {
        PipelineOptions opt;
        opt.hamiltonian = h;
        opt.mode = EstimatorMode::exact();
        opt.basis_weight = 2;
        opt.keep_k = k;
        PipelineRun run = run_pipeline(opt, state);
        CHECK(run.result.E_sse <= prev + 1e-10);
        prev = run.result.E_sse;
        if (k == 1) CHECK(run.result.E_sse == Approx(run.result.E_direct).margin(1e-12));
    }
}

TEST_CASE("pipeline artifacts are populated and deterministic under noise") {
    ObservableSum h = build_spin_ring(3, 0.1, 2u);
    QuantumState state = random_state(3, 6u);
    PipelineOptions opt;
    opt.hamiltonian = h;
    opt.mode = EstimatorMode::gaussian(1e-2);
    opt.noise_seed = 99;
    opt.basis_weight = 2;
    opt.keep_k = 12;

    PipelineRun a = run_pipeline(opt, state);
    PipelineRun b = run_pipeline(opt, state);
    CHECK(a.result.E_reported == b.result.E_reported);  // bitwise
    CHECK(a.result.K_tilde == b.result.K_tilde);
    REQUIRE(a.result.weights.size() == b.result.weights.size());
    for (long i = 0; i < a.result.weights.size(); ++i)
        CHECK(a.result.weights[i] == b.result.weights[i]);

    CHECK(a.result.E_reported <= a.result.E_direct);
    CHECK(a.overlap_spectrum.size() == 12);
    for (std::size_t i = 1; i < a.overlap_spectrum.size(); ++i)
        CHECK(a.overlap_spectrum[i - 1] >= a.overlap_spectrum[i]);
    CHECK(a.candidate_basis.size() == enumerate_up_to_weight(3, 2).size());
    CHECK(a.filter.ranked.size() == a.candidate_basis.size());
    CHECK(a.matrices.basis.size() == 12);

    // a different seed perturbs the answer
    opt.noise_seed = 100;
    PipelineRun c = run_pipeline(opt, state);
    CHECK(c.result.E_reported != a.result.E_reported);
}

TEST_CASE("fresh filter stream changes selection inputs but not exact results") {
    ObservableSum h = build_spin_ring(3, 0.1, 14u);
    QuantumState state = random_state(3, 8u);
    PipelineOptions opt;
    opt.hamiltonian = h;
    opt.mode = EstimatorMode::exact();
    opt.keep_k = 6;
    PipelineRun shared = run_pipeline(opt, state);
    opt.fresh_filter_stream = true;
    PipelineRun fresh = run_pipeline(opt, state);
    CHECK(shared.result.E_sse == Approx(fresh.result.E_sse).margin(1e-12));
}

TEST_CASE("pipeline symmetry modes") {
    ObservableSum h(2);
    h.add(1.0, PauliString("XX"));
    h.add(1.0, PauliString("YY"));
    h.add(0.5, PauliString("ZI"));
    h.add(0.5, PauliString("IZ"));
    ObservableSum parity(2);
    parity.add(1.0, PauliString("ZZ"));

    Eigen::VectorXcd amps(4);
    amps << cplx{0.8, 0.0}, cplx{0.4, 0.1}, cplx{0.2, -0.3}, cplx{0.3, 0.2};
    amps /= amps.norm();
    QuantumState state = StateVector(2, amps);

    PipelineOptions opt;
    opt.hamiltonian = h;
    opt.mode = EstimatorMode::exact();
    opt.basis_weight = 2;
    opt.keep_k = 16;

    SymmetryOptions sym;
    sym.observable = parity;
    sym.target = 1.0;
    sym.mode = SymmetryOptions::Mode::Filter;
    opt.symmetry = sym;
    PipelineRun filtered = run_pipeline(opt, state);
    CHECK(filtered.candidate_basis.size() == 8);
    for (const auto& w : filtered.candidate_basis) CHECK(commutes(w, PauliString("ZZ")));

    opt.symmetry->mode = SymmetryOptions::Mode::Project;
    PipelineRun projected = run_pipeline(opt, state);
    CHECK(projected.result.E_sse == Approx(-1.0).margin(1e-8));
    CHECK(projected.result.E_reported == projected.result.E_sse);  // no clamp
    REQUIRE_FALSE(projected.sector_eigenvalues.empty());
    for (double a : projected.sector_eigenvalues) CHECK(a == Approx(1.0).margin(1e-8));
    // mapped-back weights have full basis dimension
    CHECK(projected.result.weights.size() == 16);
}

TEST_CASE("pipeline rejects mismatched inputs") {
    ObservableSum h = build_spin_ring(3, 0.1, 1u);
    QuantumState state = random_state(4, 1u);
    PipelineOptions opt;
    opt.hamiltonian = h;
    opt.mode = EstimatorMode::exact();
    CHECK_THROWS_AS(run_pipeline(opt, state), std::invalid_argument);
}

TEST_CASE("basis cap limits the candidate set") {
    ObservableSum h = build_spin_ring(4, 0.1, 3u);
    QuantumState state = random_state(4, 2u);
    PipelineOptions opt;
    opt.hamiltonian = h;
    opt.mode = EstimatorMode::exact();
    opt.basis_weight = 2;
    opt.basis_cap = 10;
    opt.keep_k = 10;
    PipelineRun run = run_pipeline(opt, state);
    CHECK(run.candidate_basis.size() == 10);
    CHECK(run.candidate_basis[0].is_identity());
}
