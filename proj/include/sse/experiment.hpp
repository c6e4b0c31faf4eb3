#pragma once

// Config-driven experiment commands behind the CLI verbs.  Every command is a
// pure function of the parsed config (plus any CLI overrides applied to it
// beforehand): given the same file and seeds it writes byte-identical
// artifacts.  Sweep rows are emitted in deterministic order.

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sse/analysis.hpp"
#include "sse/config.hpp"
#include "sse/density_matrix.hpp"
#include "sse/estimator.hpp"
#include "sse/hamiltonian.hpp"
#include "sse/io.hpp"
#include "sse/shadows.hpp"
#include "sse/sse.hpp"
#include "sse/vqe.hpp"

namespace sse {

using ordered_json = nlohmann::ordered_json;

struct PreparedProblem {
    ObservableSum h;
    QuantumState state;              // StateVector, or DensityMatrix under gate noise
    std::optional<Circuit> circuit;  // present for circuit-generating inits
    std::optional<double> exact_energy;
    std::optional<ObservableSum> symmetry_observable;
};

namespace detail {

inline ObservableSum build_hamiltonian(const ExperimentConfig& cfg) {
    if (cfg.problem.type == ProblemConfig::Type::File)
        return load_hamiltonian(cfg.resolve(cfg.problem.file).string());
    if (cfg.problem.onsite)
        return build_spin_ring(cfg.problem.n, cfg.problem.coupling, *cfg.problem.onsite,
                               cfg.problem.periodic);
    return build_spin_ring(cfg.problem.n, cfg.problem.coupling, cfg.problem.onsite_seed,
                           cfg.problem.periodic);
}

inline ObservableSum load_symmetry_observable(const ExperimentConfig& cfg, int n) {
    const SymmetryConfig& sym = *cfg.symmetry;
    if (!sym.observable_file.empty())
        return load_hamiltonian(cfg.resolve(sym.observable_file).string());
    ObservableSum a(n);
    try {
        a.add(1.0, PauliString(sym.observable_word));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("symmetry observable: ") + e.what());
    }
    if (a.n != n)
        throw ConfigError("symmetry observable acts on " + std::to_string(a.n) +
                          " qubits, problem has " + std::to_string(n));
    return a;
}

}  // namespace detail

// Hamiltonian + initial state from the config.  VQE runs on the noiseless
// statevector simulator; under gate noise the optimized circuit is then
// re-executed through the depolarizing channel to produce the mixed state.
inline PreparedProblem prepare_problem(const ExperimentConfig& cfg) {
    PreparedProblem out{detail::build_hamiltonian(cfg), StateVector(), {}, {}, {}};
    const int n = out.h.n;

    switch (cfg.init.type) {
        case InitConfig::Type::Vqe: {
            check_sim_qubits(n, kMaxSimQubits);
            Circuit ansatz = hardware_efficient_ansatz(n, cfg.init.layers);
            VqeResult vr = run_vqe(out.h, ansatz, cfg.init.steps, cfg.seeds.vqe,
                                   cfg.init.learning_rate);
            ansatz.set_rotation_angles(vr.params);
            out.circuit = ansatz;
            out.state = vr.state;
            break;
        }
        case InitConfig::Type::Circuit: {
            check_sim_qubits(n, kMaxSimQubits);
            const std::filesystem::path path = cfg.resolve(cfg.init.circuit_file);
            std::ifstream in(path);
            if (!in) throw ConfigError("cannot open circuit file '" + path.string() + "'");
            Circuit c = parse_circuit(in, n, path.filename().string());
            StateVector psi(n);
            apply_circuit(psi, c);
            out.circuit = c;
            out.state = psi;
            break;
        }
        case InitConfig::Type::GroundPerturbed: {
            GroundState gs = exact_ground(out.h);
            StateVector noise = random_state(n, cfg.seeds.vqe);
            Eigen::VectorXcd amps = gs.state.amps + cfg.init.perturbation * noise.amps;
            amps /= amps.norm();
            out.state = StateVector(n, std::move(amps));
            break;
        }
    }

    if (cfg.gate_noise) {
        if (!out.circuit)
            throw ConfigError("gate_noise requires a circuit-based init (vqe or circuit)");
        check_sim_qubits(n, kMaxDensityQubits);
        DensityMatrix rho(n);
        apply_noisy_circuit(rho, *out.circuit, NoiseModel::from_p1(cfg.gate_noise->p1));
        out.state = rho;
    }

    if (n <= kMaxDenseQubits) out.exact_energy = exact_ground(out.h).energy;
    if (cfg.symmetry) out.symmetry_observable = detail::load_symmetry_observable(cfg, n);
    return out;
}

inline PipelineOptions pipeline_options(const ExperimentConfig& cfg,
                                        const PreparedProblem& prep) {
    PipelineOptions opt;
    opt.hamiltonian = prep.h;
    opt.mode = cfg.mode;
    opt.noise_seed = cfg.seeds.noise;
    opt.shadow_seed = cfg.seeds.shadows;
    opt.fresh_filter_stream = cfg.filter.fresh_stream;
    opt.basis_weight = cfg.basis.max_weight;
    opt.basis_cap = cfg.basis.cap;
    opt.keep_k = cfg.filter.keep_k;
    opt.reg = cfg.reg;
    if (cfg.symmetry) {
        SymmetryOptions sym;
        sym.mode = cfg.symmetry->mode;
        sym.observable = *prep.symmetry_observable;
        sym.target = cfg.symmetry->target;
        sym.tolerance = cfg.symmetry->tolerance;
        opt.symmetry = sym;
    }
    return opt;
}

namespace detail {

inline std::filesystem::path artifact(const ExperimentConfig& cfg, const std::string& suffix) {
    return cfg.output.dir / (cfg.output.prefix + suffix);
}

inline ordered_json json_or_null(const std::optional<double>& v) {
    if (v) return *v;
    return nullptr;
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline void write_levels_csv(const ExperimentConfig& cfg, const SseResult& r) {
    CsvWriter csv(artifact(cfg, "_levels.csv"), "l,energy");
    for (const auto& [l, e] : r.energies_per_level)
        csv.row({std::to_string(l), fmt17(e)});
}

inline void write_spectrum_csv(const ExperimentConfig& cfg,
                               const std::vector<double>& spectrum) {
    CsvWriter csv(artifact(cfg, "_spectrum.csv"), "index,eigenvalue");
    for (std::size_t i = 0; i < spectrum.size(); ++i)
        csv.row({std::to_string(i), fmt17(spectrum[i])});
}

inline void write_matrix_csv(CsvWriter& csv, const std::string& name,
                             const Eigen::MatrixXcd& m) {
    for (long r = 0; r < m.rows(); ++r)
        for (long c = 0; c < m.cols(); ++c)
            csv.row({name, std::to_string(r), std::to_string(c), fmt17(m(r, c).real()),
                     fmt17(m(r, c).imag())});
}

}  // namespace detail

struct RunOutput {
    PipelineRun run;
    ordered_json result;
    std::filesystem::path result_path;
};

inline RunOutput cmd_run(const ExperimentConfig& cfg) {
    PreparedProblem prep = prepare_problem(cfg);
    PipelineOptions opt = pipeline_options(cfg, prep);
    PipelineRun run = run_pipeline(opt, prep.state);
    const SseResult& r = run.result;

    ordered_json j;
    j["command"] = "run";
    j["n"] = prep.h.n;
    j["mode"] = cfg.mode.str();
    j["seeds"] = {{"vqe", cfg.seeds.vqe}, {"shadows", cfg.seeds.shadows},
                  {"noise", cfg.seeds.noise}};
    j["basis"] = {{"max_weight", cfg.basis.max_weight},
                  {"cap", cfg.basis.cap},
                  {"candidates", run.candidate_basis.size()}};
    j["filter"] = {{"keep_k", cfg.filter.keep_k},
                   {"kept", run.filter.k_kept},
                   {"fresh_stream", cfg.filter.fresh_stream}};
    j["regularization"] = {{"eigenvalue_floor", cfg.reg.eigenvalue_floor},
                           {"window", cfg.reg.window},
                           {"k_tilde_max", cfg.reg.k_tilde_max},
                           {"scan_step", cfg.reg.scan_step}};
    j["E_direct"] = r.E_direct;
    j["E_sse"] = r.E_sse;
    j["E_reported"] = r.E_reported;
    j["K"] = run.matrices.basis.size();
    j["K_tilde"] = r.K_tilde;
    j["truncation_warning"] = r.truncation_warning;
    ordered_json levels = ordered_json::array();
    for (const auto& [l, e] : r.energies_per_level) levels.push_back({l, e});
    j["energies_per_level"] = levels;
    j["subspace_spectrum"] = r.subspace_spectrum;
    j["overlap_spectrum"] = run.overlap_spectrum;

    std::vector<long> hist(static_cast<std::size_t>(cfg.basis.max_weight) + 1, 0);
    for (const auto& w : run.matrices.basis) {
        const std::size_t wt = static_cast<std::size_t>(w.weight());
        if (wt < hist.size()) ++hist[wt];
    }
    j["basis_weights_histogram"] = hist;

    if (cfg.symmetry) {
        j["symmetry"] = {{"mode", cfg.symmetry->mode == SymmetryOptions::Mode::Project
                                      ? "project"
                                      : "filter"},
                         {"target", cfg.symmetry->target},
                         {"sector_eigenvalues", run.sector_eigenvalues}};
    }
    j["exact_energy"] = detail::json_or_null(prep.exact_energy);
    j["error_vs_exact"] = prep.exact_energy
                              ? ordered_json(r.E_reported - *prep.exact_energy)
                              : ordered_json(nullptr);

    const std::filesystem::path jpath = detail::artifact(cfg, "_result.json");
    {
        std::ofstream out = open_output(jpath);
        out << j.dump(2) << '\n';
    }
    detail::write_levels_csv(cfg, r);
    detail::write_spectrum_csv(cfg, run.overlap_spectrum);

    if (cfg.output.dump_matrices) {
        CsvWriter csv(detail::artifact(cfg, "_matrices.csv"), "matrix,row,col,re,im");
        detail::write_matrix_csv(csv, "S", run.matrices.S);
        detail::write_matrix_csv(csv, "H", run.matrices.H);
        if (run.matrices.A) detail::write_matrix_csv(csv, "A", *run.matrices.A);
    }
    if (cfg.output.dump_shadows && cfg.mode.kind == EstimatorMode::Kind::SampledShadows) {
        // regenerate the deterministic snapshot set the estimator consumed
        ShadowSet shadows = std::visit(
            [&](const auto& s) {
                return sample_shadows(s, cfg.mode.n_snapshots, cfg.seeds.shadows);
            },
            prep.state);
        std::ofstream out = open_output(detail::artifact(cfg, "_shadows.txt"));
        save_shadows(out, shadows);
    }
    if (cfg.mode.kind == EstimatorMode::Kind::SampledShadows ||
        cfg.mode.kind == EstimatorMode::Kind::ShadowVariance) {
        int w_prime = 0;
        for (const auto& w : run.matrices.basis) w_prime = std::max(w_prime, w.weight());
        NoiseBoundInput in;
        in.n_snapshots = cfg.mode.n_snapshots;
        in.w = prep.h.max_weight();
        in.w_prime = w_prime;
        in.k = static_cast<int>(run.matrices.basis.size());
        in.s_inv_frobenius = s_inv_frobenius(run.overlap_spectrum, cfg.reg.eigenvalue_floor);
        in.h_inf_upper = h_norm_upper(prep.h).value;
        ordered_json bj;
        bj["n_snapshots"] = in.n_snapshots;
        bj["w"] = in.w;
        bj["w_prime"] = in.w_prime;
        bj["K"] = in.k;
        bj["s_inv_frobenius"] = in.s_inv_frobenius;
        bj["h_inf_upper"] = in.h_inf_upper;
        bj["h_inf_is_exact"] = false;
        bj["eps_m_squared_bound"] = shot_noise_bound(in);
        std::ofstream out = open_output(detail::artifact(cfg, "_bound.json"));
        out << bj.dump(2) << '\n';
    }
    return {std::move(run), std::move(j), jpath};
}

// Shared-ranking K sweep: one filter pass and one top-K assembly per replica;
// each requested K solves on the leading block, so subspaces are nested.
inline void cmd_sweep_k(const ExperimentConfig& cfg) {
    if (cfg.sweep.k_values.empty())
        throw ConfigError("sweep-k needs k_values in the [sweep] section");
    if (cfg.symmetry && cfg.symmetry->mode == SymmetryOptions::Mode::Project)
        throw ConfigError("symmetry projection is not supported in sweeps");

    PreparedProblem prep = prepare_problem(cfg);
    std::vector<PauliString> candidates =
        enumerate_up_to_weight(prep.h.n, std::min(cfg.basis.max_weight, prep.h.n));
    if (cfg.basis.cap > 0 && static_cast<long>(candidates.size()) > cfg.basis.cap)
        candidates.resize(static_cast<std::size_t>(cfg.basis.cap));
    if (cfg.symmetry)
        candidates = symmetry_commuting_filter(candidates, *prep.symmetry_observable);

    const int max_k =
        std::min<int>(cfg.sweep.k_values.back(), static_cast<int>(candidates.size()));

    CsvWriter csv(detail::artifact(cfg, "_sweep_k.csv"),
                  "K,K_effective,replica,seed,E_direct,E_sse,E_reported,K_tilde,"
                  "error_vs_exact");
    for (int rep = 0; rep < cfg.sweep.replicas; ++rep) {
        const std::uint64_t nseed = derive_stream(cfg.seeds.noise, static_cast<std::uint64_t>(rep));
        const std::uint64_t sseed =
            derive_stream(cfg.seeds.shadows, static_cast<std::uint64_t>(rep));
        Estimator est(prep.state, cfg.mode, nseed, sseed);
        std::optional<Estimator> fest;
        if (cfg.filter.fresh_stream)
            fest.emplace(prep.state, cfg.mode, derive_stream(nseed, 0x66696c74ULL),
                         derive_stream(sseed, 0x66696c74ULL));

        FilterResult ranking = local_filter(candidates, prep.h, fest ? *fest : est, max_k,
                                            cfg.reg.eigenvalue_floor);
        SseMatrices full = assemble_matrices(ranking.kept(), prep.h, est);

        for (int k_req : cfg.sweep.k_values) {
            const int k = std::min<int>(k_req, max_k);
            SseMatrices m;
            m.basis.assign(full.basis.begin(), full.basis.begin() + k);
            m.S = full.S.topLeftCorner(k, k);
            m.H = full.H.topLeftCorner(k, k);
            RegularizationConfig reg = cfg.reg;
            if (cfg.mode.is_exact()) reg.use_variance_rule = false;
            SseResult r = regularized_gevp(m, reg);
            r.E_reported = clamp_to_direct(r.E_sse, r.E_direct);
            const double err = prep.exact_energy
                                   ? r.E_reported - *prep.exact_energy
                                   : std::numeric_limits<double>::quiet_NaN();
            csv.row({std::to_string(k_req), std::to_string(k), std::to_string(rep),
                     std::to_string(nseed), fmt17(r.E_direct), fmt17(r.E_sse),
                     fmt17(r.E_reported), std::to_string(r.K_tilde), fmt17(err)});
        }
    }
}

// Noise-level sweep with fresh seeds per (level, replica).  The footer lists
// per-level median errors and, when at least two levels admit it, the slope
// of log(median error) against log(level) -- informational only.
inline void cmd_sweep_noise(const ExperimentConfig& cfg) {
    if (cfg.sweep.noise_values.empty())
        throw ConfigError("sweep-noise needs noise_values in the [sweep] section");
    if (cfg.mode.is_exact())
        throw ConfigError("sweep-noise requires a noisy estimator mode");
    if (cfg.symmetry && cfg.symmetry->mode == SymmetryOptions::Mode::Project)
        throw ConfigError("symmetry projection is not supported in sweeps");

    const bool snapshots = cfg.mode.kind == EstimatorMode::Kind::ShadowVariance ||
                           cfg.mode.kind == EstimatorMode::Kind::SampledShadows;
    for (double v : cfg.sweep.noise_values)
        if (snapshots && (v < 1 || std::floor(v) != v))
            throw ConfigError("snapshot counts in noise_values must be positive integers");

    PreparedProblem prep = prepare_problem(cfg);
    PipelineOptions base = pipeline_options(cfg, prep);

    CsvWriter csv(detail::artifact(cfg, "_sweep_noise.csv"),
                  "level,replica,seed,E_direct,E_sse,E_reported,K_tilde,error_vs_exact");
    std::vector<double> medians;
    for (std::size_t li = 0; li < cfg.sweep.noise_values.size(); ++li) {
        const double v = cfg.sweep.noise_values[li];
        EstimatorMode mode = cfg.mode;
        if (snapshots)
            mode.n_snapshots = static_cast<long>(v);
        else
            mode.eps = v;

        std::vector<double> errors;
        for (int rep = 0; rep < cfg.sweep.replicas; ++rep) {
            PipelineOptions opt = base;
            opt.mode = mode;
            opt.noise_seed = derive_stream(derive_stream(cfg.seeds.noise, li),
                                           static_cast<std::uint64_t>(rep));
            opt.shadow_seed = derive_stream(derive_stream(cfg.seeds.shadows, li),
                                            static_cast<std::uint64_t>(rep));
            PipelineRun run = run_pipeline(opt, prep.state);
            const double err = prep.exact_energy
                                   ? run.result.E_reported - *prep.exact_energy
                                   : std::numeric_limits<double>::quiet_NaN();
            errors.push_back(std::abs(err));
            csv.row({fmt17(v), std::to_string(rep), std::to_string(opt.noise_seed),
                     fmt17(run.result.E_direct), fmt17(run.result.E_sse),
                     fmt17(run.result.E_reported), std::to_string(run.result.K_tilde),
                     fmt17(err)});
        }
        medians.push_back(detail::median(errors));
        csv.comment("level " + fmt17(v) + " median_abs_error " + fmt17(medians.back()));
        if (snapshots) {
            int w_prime = 0;
            for (const auto& w : enumerate_up_to_weight(prep.h.n,
                                                        std::min(cfg.basis.max_weight, prep.h.n)))
                w_prime = std::max(w_prime, w.weight());
            csv.comment("level " + fmt17(v) + " per_word_variance_bound " +
                        fmt17(std::pow(3.0, w_prime) / v));
        }
    }

    // least-squares slope over levels with positive medians
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < medians.size(); ++i)
        if (medians[i] > 0) {
            lx.push_back(std::log(cfg.sweep.noise_values[i]));
            ly.push_back(std::log(medians[i]));
        }
    if (lx.size() >= 2) {
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            mx += lx[i];
            my += ly[i];
        }
        mx /= static_cast<double>(lx.size());
        my /= static_cast<double>(lx.size());
        double num = 0, den = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            num += (lx[i] - mx) * (ly[i] - my);
            den += (lx[i] - mx) * (lx[i] - mx);
        }
        if (den > 0) csv.comment("loglog_slope " + fmt17(num / den));
    }
}

// Gate-noise sweep: each lambda is converted to a per-gate p1 through the
// circuit's gate counts (p2 = 5 p1), the optimized circuit is re-executed
// through the depolarizing channel, and SSE runs on the mixed state.
inline void cmd_gate_noise(const ExperimentConfig& cfg) {
    if (cfg.sweep.lambda_values.empty())
        throw ConfigError("gate-noise needs lambda_values in the [sweep] section");
    if (cfg.symmetry && cfg.symmetry->mode == SymmetryOptions::Mode::Project)
        throw ConfigError("symmetry projection is not supported in sweeps");

    ExperimentConfig pure_cfg = cfg;
    pure_cfg.gate_noise.reset();  // prepare the noiseless circuit once
    PreparedProblem prep = prepare_problem(pure_cfg);
    if (!prep.circuit)
        throw ConfigError("gate-noise requires a circuit-based init (vqe or circuit)");
    check_sim_qubits(prep.h.n, kMaxDensityQubits);

    const double denom = static_cast<double>(prep.circuit->count_single_qubit()) +
                         5.0 * static_cast<double>(prep.circuit->count_two_qubit());

    CsvWriter csv(detail::artifact(cfg, "_gate_noise.csv"),
                  "lambda,p1,replica,seed,E_direct,E_sse,E_reported,improvement,"
                  "K_tilde,K_tilde_unclamped");
    for (std::size_t li = 0; li < cfg.sweep.lambda_values.size(); ++li) {
        const double lambda = cfg.sweep.lambda_values[li];
        double p1 = 0.0;
        if (lambda > 0) {
            if (denom <= 0)
                throw ConfigError("lambda " + fmt17(lambda) +
                                  " unreachable: circuit has no gates");
            p1 = lambda / denom;
            if (p1 > 1.0 || 5.0 * p1 > 1.0)
                throw ConfigError("lambda " + fmt17(lambda) +
                                  " unreachable with depolarizing p in [0, 1]");
        }
        const NoiseModel model = NoiseModel::from_p1(p1);
        DensityMatrix rho(prep.h.n);
        apply_noisy_circuit(rho, *prep.circuit, model);
        const QuantumState noisy = rho;

        for (int rep = 0; rep < cfg.sweep.replicas; ++rep) {
            PipelineOptions opt = pipeline_options(cfg, prep);
            opt.noise_seed = derive_stream(derive_stream(cfg.seeds.noise, li),
                                           static_cast<std::uint64_t>(rep));
            opt.shadow_seed = derive_stream(derive_stream(cfg.seeds.shadows, li),
                                            static_cast<std::uint64_t>(rep));
            PipelineRun run = run_pipeline(opt, noisy);
            const SseResult& r = run.result;

            int unclamped = r.K_tilde;
            if (cfg.reg.k_tilde_max > 0) {
                RegularizationConfig reg = cfg.reg;
                reg.k_tilde_max = 0;
                if (cfg.mode.is_exact()) reg.use_variance_rule = false;
                unclamped = regularized_gevp(run.matrices, reg).K_tilde;
            }
            csv.row({fmt17(lambda), fmt17(p1), std::to_string(rep),
                     std::to_string(opt.noise_seed), fmt17(r.E_direct), fmt17(r.E_sse),
                     fmt17(r.E_reported), fmt17(r.E_direct - r.E_reported),
                     std::to_string(r.K_tilde), std::to_string(unclamped)});
        }
        csv.comment("lambda " + fmt17(lambda) + " fault_rate " +
                    fmt17(circuit_fault_rate(*prep.circuit, model)));
    }
}

// Overlap spectrum of the assembled matrices, without solving the pencil.
inline void cmd_spectrum(const ExperimentConfig& cfg) {
    PreparedProblem prep = prepare_problem(cfg);
    PipelineOptions opt = pipeline_options(cfg, prep);

    std::vector<PauliString> candidates =
        enumerate_up_to_weight(prep.h.n, std::min(opt.basis_weight, prep.h.n));
    if (opt.basis_cap > 0 && static_cast<long>(candidates.size()) > opt.basis_cap)
        candidates.resize(static_cast<std::size_t>(opt.basis_cap));
    if (opt.symmetry && opt.symmetry->mode == SymmetryOptions::Mode::Filter)
        candidates = symmetry_commuting_filter(candidates, opt.symmetry->observable);

    Estimator est(prep.state, cfg.mode, opt.noise_seed, opt.shadow_seed);
    std::optional<Estimator> fest;
    if (opt.fresh_filter_stream)
        fest.emplace(prep.state, cfg.mode, derive_stream(opt.noise_seed, 0x66696c74ULL),
                     derive_stream(opt.shadow_seed, 0x66696c74ULL));
    FilterResult ranking = local_filter(candidates, prep.h, fest ? *fest : est,
                                        opt.keep_k, cfg.reg.eigenvalue_floor);
    SseMatrices m = assemble_matrices(ranking.kept(), prep.h, est);
    SpectrumReport rep = spectrum_report(m, cfg.reg.eigenvalue_floor);

    CsvWriter csv(detail::artifact(cfg, "_spectrum.csv"), "index,eigenvalue");
    for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i)
        csv.row({std::to_string(i), fmt17(rep.eigenvalues[i])});
    csv.comment("above_floor " + std::to_string(rep.above_floor));
    csv.comment("trace " + fmt17(rep.trace));
    csv.comment("has_negative " + std::string(rep.has_negative ? "true" : "false"));
}

// Full candidate ranking with the kept/dropped boundary made explicit.
inline void cmd_filter_report(const ExperimentConfig& cfg) {
    PreparedProblem prep = prepare_problem(cfg);
    PipelineOptions opt = pipeline_options(cfg, prep);

    std::vector<PauliString> candidates =
        enumerate_up_to_weight(prep.h.n, std::min(opt.basis_weight, prep.h.n));
    if (opt.basis_cap > 0 && static_cast<long>(candidates.size()) > opt.basis_cap)
        candidates.resize(static_cast<std::size_t>(opt.basis_cap));
    if (opt.symmetry && opt.symmetry->mode == SymmetryOptions::Mode::Filter)
        candidates = symmetry_commuting_filter(candidates, opt.symmetry->observable);

    Estimator est(prep.state, cfg.mode,
                  opt.fresh_filter_stream ? derive_stream(opt.noise_seed, 0x66696c74ULL)
                                          : opt.noise_seed,
                  opt.fresh_filter_stream ? derive_stream(opt.shadow_seed, 0x66696c74ULL)
                                          : opt.shadow_seed);
    FilterResult ranking = local_filter(candidates, prep.h, est, opt.keep_k,
                                        cfg.reg.eigenvalue_floor);

    CsvWriter csv(detail::artifact(cfg, "_filter.csv"), "rank,word,delta_e,kept");
    for (std::size_t i = 0; i < ranking.ranked.size(); ++i)
        csv.row({std::to_string(i), ranking.ranked[i].first.str(),
                 fmt17(ranking.ranked[i].second),
                 i < static_cast<std::size_t>(ranking.k_kept) ? "1" : "0"});
}

}  // namespace sse
