#pragma once

// Minimal variational ground-state search used to prepare initial states:
// hardware-efficient RY/RZ + CNOT-ring ansatz, analytic parameter-shift
// gradients, fixed learning rate with backtracking acceptance (a step is taken
// only if it does not raise the energy, so the trace is non-increasing).

#include <vector>

#include "sse/circuit.hpp"
#include "sse/hamiltonian.hpp"
#include "sse/rng.hpp"
#include "sse/statevector.hpp"

namespace sse {

inline Circuit hardware_efficient_ansatz(int n, int layers) {
    if (n < 1 || layers < 1) throw std::invalid_argument("ansatz needs n >= 1, layers >= 1");
    Circuit c(n);
    for (int l = 0; l < layers; ++l) {
        for (int q = 0; q < n; ++q) c.add(GateKind::RY, q);
        for (int q = 0; q < n; ++q) c.add(GateKind::RZ, q);
        if (n >= 2)
            for (int q = 0; q < n; ++q) c.add(GateKind::CNOT, q, (q + 1) % n);
    }
    return c;
}

struct VqeResult {
    std::vector<double> params;
    StateVector state;
    std::vector<double> energy_trace;  // initial energy plus one entry per step
};

namespace detail {

inline double ansatz_energy(const ObservableSum& h, Circuit& ansatz,
                            const std::vector<double>& params) {
    ansatz.set_rotation_angles(params);
    StateVector psi(ansatz.n);
    apply_circuit(psi, ansatz);
    return expectation(psi, h);
}

}  // namespace detail

inline VqeResult run_vqe(const ObservableSum& h, Circuit ansatz, int steps, std::uint64_t seed,
                         double learning_rate = 0.2) {
    if (h.n != ansatz.n) throw std::invalid_argument("ansatz/Hamiltonian qubit count mismatch");
    if (steps < 0) throw std::invalid_argument("steps must be >= 0");
    const std::size_t n_params = ansatz.rotation_angles().size();

    auto rng = make_engine(seed, 0x565145ULL);
    std::uniform_real_distribution<double> init(-0.5, 0.5);
    std::vector<double> params(n_params);
    for (auto& p : params) p = init(rng);

    double energy = detail::ansatz_energy(h, ansatz, params);
    VqeResult out;
    out.energy_trace.push_back(energy);

    constexpr double half_pi = 1.5707963267948966;
    std::vector<double> grad(n_params), trial(n_params);
    for (int step = 0; step < steps; ++step) {
        for (std::size_t i = 0; i < n_params; ++i) {
            trial = params;
            trial[i] = params[i] + half_pi;
            const double e_plus = detail::ansatz_energy(h, ansatz, trial);
            trial[i] = params[i] - half_pi;
            const double e_minus = detail::ansatz_energy(h, ansatz, trial);
            grad[i] = 0.5 * (e_plus - e_minus);  // parameter-shift rule
        }
        // backtracking: halve the step until the energy does not increase
        double rate = learning_rate;
        bool accepted = false;
        for (int attempt = 0; attempt < 24; ++attempt) {
            for (std::size_t i = 0; i < n_params; ++i) trial[i] = params[i] - rate * grad[i];
            const double e_trial = detail::ansatz_energy(h, ansatz, trial);
            if (e_trial <= energy) {
                params = trial;
                energy = e_trial;
                accepted = true;
                break;
            }
            rate *= 0.5;
        }
        (void)accepted;  // if no step length is acceptable, params stay put
        out.energy_trace.push_back(energy);
    }

    ansatz.set_rotation_angles(params);
    StateVector psi(ansatz.n);
    apply_circuit(psi, ansatz);
    out.params = std::move(params);
    out.state = std::move(psi);
    return out;
}

}  // namespace sse
