#pragma once

// Expectation-value oracle with pluggable noise models.  All downstream code
// asks it for <P> of Hermitian Pauli words; within one estimator instance each
// distinct word is evaluated once and the value reused, so repeated occurrences
// of a word across matrix entries see identical noise (as they would when
// post-processing one fixed set of measurement data).
//
// Modes:
//   Exact            true expectation on the given state
//   GaussianEps      exact + complex Gaussian, total std eps (eps^2/2 per part)
//   ShadowVariance   exact + real Gaussian with variance (3^w - <P>^2)/N_s
//   SampledShadows   empirical mean over an actual sampled shadow set
//
// Noise streams are derived from (noise_seed, word); results are independent
// of evaluation order.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "sse/density_matrix.hpp"
#include "sse/errors.hpp"
#include "sse/pauli.hpp"
#include "sse/rng.hpp"
#include "sse/shadows.hpp"
#include "sse/statevector.hpp"

namespace sse {

using QuantumState = std::variant<StateVector, DensityMatrix>;

inline int state_qubits(const QuantumState& state) {
    return std::visit([](const auto& s) { return s.n; }, state);
}

inline double exact_expectation(const QuantumState& state, const PauliString& word) {
    return std::visit([&](const auto& s) { return expectation(s, word); }, state);
}

inline double exact_expectation(const QuantumState& state, const ObservableSum& h) {
    return std::visit([&](const auto& s) { return expectation(s, h); }, state);
}

struct EstimatorMode {
    enum class Kind { Exact, GaussianEps, ShadowVariance, SampledShadows };

    Kind kind = Kind::Exact;
    double eps = 0.0;        // GaussianEps
    long n_snapshots = 0;    // ShadowVariance / SampledShadows

    static EstimatorMode exact() { return {}; }
    static EstimatorMode gaussian(double eps) { return {Kind::GaussianEps, eps, 0}; }
    static EstimatorMode shadow_variance(long ns) { return {Kind::ShadowVariance, 0.0, ns}; }
    static EstimatorMode sampled(long ns) { return {Kind::SampledShadows, 0.0, ns}; }

    bool is_exact() const { return kind == Kind::Exact; }

    std::string str() const {
        char buf[64];
        switch (kind) {
            case Kind::Exact: return "exact";
            case Kind::GaussianEps:
                std::snprintf(buf, sizeof buf, "gauss:%.17g", eps);
                return buf;
            case Kind::ShadowVariance:
                std::snprintf(buf, sizeof buf, "shadowvar:%ld", n_snapshots);
                return buf;
            case Kind::SampledShadows:
                std::snprintf(buf, sizeof buf, "sampled:%ld", n_snapshots);
                return buf;
        }
        return "?";
    }
};

// Accepts exact | gauss:<eps> | shadowvar:<Ns> | sampled:<Ns>.
inline EstimatorMode parse_mode(const std::string& text) {
    auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
    auto need_arg = [&](const char* what) {
        if (arg.empty())
            throw ConfigError("mode '" + head + "' needs an argument, e.g. " + std::string(what));
        double v = 0;
        try {
            std::size_t used = 0;
            v = std::stod(arg, &used);
            if (used != arg.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw ConfigError("bad numeric argument '" + arg + "' in mode '" + text + "'");
        }
        return v;
    };
    if (head == "exact") {
        if (colon != std::string::npos) throw ConfigError("mode 'exact' takes no argument");
        return EstimatorMode::exact();
    }
    if (head == "gauss") {
        const double eps = need_arg("gauss:1e-3");
        if (eps < 0) throw ConfigError("gauss eps must be >= 0");
        return EstimatorMode::gaussian(eps);
    }
    if (head == "shadowvar" || head == "sampled") {
        const double ns = need_arg("shadowvar:100000");
        if (ns < 1 || ns > 4e18 || ns != std::floor(ns))
            throw ConfigError("snapshot count must be a positive integer, got '" + arg + "'");
        return head == "shadowvar" ? EstimatorMode::shadow_variance(static_cast<long>(ns))
                                   : EstimatorMode::sampled(static_cast<long>(ns));
    }
    throw ConfigError("unknown estimator mode '" + text + "'");
}

class Estimator {
  public:
    // shadow_seed feeds the sampled-shadows measurement record; noise_seed
    // feeds the synthetic per-word noise draws of the Gaussian modes.
    Estimator(const QuantumState& state, EstimatorMode mode, std::uint64_t noise_seed,
              std::uint64_t shadow_seed = 0)
        : state_(&state), mode_(mode), noise_seed_(noise_seed) {
        if (mode_.kind == EstimatorMode::Kind::SampledShadows) {
            shadows_ = std::visit(
                [&](const auto& s) { return sample_shadows(s, mode_.n_snapshots, shadow_seed); },
                state);
        }
    }

    int n_qubits() const { return state_qubits(*state_); }
    const EstimatorMode& mode() const { return mode_; }
    const QuantumState& state() const { return *state_; }
    const ShadowSet& shadows() const {
        if (!shadows_) throw std::logic_error("estimator has no shadow set");
        return *shadows_;
    }
    std::size_t distinct_words() const { return cache_.size(); }

    // Estimated <word>, complex in general (GaussianEps noise has an
    // imaginary part).  Cached: one draw per distinct word.
    cplx word_value(const PauliString& word) {
        auto it = cache_.find(word);
        if (it != cache_.end()) return it->second;
        // <I> = 1 exactly on any normalised state; evaluating it numerically
        // would leak O(machine eps) norm error into the w=0 variance formula.
        auto exact_of = [&] { return word.is_identity() ? 1.0 : exact_expectation(*state_, word); };
        cplx v;
        switch (mode_.kind) {
            case EstimatorMode::Kind::Exact: v = exact_of(); break;
            case EstimatorMode::Kind::GaussianEps: {
                auto rng = make_engine(noise_seed_, word.key());
                std::normal_distribution<double> part(0.0, mode_.eps / std::sqrt(2.0));
                const double re = part(rng), im = part(rng);
                v = exact_of() + cplx{re, im};
                break;
            }
            case EstimatorMode::Kind::ShadowVariance: {
                const double exact = exact_of();
                const double var =
                    std::max(0.0, theoretical_variance(word.weight(), exact)) /
                    static_cast<double>(mode_.n_snapshots);
                auto rng = make_engine(noise_seed_, word.key());
                std::normal_distribution<double> noise(0.0, std::sqrt(var));
                v = exact + noise(rng);
                break;
            }
            case EstimatorMode::Kind::SampledShadows:
                v = estimate_pauli(*shadows_, PhasedPauli{0, word});
                break;
        }
        cache_.emplace(word, v);
        return v;
    }

    // Estimated value of a phased word: noise attaches to the word estimate,
    // the exact phase multiplies afterwards.
    cplx estimate(const PhasedPauli& p) { return p.phase() * word_value(p.word); }

    cplx estimate(const ObservableSum& h) {
        cplx acc = 0;
        for (const auto& t : h.terms) acc += t.coeff * word_value(t.word);
        return acc;
    }

  private:
    const QuantumState* state_;
    EstimatorMode mode_;
    std::uint64_t noise_seed_;
    std::optional<ShadowSet> shadows_;
    std::unordered_map<PauliString, cplx, PauliStringHash> cache_;
};

inline std::vector<cplx> batch_estimate(Estimator& est, const std::vector<PhasedPauli>& list) {
    std::vector<cplx> out;
    out.reserve(list.size());
    for (const auto& p : list) out.push_back(est.estimate(p));
    return out;
}

}  // namespace sse
