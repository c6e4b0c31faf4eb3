#pragma once

// Experiment configuration: a single INI-style text file drives every CLI
// command, so experiments stay diffable and archivable.  Parsing is strict --
// unknown sections or keys, duplicates, and malformed values are reported
// with their line number.  Seeds must be spelled out explicitly; nothing in a
// run draws entropy from the environment.

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sse/errors.hpp"
#include "sse/estimator.hpp"
#include "sse/sse.hpp"

namespace sse {

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace detail

class IniFile {
public:
    struct Entry {
        std::string value;
        int line = 0;
        mutable bool used = false;
    };

    static IniFile parse(std::istream& in, const std::string& name) {
        IniFile ini;
        ini.name_ = name;
        std::string line, section;
        int line_no = 0, section_line = 0;
        while (std::getline(in, line)) {
            ++line_no;
            std::size_t hash = line.find_first_of("#;");
            if (hash != std::string::npos) line.resize(hash);
            std::string text = detail::trim(line);
            if (text.empty()) continue;
            if (text.front() == '[') {
                if (text.back() != ']')
                    throw ConfigError(name + ":" + std::to_string(line_no) +
                                      ": unterminated section header");
                section = detail::trim(text.substr(1, text.size() - 2));
                if (section.empty())
                    throw ConfigError(name + ":" + std::to_string(line_no) +
                                      ": empty section name");
                section_line = line_no;
                ini.sections_[section];  // may legitimately stay empty
                ini.section_lines_[section] = section_line;
                continue;
            }
            std::size_t eq = text.find('=');
            if (eq == std::string::npos)
                throw ConfigError(name + ":" + std::to_string(line_no) +
                                  ": expected 'key = value'");
            if (section.empty())
                throw ConfigError(name + ":" + std::to_string(line_no) +
                                  ": key outside of any [section]");
            std::string key = detail::trim(text.substr(0, eq));
            std::string value = detail::trim(text.substr(eq + 1));
            if (key.empty())
                throw ConfigError(name + ":" + std::to_string(line_no) + ": empty key");
            auto& sec = ini.sections_[section];
            if (sec.count(key))
                throw ConfigError(name + ":" + std::to_string(line_no) + ": duplicate key '" +
                                  key + "' in [" + section + "]");
            sec[key] = Entry{value, line_no, false};
        }
        return ini;
    }

    static IniFile load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
        return parse(in, path.filename().string());
    }

    bool has_section(const std::string& s) const { return sections_.count(s) != 0; }

    bool has_key(const std::string& s, const std::string& k) const {
        auto it = sections_.find(s);
        return it != sections_.end() && it->second.count(k) != 0;
    }

    const Entry* find(const std::string& s, const std::string& k) const {
        auto it = sections_.find(s);
        if (it == sections_.end()) return nullptr;
        auto kt = it->second.find(k);
        if (kt == it->second.end()) return nullptr;
        kt->second.used = true;
        return &kt->second;
    }

    std::string where(const std::string& s, const std::string& k) const {
        auto it = sections_.find(s);
        if (it != sections_.end()) {
            auto kt = it->second.find(k);
            if (kt != it->second.end())
                return name_ + ":" + std::to_string(kt->second.line);
        }
        return name_;
    }

    [[noreturn]] void missing(const std::string& s, const std::string& k) const {
        throw ConfigError(name_ + ": missing required key '" + k + "' in [" + s + "]");
    }

    std::string get_string(const std::string& s, const std::string& k) const {
        const Entry* e = find(s, k);
        if (!e) missing(s, k);
        return e->value;
    }

    std::string get_string(const std::string& s, const std::string& k,
                           const std::string& dflt) const {
        const Entry* e = find(s, k);
        return e ? e->value : dflt;
    }

    template <typename T>
    T parse_number(const std::string& s, const std::string& k, const std::string& text) const {
        std::istringstream iss(text);
        T v{};
        iss >> v;
        char extra;
        if (iss.fail() || (iss >> extra))
            throw ConfigError(where(s, k) + ": invalid value '" + text + "' for '" + k + "'");
        return v;
    }

    template <typename T>
    T get_number(const std::string& s, const std::string& k, std::optional<T> dflt = {}) const {
        const Entry* e = find(s, k);
        if (!e) {
            if (dflt) return *dflt;
            missing(s, k);
        }
        return parse_number<T>(s, k, e->value);
    }

    bool get_bool(const std::string& s, const std::string& k, std::optional<bool> dflt = {}) const {
        const Entry* e = find(s, k);
        if (!e) {
            if (dflt) return *dflt;
            missing(s, k);
        }
        if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
        if (e->value == "false" || e->value == "0" || e->value == "no") return false;
        throw ConfigError(where(s, k) + ": invalid boolean '" + e->value + "' for '" + k + "'");
    }

    template <typename T>
    std::vector<T> get_list(const std::string& s, const std::string& k) const {
        const Entry* e = find(s, k);
        if (!e) missing(s, k);
        std::vector<T> out;
        std::stringstream ss(e->value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = detail::trim(item);
            if (item.empty())
                throw ConfigError(where(s, k) + ": empty element in list '" + k + "'");
            out.push_back(parse_number<T>(s, k, item));
        }
        if (out.empty())
            throw ConfigError(where(s, k) + ": empty list for '" + k + "'");
        return out;
    }

    // Strict schema check: every present key must have been consumed and
    // every present section must be expected.
    void reject_unknown(const std::vector<std::string>& known_sections) const {
        for (const auto& [sec, keys] : sections_) {
            bool ok = false;
            for (const auto& k : known_sections) ok = ok || k == sec;
            if (!ok)
                throw ConfigError(name_ + ":" + std::to_string(section_lines_.at(sec)) +
                                  ": unknown section [" + sec + "]");
            for (const auto& [key, entry] : keys)
                if (!entry.used)
                    throw ConfigError(name_ + ":" + std::to_string(entry.line) +
                                      ": unknown key '" + key + "' in [" + sec + "]");
        }
    }

    const std::string& name() const { return name_; }

private:
    std::string name_;
    std::map<std::string, std::map<std::string, Entry>> sections_;
    std::map<std::string, int> section_lines_;
};

struct ProblemConfig {
    enum class Type { SpinRing, File };
    Type type = Type::SpinRing;
    int n = 3;
    double coupling = 0.1;
    std::optional<std::vector<double>> onsite;  // explicit fields; else seeded
    std::uint64_t onsite_seed = 0;
    bool periodic = true;
    std::filesystem::path file;
};

struct InitConfig {
    enum class Type { Vqe, Circuit, GroundPerturbed };
    Type type = Type::Vqe;
    int layers = 2;
    int steps = 60;
    double learning_rate = 0.2;
    std::filesystem::path circuit_file;
    double perturbation = 0.1;
};

struct BasisConfig {
    int max_weight = 2;
    long cap = 0;  // 0 = unlimited
};

struct FilterConfig {
    int keep_k = 1;
    bool fresh_stream = false;
};

struct GateNoiseConfig {
    double p1 = 0.0;  // p2 is tied to 5 * p1 throughout
};

struct SymmetryConfig {
    SymmetryOptions::Mode mode = SymmetryOptions::Mode::Filter;
    std::string observable_word;  // single Pauli word, or
    std::filesystem::path observable_file;
    double target = 1.0;
    double tolerance = 1e-6;
};

struct SweepConfig {
    std::vector<int> k_values;
    std::vector<double> noise_values;
    std::vector<double> lambda_values;
    int replicas = 1;
};

struct SeedConfig {
    std::uint64_t vqe = 0, shadows = 0, noise = 0;
};

struct OutputConfig {
    std::filesystem::path dir = ".";
    std::string prefix = "run";
    bool dump_matrices = false;
    bool dump_shadows = false;
};

struct ExperimentConfig {
    ProblemConfig problem;
    InitConfig init;
    BasisConfig basis;
    FilterConfig filter;
    EstimatorMode mode;
    RegularizationConfig reg;
    std::optional<GateNoiseConfig> gate_noise;
    std::optional<SymmetryConfig> symmetry;
    SweepConfig sweep;
    SeedConfig seeds;
    OutputConfig output;
    std::filesystem::path base_dir;  // config file location; anchors relative paths

    std::filesystem::path resolve(const std::filesystem::path& p) const {
        return p.is_absolute() ? p : base_dir / p;
    }
};

inline ExperimentConfig parse_experiment_config(const IniFile& ini,
                                                const std::filesystem::path& base_dir) {
    ExperimentConfig cfg;
    cfg.base_dir = base_dir;

    // [problem]
    {
        const std::string type = ini.get_string("problem", "type", "spin_ring");
        if (type == "spin_ring") {
            cfg.problem.type = ProblemConfig::Type::SpinRing;
            cfg.problem.n = ini.get_number<int>("problem", "n");
            cfg.problem.coupling = ini.get_number<double>("problem", "coupling", 0.1);
            cfg.problem.periodic = ini.get_bool("problem", "periodic", true);
            if (ini.has_key("problem", "onsite")) {
                cfg.problem.onsite = ini.get_list<double>("problem", "onsite");
                if (static_cast<int>(cfg.problem.onsite->size()) != cfg.problem.n)
                    throw ConfigError(ini.where("problem", "onsite") +
                                      ": onsite list must have n entries");
            } else {
                cfg.problem.onsite_seed = ini.get_number<std::uint64_t>("problem", "onsite_seed");
            }
        } else if (type == "file") {
            cfg.problem.type = ProblemConfig::Type::File;
            cfg.problem.file = ini.get_string("problem", "hamiltonian_file");
        } else {
            throw ConfigError(ini.where("problem", "type") + ": unknown problem type '" +
                              type + "'");
        }
    }

    // [init]
    {
        const std::string type = ini.get_string("init", "type", "vqe");
        if (type == "vqe") {
            cfg.init.type = InitConfig::Type::Vqe;
            cfg.init.layers = ini.get_number<int>("init", "layers", 2);
            cfg.init.steps = ini.get_number<int>("init", "steps", 60);
            cfg.init.learning_rate = ini.get_number<double>("init", "learning_rate", 0.2);
            if (cfg.init.layers < 1)
                throw ConfigError(ini.where("init", "layers") + ": layers must be >= 1");
            if (cfg.init.steps < 0)
                throw ConfigError(ini.where("init", "steps") + ": steps must be >= 0");
        } else if (type == "circuit") {
            cfg.init.type = InitConfig::Type::Circuit;
            cfg.init.circuit_file = ini.get_string("init", "circuit_file");
        } else if (type == "ground_perturbed") {
            cfg.init.type = InitConfig::Type::GroundPerturbed;
            cfg.init.perturbation = ini.get_number<double>("init", "perturbation", 0.1);
            if (cfg.init.perturbation < 0)
                throw ConfigError(ini.where("init", "perturbation") +
                                  ": perturbation must be >= 0");
        } else {
            throw ConfigError(ini.where("init", "type") + ": unknown init type '" + type + "'");
        }
    }

    // [basis]
    cfg.basis.max_weight = ini.get_number<int>("basis", "max_weight", 2);
    cfg.basis.cap = ini.get_number<long>("basis", "cap", 0);
    if (cfg.basis.max_weight < 0)
        throw ConfigError(ini.where("basis", "max_weight") + ": max_weight must be >= 0");
    if (cfg.basis.cap < 0)
        throw ConfigError(ini.where("basis", "cap") + ": cap must be >= 0");

    // [filter]
    cfg.filter.keep_k = ini.get_number<int>("filter", "keep_k");
    cfg.filter.fresh_stream = ini.get_bool("filter", "fresh_stream", false);
    if (cfg.filter.keep_k < 1)
        throw ConfigError(ini.where("filter", "keep_k") + ": keep_k must be >= 1");

    // [estimator]
    try {
        cfg.mode = parse_mode(ini.get_string("estimator", "mode", "exact"));
    } catch (const ConfigError& e) {
        throw ConfigError(ini.where("estimator", "mode") + ": " + e.what());
    }

    // [regularization]
    cfg.reg.eigenvalue_floor =
        ini.get_number<double>("regularization", "eigenvalue_floor", 1e-12);
    cfg.reg.window = ini.get_number<int>("regularization", "window", 5);
    cfg.reg.k_tilde_max = ini.get_number<int>("regularization", "k_tilde_max", 0);
    cfg.reg.scan_step = ini.get_number<int>("regularization", "scan_step", 1);
    try {
        cfg.reg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(ini.name() + ": [regularization] " + e.what());
    }

    // [gate_noise]
    if (ini.has_section("gate_noise")) {
        GateNoiseConfig gn;
        gn.p1 = ini.get_number<double>("gate_noise", "p1", 0.0);
        if (gn.p1 < 0 || gn.p1 > 1 || gn.p1 * 5 > 1)
            throw ConfigError(ini.where("gate_noise", "p1") +
                              ": need p1 in [0, 1] with 5*p1 <= 1");
        cfg.gate_noise = gn;
    }

    // [symmetry]
    if (ini.has_section("symmetry")) {
        SymmetryConfig sym;
        const std::string mode = ini.get_string("symmetry", "mode", "filter");
        if (mode == "filter")
            sym.mode = SymmetryOptions::Mode::Filter;
        else if (mode == "project")
            sym.mode = SymmetryOptions::Mode::Project;
        else
            throw ConfigError(ini.where("symmetry", "mode") + ": unknown symmetry mode '" +
                              mode + "'");
        if (ini.has_key("symmetry", "observable_file"))
            sym.observable_file = ini.get_string("symmetry", "observable_file");
        else
            sym.observable_word = ini.get_string("symmetry", "observable");
        sym.target = ini.get_number<double>("symmetry", "target", 1.0);
        sym.tolerance = ini.get_number<double>("symmetry", "tolerance", 1e-6);
        if (sym.tolerance <= 0)
            throw ConfigError(ini.where("symmetry", "tolerance") + ": tolerance must be > 0");
        cfg.symmetry = sym;
    }

    // [sweep]
    if (ini.has_section("sweep")) {
        if (ini.has_key("sweep", "k_values"))
            cfg.sweep.k_values = ini.get_list<int>("sweep", "k_values");
        if (ini.has_key("sweep", "noise_values"))
            cfg.sweep.noise_values = ini.get_list<double>("sweep", "noise_values");
        if (ini.has_key("sweep", "lambda_values"))
            cfg.sweep.lambda_values = ini.get_list<double>("sweep", "lambda_values");
        cfg.sweep.replicas = ini.get_number<int>("sweep", "replicas", 1);
        if (cfg.sweep.replicas < 1)
            throw ConfigError(ini.where("sweep", "replicas") + ": replicas must be >= 1");
        for (std::size_t i = 1; i < cfg.sweep.k_values.size(); ++i)
            if (cfg.sweep.k_values[i] <= cfg.sweep.k_values[i - 1])
                throw ConfigError(ini.where("sweep", "k_values") +
                                  ": k_values must be strictly ascending");
        for (double v : cfg.sweep.noise_values)
            if (!(v > 0))
                throw ConfigError(ini.where("sweep", "noise_values") +
                                  ": noise values must be > 0");
        for (double v : cfg.sweep.lambda_values)
            if (v < 0)
                throw ConfigError(ini.where("sweep", "lambda_values") +
                                  ": lambda values must be >= 0");
    }

    // [seeds] -- all three are mandatory; no environmental entropy
    cfg.seeds.vqe = ini.get_number<std::uint64_t>("seeds", "vqe");
    cfg.seeds.shadows = ini.get_number<std::uint64_t>("seeds", "shadows");
    cfg.seeds.noise = ini.get_number<std::uint64_t>("seeds", "noise");

    // [output]
    cfg.output.dir = ini.get_string("output", "dir", ".");
    cfg.output.prefix = ini.get_string("output", "prefix", "run");
    cfg.output.dump_matrices = ini.get_bool("output", "dump_matrices", false);
    cfg.output.dump_shadows = ini.get_bool("output", "dump_shadows", false);

    ini.reject_unknown({"problem", "init", "basis", "filter", "estimator", "regularization",
                        "gate_noise", "symmetry", "sweep", "seeds", "output"});

    // cross-field checks
    if (cfg.gate_noise && cfg.init.type == InitConfig::Type::GroundPerturbed)
        throw ConfigError(ini.name() +
                          ": gate_noise requires a circuit-based init (vqe or circuit)");
    return cfg;
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    IniFile ini = IniFile::load(path);
    return parse_experiment_config(ini, path.has_parent_path() ? path.parent_path()
                                                               : std::filesystem::path("."));
}

}  // namespace sse
