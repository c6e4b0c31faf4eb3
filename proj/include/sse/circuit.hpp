#pragma once

// Gate-list circuits.  Text form, one gate per line, '#' starts a comment:
//
//     RY q0 0.314
//     CNOT q0 q1
//
// Rotation gates carry an angle in radians; H/X/CNOT/CZ take qubits only.

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sse/errors.hpp"

namespace sse {

enum class GateKind { RX, RY, RZ, H, X, CNOT, CZ };

inline bool is_rotation(GateKind k) {
    return k == GateKind::RX || k == GateKind::RY || k == GateKind::RZ;
}

inline bool is_two_qubit(GateKind k) { return k == GateKind::CNOT || k == GateKind::CZ; }

inline const char* gate_name(GateKind k) {
    switch (k) {
        case GateKind::RX: return "RX";
        case GateKind::RY: return "RY";
        case GateKind::RZ: return "RZ";
        case GateKind::H: return "H";
        case GateKind::X: return "X";
        case GateKind::CNOT: return "CNOT";
        case GateKind::CZ: return "CZ";
    }
    return "?";
}

struct Gate {
    GateKind kind;
    int q0 = 0;
    int q1 = -1;      // second qubit for CNOT/CZ (control is q0 for CNOT)
    double angle = 0; // rotations only
};

struct Circuit {
    int n = 0;
    std::vector<Gate> gates;

    explicit Circuit(int n_qubits = 0) : n(n_qubits) {}

    void add(GateKind k, int q0, int q1 = -1, double angle = 0.0) {
        gates.push_back({k, q0, q1, angle});
    }

    int count_single_qubit() const {
        int c = 0;
        for (const auto& g : gates) c += is_two_qubit(g.kind) ? 0 : 1;
        return c;
    }

    int count_two_qubit() const {
        int c = 0;
        for (const auto& g : gates) c += is_two_qubit(g.kind) ? 1 : 0;
        return c;
    }

    // Angles of rotation gates in circuit order; the VQE parameter vector.
    std::vector<double> rotation_angles() const {
        std::vector<double> out;
        for (const auto& g : gates)
            if (is_rotation(g.kind)) out.push_back(g.angle);
        return out;
    }

    void set_rotation_angles(const std::vector<double>& angles) {
        std::size_t i = 0;
        for (auto& g : gates)
            if (is_rotation(g.kind)) {
                if (i >= angles.size()) throw std::invalid_argument("too few rotation angles");
                g.angle = angles[i++];
            }
        if (i != angles.size()) throw std::invalid_argument("too many rotation angles");
    }
};

namespace detail {

inline int parse_qubit(const std::string& tok, int n, const std::string& where) {
    if (tok.size() < 2 || tok[0] != 'q')
        throw ConfigError(where + ": expected qubit token like 'q0', got '" + tok + "'");
    int q = 0;
    try {
        std::size_t used = 0;
        q = std::stoi(tok.substr(1), &used);
        if (used != tok.size() - 1) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw ConfigError(where + ": bad qubit index in '" + tok + "'");
    }
    if (q < 0 || q >= n)
        throw ConfigError(where + ": qubit " + std::to_string(q) + " out of range for n=" +
                          std::to_string(n));
    return q;
}

}  // namespace detail

inline Circuit parse_circuit(std::istream& in, int n, const std::string& name = "circuit") {
    Circuit c(n);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = name + " line " + std::to_string(lineno);
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string op;
        if (!(ls >> op)) continue;

        GateKind kind;
        if (op == "RX") kind = GateKind::RX;
        else if (op == "RY") kind = GateKind::RY;
        else if (op == "RZ") kind = GateKind::RZ;
        else if (op == "H") kind = GateKind::H;
        else if (op == "X") kind = GateKind::X;
        else if (op == "CNOT") kind = GateKind::CNOT;
        else if (op == "CZ") kind = GateKind::CZ;
        else throw ConfigError(where + ": unknown gate '" + op + "'");

        std::string tok;
        if (!(ls >> tok)) throw ConfigError(where + ": missing qubit");
        int q0 = detail::parse_qubit(tok, n, where);
        int q1 = -1;
        double angle = 0;
        if (is_two_qubit(kind)) {
            if (!(ls >> tok)) throw ConfigError(where + ": missing second qubit");
            q1 = detail::parse_qubit(tok, n, where);
            if (q1 == q0) throw ConfigError(where + ": control equals target");
        } else if (is_rotation(kind)) {
            if (!(ls >> angle)) throw ConfigError(where + ": missing rotation angle");
        }
        if (ls >> tok) throw ConfigError(where + ": trailing token '" + tok + "'");
        c.add(kind, q0, q1, angle);
    }
    return c;
}

inline void write_circuit(std::ostream& out, const Circuit& c) {
    for (const auto& g : c.gates) {
        out << gate_name(g.kind) << " q" << g.q0;
        if (is_two_qubit(g.kind)) out << " q" << g.q1;
        else if (is_rotation(g.kind)) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", g.angle);
            out << ' ' << buf;
        }
        out << '\n';
    }
}

}  // namespace sse
