#pragma once

// Circuit intermediate representation: declared qubits with their
// initialization/measurement metadata and a time-ordered gate list.
// Initializations and measurements are not gates; they live on the qubits
// and only become explicit operations in the causal graph.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wirerecycle {

using QubitId = std::size_t;
using GateIndex = std::size_t;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class InitState { Zero, One, Plus, Y, A, Configurable };
enum class MeasureBasis { Z, X, Configurable };

inline bool is_fixed(InitState s) { return s != InitState::Configurable; }
inline bool is_fixed(MeasureBasis b) { return b != MeasureBasis::Configurable; }

// Tokens shared by the ICM format and the schedule emitter.
inline std::string_view to_token(InitState s) {
    switch (s) {
        case InitState::Zero: return "0";
        case InitState::One: return "1";
        case InitState::Plus: return "+";
        case InitState::Y: return "Y";
        case InitState::A: return "A";
        case InitState::Configurable: return "io";
    }
    return "?";
}

inline std::string_view to_token(MeasureBasis b) {
    switch (b) {
        case MeasureBasis::Z: return "Z";
        case MeasureBasis::X: return "X";
        case MeasureBasis::Configurable: return "io";
    }
    return "?";
}

inline std::optional<InitState> parse_init_token(std::string_view tok) {
    if (tok == "0") return InitState::Zero;
    if (tok == "1") return InitState::One;
    if (tok == "+") return InitState::Plus;
    if (tok == "Y") return InitState::Y;
    if (tok == "A") return InitState::A;
    if (tok == "io") return InitState::Configurable;
    return std::nullopt;
}

inline std::optional<MeasureBasis> parse_measure_token(std::string_view tok) {
    if (tok == "Z") return MeasureBasis::Z;
    if (tok == "X") return MeasureBasis::X;
    if (tok == "io") return MeasureBasis::Configurable;
    return std::nullopt;
}

struct Qubit {
    QubitId id = 0;
    std::string label;
    InitState init = InitState::Configurable;
    MeasureBasis measure = MeasureBasis::Configurable;
    bool input_ancilla = false;
    bool output_ancilla = false;

    bool operator==(const Qubit&) const = default;
};

// Builds a qubit whose ancilla flags follow its init/measure tags.
inline Qubit make_qubit(QubitId id, std::string label, InitState init, MeasureBasis measure) {
    return Qubit{id, std::move(label), init, measure, is_fixed(init), is_fixed(measure)};
}

struct GateOp {
    std::string name;
    std::vector<QubitId> controls;
    std::vector<QubitId> targets;

    // Controls first, then targets.
    std::vector<QubitId> operands() const {
        std::vector<QubitId> ops(controls);
        ops.insert(ops.end(), targets.begin(), targets.end());
        return ops;
    }

    bool touches(QubitId q) const {
        return std::find(controls.begin(), controls.end(), q) != controls.end() ||
               std::find(targets.begin(), targets.end(), q) != targets.end();
    }

    bool operator==(const GateOp&) const = default;
};

struct Circuit {
    std::string name;
    std::vector<Qubit> qubits;
    std::vector<GateOp> gates;

    std::size_t qubit_count() const { return qubits.size(); }
    std::size_t gate_count() const { return gates.size(); }
};

struct Lifetime {
    QubitId qubit = 0;
    std::optional<GateIndex> first_gate;
    std::optional<GateIndex> last_gate;

    bool active() const { return first_gate.has_value(); }
};

struct AncillaSets {
    std::set<QubitId> inputs;
    std::set<QubitId> outputs;
};

inline AncillaSets classify_ancillae(const Circuit& circuit) {
    AncillaSets sets;
    for (const auto& q : circuit.qubits) {
        if (is_fixed(q.init)) sets.inputs.insert(q.id);
        if (is_fixed(q.measure)) sets.outputs.insert(q.id);
    }
    return sets;
}

inline Lifetime lifetime(const Circuit& circuit, QubitId q) {
    if (q >= circuit.qubits.size()) {
        throw Error("lifetime: unknown qubit id " + std::to_string(q));
    }
    Lifetime lt{q, std::nullopt, std::nullopt};
    for (GateIndex i = 0; i < circuit.gates.size(); ++i) {
        if (!circuit.gates[i].touches(q)) continue;
        if (!lt.first_gate) lt.first_gate = i;
        lt.last_gate = i;
    }
    return lt;
}

// Returns every invariant violation; an empty list means the circuit is valid.
inline std::vector<std::string> validate(const Circuit& circuit) {
    std::vector<std::string> errors;
    const std::size_t n = circuit.qubits.size();

    for (std::size_t i = 0; i < n; ++i) {
        const auto& q = circuit.qubits[i];
        if (q.id != i) {
            errors.push_back("qubit '" + q.label + "': id " + std::to_string(q.id) +
                             " is not contiguous (expected " + std::to_string(i) + ")");
        }
        if (q.input_ancilla != is_fixed(q.init)) {
            errors.push_back("qubit '" + q.label + "': input-ancilla flag disagrees with init state");
        }
        if (q.output_ancilla != is_fixed(q.measure)) {
            errors.push_back("qubit '" + q.label + "': output-ancilla flag disagrees with measure basis");
        }
    }
    std::set<std::string> labels;
    for (const auto& q : circuit.qubits) {
        if (!labels.insert(q.label).second) {
            errors.push_back("duplicate qubit label '" + q.label + "'");
        }
    }

    for (GateIndex g = 0; g < circuit.gates.size(); ++g) {
        const auto& gate = circuit.gates[g];
        const std::string where = "gate " + std::to_string(g) + " (" + gate.name + "): ";
        if (gate.controls.empty() && gate.targets.empty()) {
            errors.push_back(where + "touches no qubit");
            continue;
        }
        for (QubitId q : gate.operands()) {
            if (q >= n) errors.push_back(where + "undeclared qubit " + std::to_string(q));
        }
        bool overlap = false;
        for (QubitId c : gate.controls) {
            if (std::find(gate.targets.begin(), gate.targets.end(), c) != gate.targets.end()) overlap = true;
        }
        if (overlap) errors.push_back(where + "control equals target");
        auto ops = gate.operands();
        std::sort(ops.begin(), ops.end());
        if (!overlap && std::adjacent_find(ops.begin(), ops.end()) != ops.end()) {
            errors.push_back(where + "repeated operand");
        }
    }
    return errors;
}

inline void require_valid(const Circuit& circuit) {
    auto errors = validate(circuit);
    if (!errors.empty()) throw Error("invalid circuit '" + circuit.name + "': " + errors.front());
}

inline std::size_t count_input_ancillae(const Circuit& c) {
    return static_cast<std::size_t>(
        std::count_if(c.qubits.begin(), c.qubits.end(), [](const Qubit& q) { return q.input_ancilla; }));
}

inline std::size_t count_output_ancillae(const Circuit& c) {
    return static_cast<std::size_t>(
        std::count_if(c.qubits.begin(), c.qubits.end(), [](const Qubit& q) { return q.output_ancilla; }));
}

} // namespace wirerecycle
