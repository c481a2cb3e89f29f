#pragma once

// Text formats: RevLib `.real` (t/f gate subset), a line-oriented ICM format,
// the post-recycling schedule and the stats JSON record.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "causal.hpp"
#include "circuit.hpp"
#include "recycle.hpp"

namespace wirerecycle {

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& message)
        : Error("line " + std::to_string(line) + ": " + message), line_(line), message_(message) {}

    std::size_t line() const { return line_; }
    const std::string& message() const { return message_; }

private:
    std::size_t line_;
    std::string message_;
};

namespace detail {

inline std::vector<std::string> split_ws(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t j = i;
        while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        if (j > i) out.emplace_back(text.substr(i, j - i));
        i = j;
    }
    return out;
}

// Splits a document into (line number, tokens) with `#` comments removed and
// blank lines dropped.
inline std::vector<std::pair<std::size_t, std::vector<std::string>>> tokenize_lines(std::string_view text) {
    std::vector<std::pair<std::size_t, std::vector<std::string>>> lines;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        ++line_no;
        std::string_view line = text.substr(pos, end - pos);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        auto tokens = split_ws(line);
        if (!tokens.empty()) lines.emplace_back(line_no, std::move(tokens));
        if (end == text.size()) break;
        pos = end + 1;
    }
    return lines;
}

inline std::optional<std::size_t> parse_count(std::string_view s) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

} // namespace detail

// RevLib `.real`. Variables become qubits top-down; constant lines are input
// ancillae, garbage lines are output ancillae measured in Z.
inline Circuit parse_real(std::string_view text, std::string name = {}) {
    Circuit circuit;
    circuit.name = std::move(name);

    std::optional<std::size_t> numvars;
    std::vector<std::string> variables;
    std::string constants;
    std::string garbage;
    std::map<std::string, QubitId, std::less<>> index;
    bool in_body = false;
    bool ended = false;

    auto per_line_list = [&](std::size_t line, const std::vector<std::string>& tokens) {
        if (!numvars) throw ParseError(line, tokens[0] + " before .numvars");
        if (tokens.size() - 1 != *numvars) {
            throw ParseError(line, tokens[0] + " lists " + std::to_string(tokens.size() - 1) + " entries, expected " +
                                       std::to_string(*numvars));
        }
    };
    auto per_line_tags = [&](std::size_t line, const std::vector<std::string>& tokens, std::string_view allowed) {
        if (!numvars) throw ParseError(line, tokens[0] + " before .numvars");
        std::string tags;
        for (std::size_t i = 1; i < tokens.size(); ++i) tags += tokens[i];
        if (tags.size() != *numvars) {
            throw ParseError(line, tokens[0] + " has " + std::to_string(tags.size()) + " tags, expected " +
                                       std::to_string(*numvars));
        }
        for (char c : tags) {
            if (allowed.find(c) == std::string_view::npos) {
                throw ParseError(line, tokens[0] + ": invalid tag '" + std::string(1, c) + "'");
            }
        }
        return tags;
    };

    for (const auto& [line, tokens] : detail::tokenize_lines(text)) {
        const std::string head = detail::lower(tokens[0]);
        if (ended) throw ParseError(line, "content after .end");

        if (!in_body) {
            if (head == ".version" || head == ".inputbus" || head == ".outputbus" || head == ".state") {
                continue;
            }
            if (head == ".numvars") {
                if (tokens.size() != 2) throw ParseError(line, ".numvars expects one value");
                numvars = detail::parse_count(tokens[1]);
                if (!numvars || *numvars == 0) throw ParseError(line, ".numvars must be a positive integer");
            } else if (head == ".variables") {
                per_line_list(line, tokens);
                variables.assign(tokens.begin() + 1, tokens.end());
                index.clear();
                for (QubitId i = 0; i < variables.size(); ++i) {
                    if (!index.emplace(variables[i], i).second) {
                        throw ParseError(line, "duplicate variable '" + variables[i] + "'");
                    }
                }
            } else if (head == ".inputs" || head == ".outputs") {
                per_line_list(line, tokens);
            } else if (head == ".constants") {
                constants = per_line_tags(line, tokens, "01-");
            } else if (head == ".garbage") {
                garbage = per_line_tags(line, tokens, "1-");
            } else if (head == ".begin") {
                if (!numvars) throw ParseError(line, "missing .numvars");
                if (variables.empty()) throw ParseError(line, "missing .variables");
                if (constants.empty()) constants.assign(*numvars, '-');
                if (garbage.empty()) garbage.assign(*numvars, '-');
                for (QubitId i = 0; i < *numvars; ++i) {
                    InitState init = constants[i] == '0'   ? InitState::Zero
                                     : constants[i] == '1' ? InitState::One
                                                           : InitState::Configurable;
                    MeasureBasis measure = garbage[i] == '1' ? MeasureBasis::Z : MeasureBasis::Configurable;
                    circuit.qubits.push_back(make_qubit(i, variables[i], init, measure));
                }
                in_body = true;
            } else if (head == ".end") {
                throw ParseError(line, ".end before .begin");
            } else if (head[0] == '.') {
                throw ParseError(line, "unsupported directive " + tokens[0]);
            } else {
                throw ParseError(line, "gate outside .begin/.end");
            }
            continue;
        }

        if (head == ".end") {
            ended = true;
            continue;
        }
        if (head[0] == '.') throw ParseError(line, "unexpected directive " + tokens[0] + " in gate list");

        const char kind = head[0];
        auto arity = detail::parse_count(std::string_view(head).substr(1));
        if ((kind != 't' && kind != 'f') || !arity || *arity == 0) {
            throw ParseError(line, "unknown gate mnemonic '" + tokens[0] + "'");
        }
        if (kind == 'f' && *arity < 2) throw ParseError(line, "fredkin gate needs at least two operands");
        if (tokens.size() - 1 != *arity) {
            throw ParseError(line, "gate " + tokens[0] + " expects " + std::to_string(*arity) + " operands, got " +
                                       std::to_string(tokens.size() - 1));
        }
        std::vector<QubitId> operands;
        for (std::size_t i = 1; i < tokens.size(); ++i) {
            auto it = index.find(tokens[i]);
            if (it == index.end()) throw ParseError(line, "unknown variable '" + tokens[i] + "'");
            if (std::find(operands.begin(), operands.end(), it->second) != operands.end()) {
                throw ParseError(line, "control equals target");
            }
            operands.push_back(it->second);
        }
        const std::size_t n_targets = kind == 't' ? 1 : 2;
        GateOp gate;
        gate.name = head;
        gate.controls.assign(operands.begin(), operands.end() - static_cast<std::ptrdiff_t>(n_targets));
        gate.targets.assign(operands.end() - static_cast<std::ptrdiff_t>(n_targets), operands.end());
        circuit.gates.push_back(std::move(gate));
    }

    if (!numvars) throw ParseError(0, "missing .numvars");
    if (!in_body) throw ParseError(0, "missing .begin");
    if (!ended) throw ParseError(0, "missing .end");
    return circuit;
}

// ICM text: `qubit L`, `init L <0|1|+|Y|A|io>`, `cnot C T`,
// `measure L <Z|X|io>`. Each qubit needs exactly one init and one measure.
inline Circuit parse_icm(std::string_view text, std::string name = {}) {
    Circuit circuit;
    circuit.name = std::move(name);

    std::map<std::string, QubitId, std::less<>> index;
    std::vector<std::size_t> declared_at;
    std::vector<std::optional<InitState>> inits;
    std::vector<std::optional<MeasureBasis>> measures;

    auto lookup = [&](std::size_t line, const std::string& label) {
        auto it = index.find(label);
        if (it == index.end()) throw ParseError(line, "undeclared qubit '" + label + "'");
        return it->second;
    };
    auto expect_args = [](std::size_t line, const std::vector<std::string>& tokens, std::size_t n) {
        if (tokens.size() != n + 1) {
            throw ParseError(line, tokens[0] + " expects " + std::to_string(n) + " argument(s)");
        }
    };

    for (const auto& [line, tokens] : detail::tokenize_lines(text)) {
        const std::string& head = tokens[0];
        if (head == "qubit") {
            expect_args(line, tokens, 1);
            if (index.count(tokens[1])) throw ParseError(line, "qubit '" + tokens[1] + "' declared twice");
            index.emplace(tokens[1], declared_at.size());
            declared_at.push_back(line);
            inits.emplace_back();
            measures.emplace_back();
            circuit.qubits.push_back(Qubit{circuit.qubits.size(), tokens[1]});
        } else if (head == "init") {
            expect_args(line, tokens, 2);
            QubitId q = lookup(line, tokens[1]);
            if (inits[q]) throw ParseError(line, "duplicate init for '" + tokens[1] + "'");
            auto state = parse_init_token(tokens[2]);
            if (!state) throw ParseError(line, "unknown initial state '" + tokens[2] + "'");
            inits[q] = state;
        } else if (head == "measure") {
            expect_args(line, tokens, 2);
            QubitId q = lookup(line, tokens[1]);
            if (measures[q]) throw ParseError(line, "duplicate measure for '" + tokens[1] + "'");
            auto basis = parse_measure_token(tokens[2]);
            if (!basis) throw ParseError(line, "unknown measurement basis '" + tokens[2] + "'");
            measures[q] = basis;
        } else if (head == "cnot") {
            expect_args(line, tokens, 2);
            QubitId c = lookup(line, tokens[1]);
            QubitId t = lookup(line, tokens[2]);
            if (c == t) throw ParseError(line, "control equals target");
            circuit.gates.push_back(GateOp{"cnot", {c}, {t}});
        } else {
            throw ParseError(line, "unknown statement '" + head + "'");
        }
    }

    for (QubitId q = 0; q < circuit.qubits.size(); ++q) {
        auto& qubit = circuit.qubits[q];
        if (!inits[q]) throw ParseError(declared_at[q], "qubit '" + qubit.label + "' has no init");
        if (!measures[q]) throw ParseError(declared_at[q], "qubit '" + qubit.label + "' has no measure");
        qubit = make_qubit(q, qubit.label, *inits[q], *measures[q]);
    }
    return circuit;
}

inline bool is_cnot(const GateOp& gate) {
    return (gate.name == "cnot" || gate.name == "t2") && gate.controls.size() == 1 && gate.targets.size() == 1;
}

// Writes an all-CNOT circuit in the ICM format accepted by parse_icm.
inline std::string emit_icm(const Circuit& circuit) {
    std::ostringstream out;
    for (const auto& q : circuit.qubits) out << "qubit " << q.label << '\n';
    for (const auto& q : circuit.qubits) out << "init " << q.label << ' ' << to_token(q.init) << '\n';
    for (const auto& g : circuit.gates) {
        if (!is_cnot(g)) throw Error("emit_icm: gate '" + g.name + "' is not a CNOT");
        out << "cnot " << circuit.qubits.at(g.controls[0]).label << ' ' << circuit.qubits.at(g.targets[0]).label
            << '\n';
    }
    for (const auto& q : circuit.qubits) out << "measure " << q.label << ' ' << to_token(q.measure) << '\n';
    return out.str();
}

// One line per graph node in deterministic topological order, using the
// recycled wire labels.
inline std::string emit_schedule(const CausalGraph& graph, const Circuit& circuit) {
    auto order = topological_order(graph);
    if (order.empty() && graph.size() != 0) throw Error("emit_schedule: causal graph is cyclic");
    std::ostringstream out;
    for (NodeId id : order) {
        const auto& node = graph.node(id);
        switch (node.kind) {
            case NodeKind::Input:
                out << "init w" << node.wire() << ' ' << to_token(node.init) << '\n';
                break;
            case NodeKind::Output:
                out << "measure w" << node.wire() << ' ' << to_token(node.measure) << '\n';
                break;
            case NodeKind::Gate:
                out << "gate " << circuit.gates.at(node.gate).name;
                for (WireLabel w : node.wires) out << " w" << w;
                out << '\n';
                break;
        }
    }
    return out.str();
}

struct Stats {
    std::string circuit;
    std::size_t qubits = 0;
    std::size_t ancilla_inputs = 0;
    std::size_t ancilla_outputs = 0;
    Heuristic heuristic = Heuristic::M1;
    std::size_t recycled = 0;

    std::size_t final_wires() const { return qubits - recycled; }
    // 100 * recycled / qubits, rounded half up.
    std::size_t percent() const { return qubits == 0 ? 0 : (200 * recycled + qubits) / (2 * qubits); }
};

inline Stats make_stats(const Circuit& circuit, const RecyclePlan& plan) {
    return Stats{circuit.name,        circuit.qubit_count(), count_input_ancillae(circuit),
                 count_output_ancillae(circuit), plan.heuristic, plan.recycled_count};
}

inline nlohmann::ordered_json stats_to_json(const Stats& stats) {
    nlohmann::ordered_json j;
    j["circuit"] = stats.circuit;
    j["qubits"] = stats.qubits;
    j["ancilla_inputs"] = stats.ancilla_inputs;
    j["ancilla_outputs"] = stats.ancilla_outputs;
    j["heuristic"] = std::string(to_string(stats.heuristic));
    j["recycled"] = stats.recycled;
    j["final_wires"] = stats.final_wires();
    j["percent"] = stats.percent();
    return j;
}

inline std::string emit_stats_json(const Stats& stats) { return stats_to_json(stats).dump(); }

} // namespace wirerecycle
