#pragma once

// Independent checks of a recycling result. Nothing here reuses the engine's
// search code: reachability is recomputed with breadth-first bitset sweeps and
// wire labels are replayed from the plan alone.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "causal.hpp"
#include "circuit.hpp"
#include "recycle.hpp"

namespace wirerecycle {

using Word = std::uint64_t;

inline constexpr std::size_t max_exhaustive_inputs = 12;

enum class GateSemantics { Toffoli, Fredkin };

// Multi-control NOT (t<k>, cnot, toffoli, not) or multi-control swap
// (f<k>, fredkin, swap). Anything else has no classical meaning here.
inline GateSemantics classical_semantics(const GateOp& gate) {
    const std::string& n = gate.name;
    const bool numbered = n.size() > 1 && std::all_of(n.begin() + 1, n.end(), [](char c) { return c >= '0' && c <= '9'; });
    if (((numbered && n[0] == 't') || n == "cnot" || n == "toffoli" || n == "not" || n == "x") &&
        gate.targets.size() == 1) {
        return GateSemantics::Toffoli;
    }
    if (((numbered && n[0] == 'f') || n == "fredkin" || n == "swap") && gate.targets.size() == 2) {
        return GateSemantics::Fredkin;
    }
    throw Error("gate '" + gate.name + "': semantics unknown");
}

// Applies `gate` to bit cells addressed through `slot`, so the same code runs
// on qubit-indexed words and on wire-indexed schedules.
template <class BitAt>
void apply_classical_gate(const GateOp& gate, GateSemantics sem, BitAt&& bit, const std::vector<std::size_t>& slot) {
    const std::size_t nc = gate.controls.size();
    for (std::size_t i = 0; i < nc; ++i) {
        if (!bit(slot[i])) return;
    }
    if (sem == GateSemantics::Toffoli) {
        auto& t = bit(slot[nc]);
        t = !t;
    } else {
        auto& a = bit(slot[nc]);
        auto& b = bit(slot[nc + 1]);
        std::swap(a, b);
    }
}

// Bit i of the word is qubit i.
inline Word simulate_reversible(const Circuit& circuit, Word input_word) {
    if (circuit.qubit_count() > 64) throw Error("simulate_reversible: more than 64 qubits");
    std::vector<char> bits(circuit.qubit_count());
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = static_cast<char>((input_word >> i) & 1U);
    auto at = [&](std::size_t i) -> char& { return bits[i]; };
    for (const auto& gate : circuit.gates) {
        auto sem = classical_semantics(gate);
        auto ops = gate.operands();
        apply_classical_gate(gate, sem, at, std::vector<std::size_t>(ops.begin(), ops.end()));
    }
    Word out = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) out |= static_cast<Word>(bits[i] != 0) << i;
    return out;
}

struct TruthTable {
    std::size_t var_count = 0;
    std::vector<Word> rows;

    bool is_bijective() const {
        std::vector<char> hit(rows.size(), 0);
        for (Word r : rows) {
            if (r >= rows.size() || hit[r]) return false;
            hit[r] = 1;
        }
        return true;
    }
};

inline TruthTable truth_table(const Circuit& circuit) {
    if (circuit.qubit_count() > max_exhaustive_inputs) {
        throw Error("truth_table: " + std::to_string(circuit.qubit_count()) + " variables; exhaustive check infeasible");
    }
    TruthTable table{circuit.qubit_count(), {}};
    table.rows.resize(std::size_t{1} << table.var_count);
    for (Word w = 0; w < table.rows.size(); ++w) table.rows[w] = simulate_reversible(circuit, w);
    return table;
}

// ---------------------------------------------------------------------------
// Structural soundness

// Descendant sets by breadth-first search, one bitset per queried source.
class ReachabilityOracle {
public:
    explicit ReachabilityOracle(const CausalGraph& graph) : graph_(graph) {}

    std::vector<bool> descendants(NodeId source) const {
        std::vector<bool> seen(graph_.size(), false);
        std::deque<NodeId> frontier(graph_.successors(source).begin(), graph_.successors(source).end());
        for (NodeId v : frontier) seen[v] = true;
        while (!frontier.empty()) {
            NodeId u = frontier.front();
            frontier.pop_front();
            for (NodeId v : graph_.successors(u)) {
                if (!seen[v]) {
                    seen[v] = true;
                    frontier.push_back(v);
                }
            }
        }
        return seen;
    }

    bool reaches(NodeId from, NodeId to) const { return descendants(from)[to]; }

private:
    const CausalGraph& graph_;
};

// Three-colour DFS cycle detection.
inline bool has_cycle(const CausalGraph& graph) {
    enum : char { White, Grey, Black };
    std::vector<char> colour(graph.size(), White);
    for (NodeId root = 0; root < graph.size(); ++root) {
        if (colour[root] != White) continue;
        std::vector<std::pair<NodeId, std::size_t>> stack{{root, 0}};
        colour[root] = Grey;
        while (!stack.empty()) {
            auto& [u, next] = stack.back();
            const auto& succ = graph.successors(u);
            if (next == succ.size()) {
                colour[u] = Black;
                stack.pop_back();
                continue;
            }
            NodeId v = succ[next++];
            if (colour[v] == Grey) return true;
            if (colour[v] == White) {
                colour[v] = Grey;
                stack.emplace_back(v, 0);
            }
        }
    }
    return false;
}

struct Violation {
    int check = 0;
    std::string message;
};

struct SoundnessReport {
    std::vector<Violation> violations;
    std::size_t replayed_queries = 0;

    bool ok() const { return violations.empty(); }
    bool failed(int check) const {
        return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.check == check; });
    }

    static std::string_view check_name(int check) {
        switch (check) {
            case 1: return "acyclic";
            case 2: return "splice-precondition";
            case 3: return "wire-chain-order";
            case 4: return "wire-assignment";
            case 5: return "io-qubits-untouched";
        }
        return "unknown";
    }

    std::string text() const {
        std::ostringstream out;
        if (ok()) {
            out << "plan sound (" << replayed_queries << " replayed reachability queries)\n";
            return out.str();
        }
        for (const auto& v : violations) {
            out << "check " << v.check << " [" << check_name(v.check) << "]: " << v.message << '\n';
        }
        return out.str();
    }

    nlohmann::ordered_json json() const {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& v : violations) {
            nlohmann::ordered_json j;
            j["check"] = v.check;
            j["name"] = std::string(check_name(v.check));
            j["message"] = v.message;
            arr.push_back(std::move(j));
        }
        return arr;
    }
};

inline SoundnessReport check_plan_sound(const Circuit& circuit, const CausalGraph& graph, const RecyclePlan& plan) {
    SoundnessReport report;
    auto fail = [&](int check, std::string message) { report.violations.push_back({check, std::move(message)}); };
    const std::size_t n = circuit.qubit_count();

    // (1)
    if (has_cycle(graph)) fail(1, "recycled causal graph contains a cycle");

    // (2) Replay the splices on a fresh graph, checking each one against the
    // graph state at its insertion time.
    CausalGraph fresh = build_causal_graph(circuit);
    if (fresh.size() != graph.size()) {
        fail(2, "node count " + std::to_string(graph.size()) + " differs from fresh graph " +
                    std::to_string(fresh.size()));
        return report;
    }
    std::set<NodeId> used_outputs;
    std::set<NodeId> used_inputs;
    for (const auto& [o, a] : plan.added_edges) {
        const std::string edge = "edge output " + std::to_string(o) + " -> input " + std::to_string(a);
        if (o >= fresh.size() || a >= fresh.size()) {
            fail(2, edge + ": node id out of range");
            continue;
        }
        if (!fresh.node(o).is_ancilla_output()) fail(2, edge + ": source is not an ancilla output");
        if (!fresh.node(a).is_ancilla_input()) fail(2, edge + ": target is not an ancilla input");
        if (!used_outputs.insert(o).second) fail(2, edge + ": output used twice");
        if (!used_inputs.insert(a).second) fail(2, edge + ": input used twice");

        const bool oracle = ReachabilityOracle(fresh).reaches(a, o);
        const bool engine = precedes(fresh, a, o);
        ++report.replayed_queries;
        if (oracle != engine) fail(2, edge + ": reachability implementations disagree");
        if (oracle) fail(2, edge + ": input precedes output at insertion time");
        fresh.add_edge(o, a);
    }
    if (fresh.edges() != graph.edges()) fail(2, "graph edges differ from the fresh graph plus the plan's splices");

    // (4) Replay wire labels: each splice moves every qubit on a's wire onto
    // o's wire.
    std::vector<WireLabel> label(n);
    for (QubitId q = 0; q < n; ++q) label[q] = q;
    for (const auto& [o, a] : plan.added_edges) {
        if (o >= fresh.size() || a >= fresh.size()) continue;
        const auto& on = fresh.node(o);
        const auto& an = fresh.node(a);
        if (!on.is_output() || !an.is_input()) continue;
        const WireLabel from = label[an.qubit];
        const WireLabel to = label[on.qubit];
        for (auto& l : label) {
            if (l == from) l = to;
        }
    }
    if (plan.wire_assignment != label) fail(4, "wire_assignment does not match the replayed relabeling");
    std::set<WireLabel> distinct(label.begin(), label.end());
    if (plan.recycled_count != plan.added_edges.size()) fail(4, "recycled_count differs from the number of splices");
    if (n - distinct.size() != plan.added_edges.size()) {
        fail(4, "wire count " + std::to_string(distinct.size()) + " inconsistent with " +
                    std::to_string(plan.added_edges.size()) + " splices");
    }
    for (const auto& node : graph.nodes()) {
        if (node.is_input() || node.is_output()) {
            if (node.wires.size() != 1 || node.wire() != label[node.qubit]) {
                fail(4, "node " + std::to_string(node.id) + " of qubit " + std::to_string(node.qubit) +
                            " carries the wrong wire label");
            }
        } else {
            auto ops = circuit.gates.at(node.gate).operands();
            bool okay = node.wires.size() == ops.size();
            for (std::size_t i = 0; okay && i < ops.size(); ++i) okay = node.wires[i] == label[ops[i]];
            if (!okay) fail(4, "gate node " + std::to_string(node.id) + " carries the wrong wire labels");
        }
    }

    // (3) Qubits sharing a wire must be totally ordered: one's measurement
    // precedes the other's initialization.
    ReachabilityOracle final_reach(graph);
    std::vector<std::vector<QubitId>> by_wire(n);
    for (QubitId q = 0; q < n; ++q) {
        if (label[q] < n) by_wire[label[q]].push_back(q);
    }
    for (WireLabel w = 0; w < n; ++w) {
        const auto& qs = by_wire[w];
        if (qs.size() < 2) continue;
        std::vector<std::vector<bool>> after(qs.size());
        for (std::size_t i = 0; i < qs.size(); ++i) after[i] = final_reach.descendants(graph.output_of(qs[i]));
        for (std::size_t i = 0; i < qs.size(); ++i) {
            for (std::size_t j = i + 1; j < qs.size(); ++j) {
                const bool ij = after[i][graph.input_of(qs[j])];
                const bool ji = after[j][graph.input_of(qs[i])];
                if (!ij && !ji) {
                    fail(3, "qubits " + std::to_string(qs[i]) + " and " + std::to_string(qs[j]) + " share wire " +
                                std::to_string(w) + " with overlapping lifetimes");
                }
            }
        }
    }

    // (5)
    for (const auto& q : circuit.qubits) {
        const bool spliced = std::any_of(plan.added_edges.begin(), plan.added_edges.end(), [&](const auto& e) {
            return e.first == graph.output_of(q.id) || e.second == graph.input_of(q.id);
        });
        if (!q.input_ancilla && !q.output_ancilla && spliced) {
            fail(5, "I/O qubit '" + q.label + "' appears in a splice");
        }
        if (!q.input_ancilla && label[q.id] != q.id) {
            fail(5, "qubit '" + q.label + "' with configurable input moved to wire " + std::to_string(label[q.id]));
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Functional equivalence

namespace detail {

inline char constant_bit(const Qubit& q) {
    switch (q.init) {
        case InitState::Zero: return 0;
        case InitState::One: return 1;
        default: throw Error("qubit '" + q.label + "': initial state |" + std::string(to_token(q.init)) +
                             "> has no classical value; semantics unknown");
    }
}

} // namespace detail

// Runs the recycled schedule (topological order of graph_after, one bit per
// wire, measurements freeing wires) against the original circuit for every
// assignment of the configurable inputs and compares configurable outputs.
inline bool check_functional_equivalence(const Circuit& circuit, const CausalGraph& graph_after,
                                         const RecyclePlan& plan) {
    std::vector<QubitId> free_inputs;
    std::vector<QubitId> observed;
    for (const auto& q : circuit.qubits) {
        if (!is_fixed(q.init)) free_inputs.push_back(q.id);
        if (!is_fixed(q.measure)) observed.push_back(q.id);
    }
    if (free_inputs.size() > max_exhaustive_inputs) {
        throw Error("check_functional_equivalence: " + std::to_string(free_inputs.size()) +
                    " configurable inputs; exhaustive check infeasible");
    }
    if (circuit.qubit_count() > 64) throw Error("check_functional_equivalence: more than 64 qubits");

    Word constants = 0;
    for (const auto& q : circuit.qubits) {
        if (is_fixed(q.init)) constants |= static_cast<Word>(detail::constant_bit(q)) << q.id;
    }
    std::vector<GateSemantics> sems;
    for (const auto& g : circuit.gates) sems.push_back(classical_semantics(g));

    auto order = topological_order(graph_after);
    if (order.empty() && graph_after.size() != 0) return false;

    std::size_t wire_count = 0;
    for (const auto& node : graph_after.nodes()) {
        for (WireLabel w : node.wires) wire_count = std::max(wire_count, w + 1);
    }
    if (plan.final_wire_count() > wire_count) return false;

    constexpr char free_cell = -1;
    std::vector<char> wires(wire_count);
    std::vector<char> measured(circuit.qubit_count());
    auto at = [&](std::size_t w) -> char& { return wires[w]; };

    for (Word assignment = 0; assignment < (Word{1} << free_inputs.size()); ++assignment) {
        Word input = constants;
        for (std::size_t i = 0; i < free_inputs.size(); ++i) input |= ((assignment >> i) & 1U) << free_inputs[i];
        const Word expected = simulate_reversible(circuit, input);

        std::fill(wires.begin(), wires.end(), free_cell);
        std::fill(measured.begin(), measured.end(), free_cell);
        for (NodeId id : order) {
            const auto& node = graph_after.node(id);
            if (node.is_input()) {
                if (wires[node.wire()] != free_cell) return false;
                wires[node.wire()] = static_cast<char>((input >> node.qubit) & 1U);
            } else if (node.is_output()) {
                if (wires[node.wire()] == free_cell) return false;
                measured[node.qubit] = wires[node.wire()];
                wires[node.wire()] = free_cell;
            } else {
                for (WireLabel w : node.wires) {
                    if (wires[w] == free_cell) return false;
                }
                std::vector<std::size_t> slot(node.wires.begin(), node.wires.end());
                apply_classical_gate(circuit.gates[node.gate], sems[node.gate], at, slot);
            }
        }
        for (QubitId q : observed) {
            if (measured[q] == free_cell) return false;
            if (static_cast<Word>(measured[q]) != ((expected >> q) & 1U)) return false;
        }
    }
    return true;
}

} // namespace wirerecycle
