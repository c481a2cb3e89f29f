#pragma once

// Causal graph of a circuit: one node per initialization, gate and
// measurement, edges giving temporal precedence. Every node carries the wire
// labels it operates on; wire labels start out equal to qubit ids and are
// rewritten when wires are recycled.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "circuit.hpp"

namespace wirerecycle {

using NodeId = std::size_t;
using WireLabel = std::size_t;

inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

enum class NodeKind { Input, Gate, Output };

struct CausalNode {
    NodeId id = 0;
    NodeKind kind = NodeKind::Gate;
    // Input/Output: the qubit it initializes or measures. Gate: unused.
    QubitId qubit = npos;
    // Gate: index into Circuit::gates. Input/Output: unused.
    GateIndex gate = npos;
    InitState init = InitState::Configurable;
    MeasureBasis measure = MeasureBasis::Configurable;
    // Ordered like the gate operands (controls, then targets); one entry for
    // Input/Output nodes.
    std::vector<WireLabel> wires;

    bool is_input() const { return kind == NodeKind::Input; }
    bool is_output() const { return kind == NodeKind::Output; }
    bool is_gate() const { return kind == NodeKind::Gate; }
    bool is_ancilla_input() const { return is_input() && is_fixed(init); }
    bool is_ancilla_output() const { return is_output() && is_fixed(measure); }
    WireLabel wire() const { return wires.front(); }
};

class CausalGraph {
public:
    CausalGraph() = default;

    NodeId add_node(CausalNode node) {
        node.id = nodes_.size();
        nodes_.push_back(std::move(node));
        succ_.emplace_back();
        pred_.emplace_back();
        return nodes_.back().id;
    }

    // Parallel edges collapse; returns false when the edge already existed.
    bool add_edge(NodeId from, NodeId to) {
        check(from);
        check(to);
        auto& out = succ_[from];
        if (std::find(out.begin(), out.end(), to) != out.end()) return false;
        out.push_back(to);
        pred_[to].push_back(from);
        ++edge_count_;
        return true;
    }

    bool has_edge(NodeId from, NodeId to) const {
        check(from);
        const auto& out = succ_[from];
        return std::find(out.begin(), out.end(), to) != out.end();
    }

    void replace_wire(NodeId id, WireLabel from, WireLabel to) {
        check(id);
        for (auto& w : nodes_[id].wires) {
            if (w == from) w = to;
        }
    }

    std::size_t size() const { return nodes_.size(); }
    std::size_t edge_count() const { return edge_count_; }
    const CausalNode& node(NodeId id) const {
        check(id);
        return nodes_[id];
    }
    const std::vector<CausalNode>& nodes() const { return nodes_; }
    const std::vector<NodeId>& successors(NodeId id) const {
        check(id);
        return succ_[id];
    }
    const std::vector<NodeId>& predecessors(NodeId id) const {
        check(id);
        return pred_[id];
    }

    std::vector<std::pair<NodeId, NodeId>> edges() const {
        std::vector<std::pair<NodeId, NodeId>> all;
        all.reserve(edge_count_);
        for (NodeId u = 0; u < succ_.size(); ++u) {
            for (NodeId v : succ_[u]) all.emplace_back(u, v);
        }
        std::sort(all.begin(), all.end());
        return all;
    }

    NodeId input_of(QubitId q) const { return inputs_by_qubit_.at(q); }
    NodeId output_of(QubitId q) const { return outputs_by_qubit_.at(q); }
    std::size_t qubit_count() const { return inputs_by_qubit_.size(); }

    void bind_qubit(QubitId q, NodeId input, NodeId output) {
        if (inputs_by_qubit_.size() <= q) {
            inputs_by_qubit_.resize(q + 1, npos);
            outputs_by_qubit_.resize(q + 1, npos);
        }
        inputs_by_qubit_[q] = input;
        outputs_by_qubit_[q] = output;
    }

private:
    void check(NodeId id) const {
        if (id >= nodes_.size()) throw Error("causal graph: invalid node id " + std::to_string(id));
    }

    std::vector<CausalNode> nodes_;
    std::vector<std::vector<NodeId>> succ_;
    std::vector<std::vector<NodeId>> pred_;
    std::vector<NodeId> inputs_by_qubit_;
    std::vector<NodeId> outputs_by_qubit_;
    std::size_t edge_count_ = 0;
};

// Node ids: inputs 0..n-1 by qubit, gates n..n+g-1 in time order, outputs
// n+g..2n+g-1 by qubit.
inline CausalGraph build_causal_graph(const Circuit& circuit) {
    require_valid(circuit);
    const std::size_t n = circuit.qubits.size();
    const std::size_t g = circuit.gates.size();
    CausalGraph graph;

    for (const auto& q : circuit.qubits) {
        CausalNode node;
        node.kind = NodeKind::Input;
        node.qubit = q.id;
        node.init = q.init;
        node.wires = {q.id};
        graph.add_node(std::move(node));
    }
    for (GateIndex i = 0; i < g; ++i) {
        CausalNode node;
        node.kind = NodeKind::Gate;
        node.gate = i;
        auto ops = circuit.gates[i].operands();
        node.wires.assign(ops.begin(), ops.end());
        graph.add_node(std::move(node));
    }
    for (const auto& q : circuit.qubits) {
        CausalNode node;
        node.kind = NodeKind::Output;
        node.qubit = q.id;
        node.measure = q.measure;
        node.wires = {q.id};
        graph.add_node(std::move(node));
    }

    std::vector<NodeId> last(n);
    for (QubitId q = 0; q < n; ++q) {
        last[q] = q;
        graph.bind_qubit(q, q, n + g + q);
    }
    for (GateIndex i = 0; i < g; ++i) {
        const NodeId node = n + i;
        for (QubitId q : circuit.gates[i].operands()) {
            graph.add_edge(last[q], node);
            last[q] = node;
        }
    }
    for (QubitId q = 0; q < n; ++q) graph.add_edge(last[q], n + g + q);
    return graph;
}

// Marks every node reachable from `from` by a non-empty directed path.
inline std::vector<char> reachable_from(const CausalGraph& graph, NodeId from) {
    std::vector<char> seen(graph.size(), 0);
    std::vector<NodeId> stack(graph.successors(from).begin(), graph.successors(from).end());
    while (!stack.empty()) {
        NodeId u = stack.back();
        stack.pop_back();
        if (seen[u]) continue;
        seen[u] = 1;
        for (NodeId v : graph.successors(u)) {
            if (!seen[v]) stack.push_back(v);
        }
    }
    return seen;
}

// True iff a directed path u ~> v exists. Irreflexive on a DAG.
inline bool precedes(const CausalGraph& graph, NodeId u, NodeId v) {
    graph.node(v);
    std::vector<char> seen(graph.size(), 0);
    std::vector<NodeId> stack(graph.successors(u).begin(), graph.successors(u).end());
    while (!stack.empty()) {
        NodeId x = stack.back();
        stack.pop_back();
        if (x == v) return true;
        if (seen[x]) continue;
        seen[x] = 1;
        for (NodeId y : graph.successors(x)) {
            if (!seen[y]) stack.push_back(y);
        }
    }
    return false;
}

inline std::size_t count_preceded_outputs(const CausalGraph& graph, NodeId ancilla_input,
                                          const std::vector<NodeId>& outputs) {
    if (!graph.node(ancilla_input).is_ancilla_input()) {
        throw Error("count_preceded_outputs: node " + std::to_string(ancilla_input) +
                    " is not an ancilla input");
    }
    auto seen = reachable_from(graph, ancilla_input);
    return static_cast<std::size_t>(
        std::count_if(outputs.begin(), outputs.end(), [&](NodeId o) { return seen.at(o) != 0; }));
}

// Kahn's algorithm; ready nodes leave in increasing id order so the result is
// deterministic. Returns an empty vector for a cyclic graph.
inline std::vector<NodeId> topological_order(const CausalGraph& graph) {
    std::vector<std::size_t> in_degree(graph.size());
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
    for (NodeId v = 0; v < graph.size(); ++v) {
        in_degree[v] = graph.predecessors(v).size();
        if (in_degree[v] == 0) ready.push(v);
    }
    std::vector<NodeId> order;
    order.reserve(graph.size());
    while (!ready.empty()) {
        NodeId u = ready.top();
        ready.pop();
        order.push_back(u);
        for (NodeId v : graph.successors(u)) {
            if (--in_degree[v] == 0) ready.push(v);
        }
    }
    if (order.size() != graph.size()) return {};
    return order;
}

inline bool is_acyclic(const CausalGraph& graph) {
    return graph.size() == 0 || !topological_order(graph).empty();
}

inline std::vector<NodeId> ancilla_input_nodes(const CausalGraph& graph) {
    std::vector<NodeId> ids;
    for (const auto& node : graph.nodes()) {
        if (node.is_ancilla_input()) ids.push_back(node.id);
    }
    return ids;
}

inline std::vector<NodeId> ancilla_output_nodes(const CausalGraph& graph) {
    std::vector<NodeId> ids;
    for (const auto& node : graph.nodes()) {
        if (node.is_ancilla_output()) ids.push_back(node.id);
    }
    return ids;
}

inline std::string node_label(const CausalGraph& graph, const Circuit& circuit, NodeId id) {
    const auto& node = graph.node(id);
    std::ostringstream out;
    switch (node.kind) {
        case NodeKind::Input:
            out << "input" << node.qubit << " |" << to_token(node.init) << ">";
            break;
        case NodeKind::Output:
            out << "output" << node.qubit << " " << to_token(node.measure);
            break;
        case NodeKind::Gate:
            out << circuit.gates.at(node.gate).name << "#" << node.gate;
            break;
    }
    out << " w{";
    for (std::size_t i = 0; i < node.wires.size(); ++i) out << (i ? "," : "") << node.wires[i];
    out << "}";
    return out.str();
}

inline std::string to_dot(const CausalGraph& graph, const Circuit& circuit) {
    std::ostringstream out;
    out << "digraph \"" << circuit.name << "\" {\n";
    for (const auto& node : graph.nodes()) {
        out << "  n" << node.id << " [label=\"" << node_label(graph, circuit, node.id) << "\"";
        if (node.is_ancilla_input() || node.is_ancilla_output()) out << ", shape=box";
        out << "];\n";
    }
    for (const auto& [u, v] : graph.edges()) {
        out << "  n" << u << " -> n" << v;
        if (graph.node(u).is_output() && graph.node(v).is_input()) out << " [style=bold, color=red]";
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

} // namespace wirerecycle
