#pragma once

// Wire recycling engine.
//
// An ancilla output o may be spliced in front of an ancilla input a whenever
// no path a ~> o exists: the edge o -> a keeps the graph acyclic, and a
// together with everything downstream of it on a's wire moves onto o's wire.
// recycle() drives the splice with a priority queue over ancilla inputs keyed
// by |OA| - n_a, where n_a counts the ancilla outputs reachable from a, so
// inputs that sit late in time are served first. Candidate outputs come from
// one of two searches:
//
//   M1  wire-order search: the valid output minimizing |o.wire - a.wire| by
//       default, or the signed difference o.wire - a.wire.
//   M2  best-first search over the graph that may walk edges backwards; the
//       valid output reached with the fewest backward steps, then the
//       shortest path, wins.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "causal.hpp"

namespace wirerecycle {

enum class Heuristic { M1, M2 };
enum class M1Mode { Signed, Absolute };

inline std::string_view to_string(Heuristic h) { return h == Heuristic::M1 ? "m1" : "m2"; }
inline std::string_view to_string(M1Mode m) { return m == M1Mode::Signed ? "signed" : "absolute"; }

struct RecycleOptions {
    Heuristic heuristic = Heuristic::M1;
    M1Mode m1_mode = M1Mode::Absolute;
};

struct RecyclePlan {
    Heuristic heuristic = Heuristic::M1;
    M1Mode m1_mode = M1Mode::Absolute;
    // (output node, input node) in insertion order.
    std::vector<std::pair<NodeId, NodeId>> added_edges;
    // Final wire label per qubit id.
    std::vector<WireLabel> wire_assignment;
    std::size_t recycled_count = 0;

    std::size_t final_wire_count() const {
        auto labels = wire_assignment;
        std::sort(labels.begin(), labels.end());
        return static_cast<std::size_t>(std::unique(labels.begin(), labels.end()) - labels.begin());
    }
};

inline std::vector<WireLabel> wire_assignment(const CausalGraph& graph) {
    std::vector<WireLabel> wires(graph.qubit_count());
    for (QubitId q = 0; q < wires.size(); ++q) wires[q] = graph.node(graph.input_of(q)).wire();
    return wires;
}

// Adds o -> a and moves a's wire, from a onwards, onto o's wire. Throws and
// leaves the graph untouched if the splice is not allowed.
inline void apply_transformation(CausalGraph& graph, NodeId output, NodeId input) {
    const auto& o = graph.node(output);
    const auto& a = graph.node(input);
    if (!o.is_ancilla_output()) {
        throw Error("apply_transformation: node " + std::to_string(output) + " is not an ancilla output");
    }
    if (!a.is_ancilla_input()) {
        throw Error("apply_transformation: node " + std::to_string(input) + " is not an ancilla input");
    }
    if (!graph.successors(output).empty()) {
        throw Error("apply_transformation: output " + std::to_string(output) + " was already recycled");
    }
    if (!graph.predecessors(input).empty()) {
        throw Error("apply_transformation: input " + std::to_string(input) + " was already recycled");
    }
    auto downstream = reachable_from(graph, input);
    if (downstream[output]) {
        throw Error("apply_transformation: input " + std::to_string(input) + " precedes output " +
                    std::to_string(output) + "; the splice would close a cycle");
    }

    const WireLabel from = a.wire();
    const WireLabel to = o.wire();
    graph.add_edge(output, input);
    downstream[input] = 1;
    for (NodeId v = 0; v < graph.size(); ++v) {
        if (downstream[v]) graph.replace_wire(v, from, to);
    }
}

// Number of `outputs` reachable from every node, computed with one bitset
// sweep in reverse topological order.
inline std::vector<std::size_t> reachable_output_counts(const CausalGraph& graph,
                                                       const std::vector<NodeId>& outputs) {
    const std::size_t words = (outputs.size() + 63) / 64;
    std::vector<std::uint64_t> bits(graph.size() * words, 0);
    std::vector<std::size_t> slot(graph.size(), npos);
    for (std::size_t i = 0; i < outputs.size(); ++i) slot[outputs[i]] = i;

    auto order = topological_order(graph);
    if (order.empty() && graph.size() != 0) throw Error("reachable_output_counts: graph is cyclic");

    std::vector<std::size_t> counts(graph.size(), 0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const NodeId u = *it;
        std::uint64_t* row = bits.data() + u * words;
        for (NodeId v : graph.successors(u)) {
            const std::uint64_t* child = bits.data() + v * words;
            for (std::size_t w = 0; w < words; ++w) row[w] |= child[w];
            if (slot[v] != npos) row[slot[v] / 64] |= std::uint64_t{1} << (slot[v] % 64);
        }
        std::size_t c = 0;
        for (std::size_t w = 0; w < words; ++w) c += static_cast<std::size_t>(__builtin_popcountll(row[w]));
        counts[u] = c;
    }
    return counts;
}

inline std::optional<NodeId> find_candidate_m1(const CausalGraph& graph, NodeId input,
                                               const std::vector<NodeId>& pool,
                                               M1Mode mode = M1Mode::Absolute) {
    const auto downstream = reachable_from(graph, input);
    const auto a_wire = static_cast<long long>(graph.node(input).wire());

    std::optional<NodeId> best;
    std::tuple<long long, WireLabel, NodeId> best_key{};
    for (NodeId o : pool) {
        if (downstream[o]) continue;
        const WireLabel o_wire = graph.node(o).wire();
        long long diff = static_cast<long long>(o_wire) - a_wire;
        if (mode == M1Mode::Absolute && diff < 0) diff = -diff;
        std::tuple<long long, WireLabel, NodeId> key{diff, o_wire, o};
        if (!best || key < best_key) {
            best = o;
            best_key = key;
        }
    }
    return best;
}

// Cost of a search path: (edges walked backwards, total edges).
struct SearchCost {
    std::size_t backward = 0;
    std::size_t length = 0;

    auto operator<=>(const SearchCost&) const = default;
};

// Lowest (backward, length) cost from `input` to every node when edges may be
// walked either way; unreached nodes keep nullopt.
inline std::vector<std::optional<SearchCost>> undirected_search_costs(const CausalGraph& graph, NodeId input) {
    std::vector<std::optional<SearchCost>> cost(graph.size());
    using Entry = std::pair<SearchCost, NodeId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
    cost[input] = SearchCost{};
    frontier.push({SearchCost{}, input});
    while (!frontier.empty()) {
        auto [c, u] = frontier.top();
        frontier.pop();
        if (*cost[u] < c) continue;
        auto relax = [&](NodeId v, SearchCost next) {
            if (!cost[v] || next < *cost[v]) {
                cost[v] = next;
                frontier.push({next, v});
            }
        };
        for (NodeId v : graph.successors(u)) relax(v, {c.backward, c.length + 1});
        for (NodeId v : graph.predecessors(u)) relax(v, {c.backward + 1, c.length + 1});
    }
    return cost;
}

inline std::optional<NodeId> find_candidate_m2(const CausalGraph& graph, NodeId input,
                                               const std::vector<NodeId>& pool) {
    const auto downstream = reachable_from(graph, input);
    const auto cost = undirected_search_costs(graph, input);

    std::optional<NodeId> best;
    std::pair<SearchCost, NodeId> best_key{};
    for (NodeId o : pool) {
        if (!cost[o] || cost[o]->backward == 0 || downstream[o]) continue;
        std::pair<SearchCost, NodeId> key{*cost[o], o};
        if (!best || key < best_key) {
            best = o;
            best_key = key;
        }
    }
    return best;
}

inline std::optional<NodeId> find_candidate(const CausalGraph& graph, NodeId input, const std::vector<NodeId>& pool,
                                            const RecycleOptions& options) {
    if (options.heuristic == Heuristic::M1) return find_candidate_m1(graph, input, pool, options.m1_mode);
    return find_candidate_m2(graph, input, pool);
}

inline RecyclePlan recycle(CausalGraph& graph, const RecycleOptions& options = {}) {
    RecyclePlan plan;
    plan.heuristic = options.heuristic;
    plan.m1_mode = options.m1_mode;

    const auto inputs = ancilla_input_nodes(graph);
    const auto outputs = ancilla_output_nodes(graph);
    for (NodeId a : inputs) {
        if (!graph.predecessors(a).empty()) throw Error("recycle: graph already contains recycling edges");
    }

    std::vector<NodeId> queue = inputs;
    std::vector<NodeId> pool = outputs;
    std::vector<std::size_t> counts;
    bool stale = true;

    while (!queue.empty()) {
        if (stale) {
            counts = reachable_output_counts(graph, outputs);
            stale = false;
        }
        // Highest |OA| - n_a first; equal priorities go to the smaller id.
        auto top = std::min_element(queue.begin(), queue.end(), [&](NodeId x, NodeId y) {
            return std::pair{counts[x], x} < std::pair{counts[y], y};
        });
        const NodeId a = *top;
        queue.erase(top);

        auto o = find_candidate(graph, a, pool, options);
        if (!o) continue;
        apply_transformation(graph, *o, a);
        plan.added_edges.emplace_back(*o, a);
        pool.erase(std::find(pool.begin(), pool.end(), *o));
        stale = true;
    }

    plan.wire_assignment = wire_assignment(graph);
    plan.recycled_count = plan.added_edges.size();
    return plan;
}

} // namespace wirerecycle
