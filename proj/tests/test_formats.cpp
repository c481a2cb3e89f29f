#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace wrtest;

namespace {

std::size_t error_line(const std::function<void()>& f) {
    try {
        f();
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

std::string error_text(const std::function<void()>& f) {
    try {
        f();
    } catch (const ParseError& e) {
        return e.what();
    }
    return {};
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

} // namespace

TEST(Real, MinimalFile) {
    auto c = parse_real(".numvars 2\n.variables a b\n.constants -1\n.garbage 1-\n.begin\nt2 a b\n.end\n");
    ASSERT_EQ(c.qubit_count(), 2u);
    EXPECT_FALSE(c.qubits[0].input_ancilla);
    EXPECT_TRUE(c.qubits[0].output_ancilla);
    EXPECT_TRUE(c.qubits[1].input_ancilla);
    EXPECT_EQ(c.qubits[1].init, InitState::One);
    EXPECT_FALSE(c.qubits[1].output_ancilla);
    ASSERT_EQ(c.gate_count(), 1u);
    EXPECT_EQ(c.gates[0].controls, (std::vector<QubitId>{0}));
    EXPECT_EQ(c.gates[0].targets, (std::vector<QubitId>{1}));
}

TEST(Real, EmptyBody) {
    auto c = parse_real(".numvars 3\n.variables a b c\n.begin\n.end\n");
    EXPECT_EQ(c.qubit_count(), 3u);
    EXPECT_EQ(c.gate_count(), 0u);
}

TEST(Real, IgnoresCommentsAndBusDirectives) {
    auto c = parse_real("# header\n.version 1.0\n.numvars 2\n.variables a b\n.inputbus x a\n.begin\nf2 a b # swap\n.end\n");
    ASSERT_EQ(c.gate_count(), 1u);
    EXPECT_EQ(c.gates[0].targets.size(), 2u);
}

TEST(Real, Errors) {
    EXPECT_EQ(error_line([] { parse_real(".variables a b\n.begin\n.end\n"); }), 1u);
    EXPECT_EQ(error_line([] { parse_real(".numvars 2\n.variables a b\n.begin\nt3 a b\n.end\n"); }), 4u);
    EXPECT_EQ(error_line([] { parse_real(".numvars 2\n.variables a b\n.begin\nt2 a z\n.end\n"); }), 4u);
    EXPECT_EQ(error_line([] { parse_real(".numvars 2\n.variables a b\n.begin\np2 a b\n.end\n"); }), 4u);
    EXPECT_EQ(error_line([] { parse_real(".numvars 2\n.variables a b\n.constants 0\n.begin\n.end\n"); }), 3u);
    EXPECT_NE(error_text([] { parse_real(".numvars 2\n.variables a b\n.begin\nt2 a a\n.end\n"); }).find("control equals target"),
              std::string::npos);
}

TEST(Icm, Fig2File) {
    auto c = load_fixture("circuits/fig2.icm");
    EXPECT_EQ(c.qubit_count(), 3u);
    EXPECT_EQ(c.gate_count(), 2u);
    auto sets = classify_ancillae(c);
    EXPECT_EQ(sets.inputs, (std::set<QubitId>{0, 2}));
    EXPECT_EQ(sets.outputs, (std::set<QubitId>{0, 2}));
}

TEST(Icm, NoGates) {
    auto c = parse_icm("qubit a\ninit a 0\nmeasure a Z\n");
    EXPECT_EQ(c.qubit_count(), 1u);
    EXPECT_EQ(c.gate_count(), 0u);
}

TEST(Icm, Errors) {
    const std::string head = "qubit x\nqubit y\ninit x 0\ninit y io\n";
    EXPECT_NE(error_text([&] { parse_icm(head + "cnot x x\nmeasure x Z\nmeasure y io\n"); }).find("control equals target"),
              std::string::npos);
    EXPECT_EQ(error_line([&] { parse_icm(head + "init x 1\n"); }), 5u);
    EXPECT_EQ(error_line([&] { parse_icm(head + "measure x Z\nmeasure x X\n"); }), 6u);
    EXPECT_EQ(error_line([&] { parse_icm(head + "cnot x w\n"); }), 5u);
}

TEST(Schedule, Fig2Recycled) {
    auto c = load_fixture("circuits/fig2.icm");
    auto g = build_causal_graph(c);
    recycle(g);
    const auto text = emit_schedule(g, c);
    EXPECT_EQ(count_lines(text), 8u);
    const auto measure = text.find("measure w0 Z");
    const auto init = text.find("init w0 0", text.find("init w0 0") + 1);
    ASSERT_NE(measure, std::string::npos);
    ASSERT_NE(init, std::string::npos);
    EXPECT_LT(measure, init);
}

TEST(Schedule, SingleIdleQubit) {
    auto c = parse_icm("qubit a\ninit a +\nmeasure a X\n");
    EXPECT_EQ(emit_schedule(build_causal_graph(c), c), "init w0 +\nmeasure w0 X\n");
}

TEST(Schedule, RejectsCyclicGraph) {
    auto c = load_fixture("circuits/fig2.icm");
    auto g = build_causal_graph(c);
    g.add_edge(g.output_of(2), g.input_of(0));
    EXPECT_THROW(emit_schedule(g, c), Error);
}

TEST(Stats, Percentages) {
    Stats pdc{"pdc_307", 619, 603, 0, Heuristic::M1, 464};
    EXPECT_EQ(pdc.percent(), 75u);
    Stats cuccaro{"Cuccaro4", 304, 295, 0, Heuristic::M1, 276};
    EXPECT_EQ(cuccaro.percent(), 91u);
    Stats none{"x", 7, 0, 0, Heuristic::M2, 0};
    EXPECT_EQ(none.percent(), 0u);
    EXPECT_EQ(none.final_wires(), 7u);
}

TEST(Stats, JsonFieldsInFixedOrder) {
    Stats s{"fig2", 3, 2, 2, Heuristic::M1, 1};
    EXPECT_EQ(emit_stats_json(s),
              R"({"circuit":"fig2","qubits":3,"ancilla_inputs":2,"ancilla_outputs":2,"heuristic":"m1","recycled":1,"final_wires":2,"percent":33})");
}

TEST(FormatsProperty, ScheduleHasOneLinePerNode) {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 300; ++i) {
        auto c = random_circuit(rng);
        auto g = build_causal_graph(c);
        recycle(g);
        ASSERT_EQ(count_lines(emit_schedule(g, c)), g.size());
    }
}

TEST(FormatsProperty, IcmRoundTrip) {
    std::mt19937_64 rng(22);
    for (int i = 0; i < 300; ++i) {
        auto c = random_circuit(rng);
        c.gates.erase(std::remove_if(c.gates.begin(), c.gates.end(), [](const GateOp& g) { return !is_cnot(g); }),
                      c.gates.end());
        auto back = parse_icm(emit_icm(c));
        ASSERT_EQ(back.qubit_count(), c.qubit_count());
        ASSERT_EQ(back.gate_count(), c.gate_count());
        for (std::size_t k = 0; k < c.gate_count(); ++k) {
            ASSERT_EQ(back.gates[k].controls, c.gates[k].controls);
            ASSERT_EQ(back.gates[k].targets, c.gates[k].targets);
        }
        for (QubitId q = 0; q < c.qubit_count(); ++q) {
            ASSERT_EQ(back.qubits[q].input_ancilla, c.qubits[q].input_ancilla);
            ASSERT_EQ(back.qubits[q].output_ancilla, c.qubits[q].output_ancilla);
        }
    }
}
