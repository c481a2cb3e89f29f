#pragma once

// Batch driver behind the command-line tool: per-file recycling runs with
// optional verification and artifact emission, plus the corpus regression
// against reference result tables.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "causal.hpp"
#include "circuit.hpp"
#include "formats.hpp"
#include "recycle.hpp"
#include "verify.hpp"

namespace wirerecycle {

namespace fs = std::filesystem;

enum class InputFormat { Auto, Real, Icm };

struct RunConfig {
    std::vector<std::string> inputs;
    InputFormat format = InputFormat::Auto;
    std::vector<Heuristic> heuristics{Heuristic::M1, Heuristic::M2};
    M1Mode m1_mode = M1Mode::Absolute;
    bool verify = false;
    std::optional<std::string> emit_schedule; // directory
    std::optional<std::string> emit_stats;    // JSON Lines file
    std::optional<std::string> emit_dot;      // directory
    std::size_t jobs = 1;
};

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline Circuit load_circuit(const fs::path& path, InputFormat format = InputFormat::Auto) {
    const std::string text = read_file(path);
    const std::string name = path.stem().string();
    if (format == InputFormat::Auto) format = path.extension() == ".real" ? InputFormat::Real : InputFormat::Icm;
    try {
        return format == InputFormat::Real ? parse_real(text, name) : parse_icm(text, name);
    } catch (const ParseError& e) {
        throw Error(path.string() + ":" + std::to_string(e.line()) + ": " + e.message());
    }
}

// A circuit the classical simulator can execute: every gate is a
// multi-control NOT/swap and every fixed input is |0> or |1>.
inline bool is_classical(const Circuit& circuit) {
    for (const auto& q : circuit.qubits) {
        if (q.init != InitState::Zero && q.init != InitState::One && q.init != InitState::Configurable) return false;
    }
    try {
        for (const auto& g : circuit.gates) classical_semantics(g);
    } catch (const Error&) {
        return false;
    }
    return true;
}

struct HeuristicResult {
    Heuristic heuristic = Heuristic::M1;
    RecyclePlan plan;
    Stats stats;
    std::optional<SoundnessReport> soundness;
    std::optional<bool> equivalent; // set when the functional check ran
    std::string schedule;
    std::string dot;

    bool verified() const { return (!soundness || soundness->ok()) && equivalent.value_or(true); }
};

struct FileResult {
    std::string path;
    std::string name;
    std::string error;
    std::size_t qubits = 0;
    std::size_t ancilla = 0;
    std::vector<HeuristicResult> runs;

    const HeuristicResult* find(Heuristic h) const {
        for (const auto& r : runs) {
            if (r.heuristic == h) return &r;
        }
        return nullptr;
    }
};

inline HeuristicResult run_heuristic(const Circuit& circuit, Heuristic h, const RunConfig& config) {
    HeuristicResult result;
    result.heuristic = h;
    CausalGraph graph = build_causal_graph(circuit);
    result.plan = recycle(graph, RecycleOptions{h, config.m1_mode});
    result.stats = make_stats(circuit, result.plan);
    if (config.verify) {
        result.soundness = check_plan_sound(circuit, graph, result.plan);
        std::size_t free_inputs = circuit.qubit_count() - count_input_ancillae(circuit);
        if (is_classical(circuit) && free_inputs <= max_exhaustive_inputs) {
            result.equivalent = check_functional_equivalence(circuit, graph, result.plan);
        }
    }
    if (config.emit_schedule) result.schedule = emit_schedule(graph, circuit);
    if (config.emit_dot) result.dot = to_dot(graph, circuit);
    return result;
}

inline FileResult process_file(const std::string& path, const RunConfig& config) {
    FileResult result;
    result.path = path;
    result.name = fs::path(path).stem().string();
    Circuit circuit;
    try {
        circuit = load_circuit(path, config.format);
    } catch (const Error& e) {
        result.error = e.what();
        return result;
    }
    result.qubits = circuit.qubit_count();
    result.ancilla = count_input_ancillae(circuit);
    for (Heuristic h : config.heuristics) result.runs.push_back(run_heuristic(circuit, h, config));
    return result;
}

// Runs `process_file` over all inputs with up to `jobs` workers; results stay
// in input order.
inline std::vector<FileResult> process_all(const RunConfig& config) {
    std::vector<FileResult> results(config.inputs.size());
    const std::size_t workers = std::max<std::size_t>(1, std::min(config.jobs, config.inputs.size()));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < config.inputs.size(); i = next++) {
            results[i] = process_file(config.inputs[i], config);
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    return results;
}

inline std::string table_header() { return "Circuit, Qubits, Ancilla, M1, M2, %M1, %M2"; }

inline std::string table_row(const FileResult& r) {
    auto cell = [&](Heuristic h, bool percent) -> std::string {
        const auto* run = r.find(h);
        if (!run) return "-";
        return std::to_string(percent ? run->stats.percent() : run->stats.recycled);
    };
    std::ostringstream out;
    out << r.name << ", " << r.qubits << ", " << r.ancilla << ", " << cell(Heuristic::M1, false) << ", "
        << cell(Heuristic::M2, false) << ", " << cell(Heuristic::M1, true) << ", " << cell(Heuristic::M2, true);
    return out.str();
}

inline void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << content;
}

// Exit codes: 0 success, 1 unreadable/unparsable input or usage error,
// 2 verification failure.
inline int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    if (config.inputs.empty()) {
        err << "usage: wirerecycle --inputs FILE... [--heuristic m1|m2|both] [--verify]\n";
        return 1;
    }
    auto results = process_all(config);

    bool parse_failed = false;
    bool verify_failed = false;
    std::string stats_lines;
    out << table_header() << '\n';
    for (const auto& r : results) {
        if (!r.error.empty()) {
            err << "error: " << r.error << '\n';
            parse_failed = true;
            continue;
        }
        out << table_row(r) << '\n';
        for (const auto& run : r.runs) {
            stats_lines += emit_stats_json(run.stats) + '\n';
            if (config.verify && !run.verified()) {
                verify_failed = true;
                err << "verification failed: " << r.name << " (" << to_string(run.heuristic) << ")\n";
                if (run.soundness) err << run.soundness->text();
                if (run.equivalent && !*run.equivalent) err << "functional equivalence check failed\n";
            }
            const std::string stem = r.name + "." + std::string(to_string(run.heuristic));
            if (config.emit_schedule) write_file(fs::path(*config.emit_schedule) / (stem + ".schedule"), run.schedule);
            if (config.emit_dot) write_file(fs::path(*config.emit_dot) / (stem + ".dot"), run.dot);
        }
    }
    if (config.emit_stats) write_file(*config.emit_stats, stats_lines);
    if (parse_failed) return 1;
    if (verify_failed) return 2;
    return 0;
}

// ---------------------------------------------------------------------------
// Regression against reference tables

struct ExpectedRow {
    std::string circuit;
    std::size_t qubits = 0;
    std::size_t ancilla = 0;
    std::size_t m1 = 0;
    std::size_t m2 = 0;
};

// CSV with header `circuit,qubits,ancilla,m1,m2`; `#` lines are comments.
inline std::vector<ExpectedRow> parse_expected_csv(std::string_view text) {
    std::vector<ExpectedRow> rows;
    bool header = true;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (header) {
            if (cells.size() < 5 || cells[0] != "circuit") throw ParseError(line_no, "expected header circuit,qubits,ancilla,m1,m2");
            header = false;
            continue;
        }
        if (cells.size() < 5) throw ParseError(line_no, "expected 5 columns");
        ExpectedRow row{cells[0]};
        std::size_t* fields[] = {&row.qubits, &row.ancilla, &row.m1, &row.m2};
        for (std::size_t i = 0; i < 4; ++i) {
            auto v = detail::parse_count(cells[i + 1]);
            if (!v) throw ParseError(line_no, "column " + std::to_string(i + 2) + " is not a count");
            *fields[i] = *v;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

enum class Match { Exact, WithinTolerance, Deviation };

inline std::string_view to_string(Match m) {
    switch (m) {
        case Match::Exact: return "exact";
        case Match::WithinTolerance: return "within";
        case Match::Deviation: return "deviation";
    }
    return "?";
}

inline constexpr double regression_tolerance = 0.10;

inline Match classify(std::size_t actual, std::size_t expected, double tolerance = regression_tolerance) {
    if (actual == expected) return Match::Exact;
    const double diff = std::abs(static_cast<double>(actual) - static_cast<double>(expected));
    return diff <= tolerance * static_cast<double>(expected) ? Match::WithinTolerance : Match::Deviation;
}

struct RegressRow {
    ExpectedRow expected;
    bool skipped = false;
    std::string error;
    std::size_t qubits = 0;
    std::size_t ancilla_inputs = 0;
    std::size_t ancilla_outputs = 0;
    std::size_t m1_signed = 0;
    std::size_t m1_absolute = 0;
    std::size_t m2 = 0;
    double m1_seconds = 0;

    std::size_t m1(M1Mode mode) const { return mode == M1Mode::Signed ? m1_signed : m1_absolute; }
    // The M1 reading whose count lies closer to the reference value.
    M1Mode winning_m1_mode() const {
        auto dist = [&](std::size_t v) { return v > expected.m1 ? v - expected.m1 : expected.m1 - v; };
        return dist(m1_absolute) < dist(m1_signed) ? M1Mode::Absolute : M1Mode::Signed;
    }
};

struct RegressReport {
    std::vector<RegressRow> rows;

    std::size_t evaluated() const {
        return static_cast<std::size_t>(
            std::count_if(rows.begin(), rows.end(), [](const RegressRow& r) { return !r.skipped; }));
    }

    std::string text() const;
    nlohmann::ordered_json json() const;
};

inline std::optional<fs::path> find_corpus_file(const fs::path& dir, const std::string& circuit) {
    for (const char* ext : {".real", ".icm"}) {
        fs::path p = dir / (circuit + ext);
        if (fs::exists(p)) return p;
    }
    return std::nullopt;
}

inline RegressRow regress_one(const fs::path& corpus_dir, const ExpectedRow& expected) {
    RegressRow row;
    row.expected = expected;
    auto path = find_corpus_file(corpus_dir, expected.circuit);
    if (!path) {
        row.skipped = true;
        return row;
    }
    try {
        Circuit circuit = load_circuit(*path);
        row.qubits = circuit.qubit_count();
        row.ancilla_inputs = count_input_ancillae(circuit);
        row.ancilla_outputs = count_output_ancillae(circuit);
        auto count = [&](Heuristic h, M1Mode mode) {
            CausalGraph graph = build_causal_graph(circuit);
            return recycle(graph, RecycleOptions{h, mode}).recycled_count;
        };
        auto start = std::chrono::steady_clock::now();
        row.m1_absolute = count(Heuristic::M1, M1Mode::Absolute);
        row.m1_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        row.m1_signed = count(Heuristic::M1, M1Mode::Signed);
        row.m2 = count(Heuristic::M2, M1Mode::Signed);
    } catch (const Error& e) {
        row.error = e.what();
    }
    return row;
}

inline RegressReport regress(const fs::path& corpus_dir, const std::vector<ExpectedRow>& expected, std::size_t jobs = 1) {
    RegressReport report;
    report.rows.resize(expected.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < expected.size(); i = next++) report.rows[i] = regress_one(corpus_dir, expected[i]);
    };
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < std::max<std::size_t>(1, jobs); ++w) pool.emplace_back(work);
    work();
    pool.clear();
    return report;
}

inline std::string RegressReport::text() const {
    std::ostringstream out;
    out << "circuit, qubits(exp), ancilla(exp), m1-signed, m1-absolute, m1(exp), m2, m2(exp), "
           "qubits, ancilla, m1, m2, m1-mode\n";
    struct Tally {
        std::size_t exact = 0, within = 0, total = 0;
        void add(Match m) {
            ++total;
            if (m == Match::Exact) ++exact;
            if (m != Match::Deviation) ++within;
        }
    } q, a, m1, m2;
    std::size_t skipped = 0;
    for (const auto& r : rows) {
        if (r.skipped) {
            ++skipped;
            out << r.expected.circuit << ", skipped (not in corpus)\n";
            continue;
        }
        if (!r.error.empty()) {
            out << r.expected.circuit << ", error: " << r.error << '\n';
            continue;
        }
        const M1Mode mode = r.winning_m1_mode();
        Match mq = classify(r.qubits, r.expected.qubits);
        Match ma = classify(r.ancilla_inputs, r.expected.ancilla);
        Match mm1 = classify(r.m1(mode), r.expected.m1);
        Match mm2 = classify(r.m2, r.expected.m2);
        q.add(mq);
        a.add(ma);
        m1.add(mm1);
        m2.add(mm2);
        out << r.expected.circuit << ", " << r.qubits << "(" << r.expected.qubits << "), " << r.ancilla_inputs << "("
            << r.expected.ancilla << "), " << r.m1_signed << ", " << r.m1_absolute << ", " << r.expected.m1 << ", "
            << r.m2 << ", " << r.expected.m2 << ", " << to_string(mq) << ", " << to_string(ma) << ", "
            << to_string(mm1) << ", " << to_string(mm2) << ", " << to_string(mode) << '\n';
    }
    auto pct = [](std::size_t k, std::size_t n) { return n == 0 ? 0.0 : 100.0 * static_cast<double>(k) / static_cast<double>(n); };
    out << std::fixed << std::setprecision(1);
    out << "summary: " << evaluated() << " evaluated, " << skipped << " skipped\n";
    for (auto [name, t] : {std::pair{"qubits", q}, {"ancilla", a}, {"m1", m1}, {"m2", m2}}) {
        out << "  " << name << ": " << pct(t.exact, t.total) << "% exact, " << pct(t.within, t.total)
            << "% within " << static_cast<int>(regression_tolerance * 100) << "%\n";
    }
    return out.str();
}

inline nlohmann::ordered_json RegressReport::json() const {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["circuit"] = r.expected.circuit;
        j["skipped"] = r.skipped;
        if (!r.skipped && r.error.empty()) {
            j["qubits"] = r.qubits;
            j["ancilla_inputs"] = r.ancilla_inputs;
            j["ancilla_outputs"] = r.ancilla_outputs;
            j["m1_signed"] = r.m1_signed;
            j["m1_absolute"] = r.m1_absolute;
            j["m2"] = r.m2;
            j["m1_mode"] = std::string(to_string(r.winning_m1_mode()));
        }
        if (!r.error.empty()) j["error"] = r.error;
        j["expected"] = {{"qubits", r.expected.qubits}, {"ancilla", r.expected.ancilla}, {"m1", r.expected.m1}, {"m2", r.expected.m2}};
        arr.push_back(std::move(j));
    }
    return arr;
}

} // namespace wirerecycle
