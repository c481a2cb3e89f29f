// wirerecycle: recycle circuit wires over a batch of .real / ICM files.
//
//   wirerecycle --inputs a.real b.icm --heuristic both --verify
//   wirerecycle regress --corpus data/revlib --expected data/reference/revlib_table.csv

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include <wirerecycle/wirerecycle.hpp>

namespace wr = wirerecycle;

int main(int argc, char** argv) {
    CLI::App app{"Quantum circuit wire recycling"};
    app.require_subcommand(0, 1);

    wr::RunConfig config;
    std::string heuristic = "both";
    std::string m1_mode = "absolute";
    std::string format = "auto";
    std::string emit_schedule, emit_stats, emit_dot;

    app.add_option("--inputs", config.inputs, "Circuit files (.real or ICM text)");
    app.add_option("--format", format, "Input format")->check(CLI::IsMember({"auto", "real", "icm"}));
    app.add_option("--heuristic", heuristic, "Candidate search")->check(CLI::IsMember({"m1", "m2", "both"}));
    app.add_option("--m1-mode", m1_mode, "M1 difference reading")->check(CLI::IsMember({"signed", "absolute"}));
    app.add_flag("--verify", config.verify, "Check every plan for soundness and, when classical, equivalence");
    app.add_option("--emit-schedule", emit_schedule, "Directory for recycled schedules");
    app.add_option("--emit-stats", emit_stats, "File receiving one stats JSON object per line");
    app.add_option("--emit-dot", emit_dot, "Directory for causal graphs in DOT format");
    app.add_option("--jobs", config.jobs, "Parallel workers (one file per worker)")->check(CLI::PositiveNumber);

    auto* regress_cmd = app.add_subcommand("regress", "Compare recycling counts against a reference table");
    std::string corpus, expected, json_out;
    std::size_t regress_jobs = 1;
    regress_cmd->add_option("--corpus", corpus, "Directory holding <circuit>.real files")->required();
    regress_cmd->add_option("--expected", expected, "CSV with circuit,qubits,ancilla,m1,m2")->required();
    regress_cmd->add_option("--json", json_out, "Also write the report as JSON");
    regress_cmd->add_option("--jobs", regress_jobs, "Parallel workers")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*regress_cmd) {
            auto rows = wr::parse_expected_csv(wr::read_file(expected));
            auto report = wr::regress(corpus, rows, regress_jobs);
            std::cout << report.text();
            if (!json_out.empty()) wr::write_file(json_out, report.json().dump(2) + "\n");
            return 0;
        }

        static const std::map<std::string, wr::InputFormat> formats{
            {"auto", wr::InputFormat::Auto}, {"real", wr::InputFormat::Real}, {"icm", wr::InputFormat::Icm}};
        config.format = formats.at(format);
        if (heuristic == "m1") config.heuristics = {wr::Heuristic::M1};
        if (heuristic == "m2") config.heuristics = {wr::Heuristic::M2};
        config.m1_mode = m1_mode == "absolute" ? wr::M1Mode::Absolute : wr::M1Mode::Signed;
        if (!emit_schedule.empty()) config.emit_schedule = emit_schedule;
        if (!emit_stats.empty()) config.emit_stats = emit_stats;
        if (!emit_dot.empty()) config.emit_dot = emit_dot;
        return wr::run(config, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
