// Command-line front end for the federated routing simulator.
//
// Subcommands:
//   simulate --config <file> --out <dir>       run one scenario stream
//   sweep    --config <file> --axis k=v1,v2    grid over config overrides
//   report   --in <dir> --table <name>         print summary|trust|timing
//   selftest                                   quick internal consistency run
//
// Exit codes: 0 success, 1 configuration error, 2 runtime failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fedroute/scenario.hpp"
#include "fedroute/stream.hpp"
#include "fedroute/sweep.hpp"

namespace {

using namespace fedroute;

int do_simulate(const std::string& config_path, const std::string& out_dir) {
    ScenarioConfig cfg;
    try {
        cfg = ScenarioConfig::from_map(parse_config_file(config_path));
        cfg.validate();
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
    const Environment env = build_scenario(cfg);
    const RunReport report = run_stream(env);
    write_report(out_dir, env, report);
    const Aggregates a = aggregate(report.queries, env);
    std::cout << "queries=" << a.n_queries << " hr@1=" << a.hr1 << " hr@3=" << a.hr3
              << " acc@1=" << a.acc1 << " malrank=" << a.malrank << "\n"
              << "wrote " << out_dir << "/{report.jsonl,summary.csv,trust.json,timing.json}\n";
    return 0;
}

int do_sweep(const std::string& config_path, const std::vector<std::string>& axis_specs,
             const std::string& out_dir) {
    ConfigMap base;
    std::vector<SweepAxis> axes;
    try {
        base = parse_config_file(config_path);
        for (const auto& s : axis_specs) axes.push_back(parse_axis(s));
        if (axes.empty()) throw std::runtime_error("at least one --axis is required");
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
    const auto cells = run_sweep(base, axes);
    std::filesystem::create_directories(out_dir);
    write_sweep_csv(out_dir + "/sweep.csv", cells, axes);
    std::size_t failed = 0;
    for (const auto& c : cells)
        if (!c.ok) ++failed;
    std::cout << "cells=" << cells.size() << " failed=" << failed << "\n"
              << "wrote " << out_dir << "/sweep.csv\n";
    return failed == cells.size() ? 2 : 0;
}

int do_report(const std::string& in_dir, const std::string& table) {
    if (table == "summary") {
        std::ifstream f(in_dir + "/summary.csv");
        if (!f) throw std::runtime_error("cannot open " + in_dir + "/summary.csv");
        std::string header, row;
        std::getline(f, header);
        std::getline(f, row);
        std::stringstream hs(header), rs(row);
        std::string h, r;
        while (std::getline(hs, h, ',') && std::getline(rs, r, ','))
            std::cout << h << "\t" << r << "\n";
        return 0;
    }
    if (table == "trust") {
        std::ifstream f(in_dir + "/trust.json");
        if (!f) throw std::runtime_error("cannot open " + in_dir + "/trust.json");
        const auto j = nlohmann::json::parse(f);
        std::cout << "t=" << j.at("t").get<std::size_t>() << "\n"
                  << "client\tu_rel\tu_cons\tu_agr\ts\n";
        for (const auto& [id, c] : j.at("clients").items()) {
            char buf[128];
            std::snprintf(buf, sizeof(buf), "%s\t%.4f\t%.4f\t%.4f\t%.4f\n", id.c_str(),
                          c.at("u_rel").get<double>(), c.at("u_cons").get<double>(),
                          c.at("u_agr").get<double>(), c.at("s").get<double>());
            std::cout << buf;
        }
        return 0;
    }
    if (table == "timing") {
        std::ifstream f(in_dir + "/timing.json");
        if (!f) throw std::runtime_error("cannot open " + in_dir + "/timing.json");
        const auto j = nlohmann::json::parse(f);
        std::cout << "per-query mean_ms\t" << j.at("per_query_ms").at("mean").get<double>()
                  << "\nper-query p95_ms\t" << j.at("per_query_ms").at("p95").get<double>()
                  << "\n";
        return 0;
    }
    std::cerr << "config error: unknown table '" << table
              << "' (expected summary, trust, or timing)\n";
    return 1;
}

int do_selftest() {
    // Small end-to-end run, checked for determinism and serial/parallel parity.
    ScenarioConfig cfg;
    cfg.n_honest = 8;
    cfg.n_domains = 4;
    cfg.domains_per_client = 2;
    cfg.docs_per_domain = 10;
    cfg.attack.n_adv = 2;
    cfg.attack.proxy_size = 20;
    cfg.true_corpus_size = 20;
    cfg.stream_length = 60;
    cfg.tasr.warmup = 10;
    cfg.defense = DefenseKind::tasr_full;
    cfg.validate();

    const Environment env = build_scenario(cfg);
    set_default_exec(Exec::parallel);
    const RunReport r1 = run_stream(env);
    const RunReport r2 = run_stream(env);
    set_default_exec(Exec::serial);
    const RunReport r3 = run_stream(env);
    set_default_exec(Exec::parallel);

    auto digest = [](const RunReport& r) {
        std::ostringstream ss;
        for (const auto& q : r.queries) ss << decision_to_json(q.decision).dump();
        ss << trust_to_json(r.final_trust).dump();
        return ss.str();
    };
    if (digest(r1) != digest(r2)) {
        std::cerr << "selftest: repeated run diverged\n";
        return 2;
    }
    if (digest(r1) != digest(r3)) {
        std::cerr << "selftest: serial and parallel runs diverged\n";
        return 2;
    }
    for (const auto& [id, c] : r1.final_trust.clients) {
        for (double u : {c.u_rel, c.u_cons, c.u_agr, c.s})
            if (!(u >= 0.0 && u <= 1.0) || !std::isfinite(u)) {
                std::cerr << "selftest: trust state out of [0,1] for " << id << "\n";
                return 2;
            }
    }
    const Aggregates a = aggregate(r1.queries, env);
    std::cout << "selftest ok: queries=" << a.n_queries << " hr@1=" << a.hr1
              << " acc@1=" << a.acc1 << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"federated retrieval routing simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir, in_dir, table = "summary";
    std::vector<std::string> axis_specs;

    auto* sim = app.add_subcommand("simulate", "run one scenario stream");
    sim->add_option("--config", config_path, "scenario config file")->required();
    sim->add_option("--out", out_dir, "output directory")->required();

    auto* sw = app.add_subcommand("sweep", "grid sweep over config overrides");
    sw->add_option("--config", config_path, "base scenario config file")->required();
    sw->add_option("--axis", axis_specs, "axis as key=v1,v2,... (repeatable)")->required();
    sw->add_option("--out", out_dir, "output directory")->required();

    auto* rep = app.add_subcommand("report", "print a table from a run directory");
    rep->add_option("--in", in_dir, "run output directory")->required();
    rep->add_option("--table", table, "summary | trust | timing");

    app.add_subcommand("selftest", "quick internal consistency checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed()) return do_simulate(config_path, out_dir);
        if (sw->parsed()) return do_sweep(config_path, axis_specs, out_dir);
        if (rep->parsed()) return do_report(in_dir, table);
        return do_selftest();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
