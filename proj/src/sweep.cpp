#include "fedroute/sweep.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fedroute/rng.hpp"
#include "fedroute/scenario.hpp"

namespace fedroute {

SweepAxis parse_axis(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
        throw std::runtime_error("axis must look like key=v1,v2,... : " + spec);
    SweepAxis axis;
    axis.key = spec.substr(0, eq);
    std::stringstream ss(spec.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) axis.values.push_back(item);
    if (axis.values.empty())
        throw std::runtime_error("axis has no values: " + spec);
    return axis;
}

std::vector<SweepCell> run_sweep(const ConfigMap& base,
                                 const std::vector<SweepAxis>& axes) {
    if (axes.empty()) return {};
    std::size_t n_cells = 1;
    bool seed_pinned = false;
    for (const auto& a : axes) {
        n_cells *= a.values.size();
        if (a.key == "stream.master_seed") seed_pinned = true;
    }
    const std::uint64_t base_seed = static_cast<std::uint64_t>(
        cfg_size(base, "stream.master_seed", 1));

    std::vector<SweepCell> cells(n_cells);
    for (std::size_t idx = 0; idx < n_cells; ++idx) {
        cells[idx].index = idx;
        std::size_t rem = idx;
        // Last axis varies fastest.
        for (auto it = axes.rbegin(); it != axes.rend(); ++it) {
            cells[idx].overrides[it->key] = it->values[rem % it->values.size()];
            rem /= it->values.size();
        }
    }

#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(n_cells); ++i) {
        SweepCell& cell = cells[static_cast<std::size_t>(i)];
        try {
            ConfigMap m = base;
            for (const auto& [k, v] : cell.overrides) m[k] = v;
            if (!seed_pinned)
                m["stream.master_seed"] =
                    std::to_string(mix_seed(base_seed, cell.index));
            ScenarioConfig cfg = ScenarioConfig::from_map(m);
            cfg.validate();
            // The outer loop already uses every core; keep each cell serial.
            const Environment env = build_scenario(cfg);
            const RunReport report = run_stream(env);
            const SplitReport sr = split_early_post(report, env, cfg.tasr.warmup);
            cell.overall = aggregate(report.queries, env);
            cell.post_burned = sr.post_burned;
            if (sr.early) cell.early = *sr.early;
            cell.timing = timing_stats(report);
            cell.ok = true;
        } catch (const std::exception& e) {
            cell.ok = false;
            cell.error = e.what();
        }
    }
    return cells;
}

void write_sweep_csv(const std::string& path, const std::vector<SweepCell>& cells,
                     const std::vector<SweepAxis>& axes) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_sweep_csv: cannot open " + path);
    f << "cell";
    for (const auto& a : axes) f << "," << a.key;
    f << ",ok,n_queries,hr1,hr2,hr3,acc1,acc3,malrank,burned_hr1,burned_acc1,error\n";
    char buf[256];
    for (const auto& c : cells) {
        f << c.index;
        for (const auto& a : axes) f << "," << c.overrides.at(a.key);
        std::snprintf(buf, sizeof(buf),
                      ",%d,%zu,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,",
                      c.ok ? 1 : 0, c.overall.n_queries, c.overall.hr1, c.overall.hr2,
                      c.overall.hr3, c.overall.acc1, c.overall.acc3, c.overall.malrank,
                      c.post_burned.hr1, c.post_burned.acc1);
        f << buf;
        // Commas in error text would break the row; flatten them.
        std::string err = c.error;
        for (char& ch : err)
            if (ch == ',' || ch == '\n') ch = ';';
        f << err << "\n";
    }
}

}  // namespace fedroute
