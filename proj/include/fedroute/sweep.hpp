#pragma once

#include <map>
#include <string>
#include <vector>

#include "fedroute/config.hpp"
#include "fedroute/stream.hpp"

namespace fedroute {

struct SweepAxis {
    std::string key;                  // config key, e.g. "attack.target_fraction"
    std::vector<std::string> values;  // literal config values
};

// "name=v1,v2,v3" as accepted by the CLI.
SweepAxis parse_axis(const std::string& spec);

struct SweepCell {
    std::size_t index = 0;
    std::map<std::string, std::string> overrides;
    bool ok = false;
    std::string error;
    Aggregates overall;
    Aggregates post_burned;
    Aggregates early;  // n_queries = 0 when warmup is 0
    TimingStats timing;
};

// Cartesian grid over the axes; one run per cell. Unless an axis pins
// stream.master_seed, each cell is reseeded from (base master seed, index).
// Per-cell failures are recorded and the sweep continues. Cells execute in
// parallel.
std::vector<SweepCell> run_sweep(const ConfigMap& base,
                                 const std::vector<SweepAxis>& axes);

void write_sweep_csv(const std::string& path, const std::vector<SweepCell>& cells,
                     const std::vector<SweepAxis>& axes);

}  // namespace fedroute
